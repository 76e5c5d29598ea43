//! Monte Carlo estimation of the MLE's exact-recovery probability and the
//! comparison against the theoretical guarantees.

use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_report, BoundError, BoundInputs, BoundReport, GraphShape};
use crate::graph::{build_family, parse_edge_list, CheegerMethod, CheegerPolicy, Graph, GraphError, GraphFamily};
use crate::mle::{check_recovery, mle_edge_node_with, mle_edge_only_with, MleError, MleOptions};
use crate::model::{sample_labels, sample_observation, ModelParams, Regime, RngSpec};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

/// Number of interval half-widths tolerated below a bound.
pub const SLACK_HALF_WIDTHS: f64 = 3.0;

#[derive(Debug, thiserror::Error)]
pub enum McError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Mle(#[from] MleError),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("cannot build a worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Family(GraphFamily),
    EdgeListFile(PathBuf),
}

impl GraphSpec {
    pub fn load(&self) -> Result<Graph, McError> {
        match self {
            GraphSpec::Family(f) => Ok(build_family(f)?),
            GraphSpec::EdgeListFile(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| McError::Io {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                Ok(parse_edge_list(&text)?)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSpec::Family(f) => f.to_string(),
            GraphSpec::EdgeListFile(path) => format!("edge-list {}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub graph: GraphSpec,
    pub params: ModelParams,
    pub trials: u64,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool. Never affects
    /// results.
    pub workers: Option<usize>,
}

/// Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilsonInterval {
    pub low: f64,
    pub high: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        let n = trials as f64;
        let rate = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (rate + z2 / (2.0 * n)) / denom;
        let half = z / denom * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt();
        WilsonInterval {
            low: (center - half).max(0.0).min(rate),
            high: (center + half).min(1.0).max(rate),
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub graph: String,
    pub n: usize,
    pub num_edges: usize,
    pub cheeger_method: CheegerMethod,
    pub regime: Regime,
    pub p: f64,
    pub q: Option<f64>,
    pub master_seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub tie_trials: u64,
    pub bounds: BoundReport,
    /// `rate >= clamped MLE lower bound - 3 half-widths`.
    pub bound_consistent: bool,
    /// Present when the necessary condition fails: failure rate must then be
    /// at least `1/2 - 3 half-widths`.
    pub minimax_consistent: Option<bool>,
    pub necessary_condition_violated: bool,
    pub sufficient_condition_holds: bool,
}

impl McSummary {
    pub fn consistent(&self) -> bool {
        self.bound_consistent && self.minimax_consistent.unwrap_or(true)
    }

    pub fn slack(&self) -> f64 {
        SLACK_HALF_WIDTHS * (self.ci_high - self.ci_low) / 2.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    successes: u64,
    ties: u64,
}

impl Tally {
    fn add(self, other: Tally) -> Tally {
        Tally {
            successes: self.successes + other.successes,
            ties: self.ties + other.ties,
        }
    }
}

fn run_one(g: &Graph, params: &ModelParams, spec: RngSpec) -> Result<Tally, MleError> {
    let mut rng = spec.generator();
    let truth = sample_labels(g.n(), &mut rng);
    let obs = sample_observation(g, &truth, params, &mut rng);
    let opts = MleOptions {
        parallel: false,
        ..MleOptions::default()
    };
    let result = match (&obs.nodes, params.alpha()) {
        (Some(c), Some(alpha)) => mle_edge_node_with(g, &obs.edges, c, alpha, &opts)?,
        _ => mle_edge_only_with(g, &obs.edges, &opts)?,
    };
    let exact = check_recovery(&result, &truth, params.regime()).exact;
    Ok(Tally {
        successes: u64::from(exact),
        ties: u64::from(result.ties > 1),
    })
}

/// Runs `cfg.trials` independent trials. Trial `t` draws everything from
/// stream `t` of `cfg.master_seed`, so the counts do not depend on the
/// number of workers.
pub fn run_trials(cfg: &TrialConfig) -> Result<McSummary, McError> {
    if cfg.trials == 0 {
        return Err(McError::NoTrials);
    }
    let g = cfg.graph.load()?;
    let metrics = g.metrics(&CheegerPolicy::default())?;
    let shape = GraphShape::from_graph(&g, &metrics)?;
    let bounds = bound_report(&BoundInputs::new(shape, cfg.params))?;
    if g.n() > crate::mle::DEFAULT_MLE_LIMIT {
        return Err(MleError::TooLarge {
            n: g.n(),
            limit: crate::mle::DEFAULT_MLE_LIMIT,
        }
        .into());
    }

    let work = || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_one(&g, &cfg.params, RngSpec::new(cfg.master_seed, t)))
            .try_reduce(Tally::default, |a, b| Ok(a.add(b)))
    };
    let tally = match cfg.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| McError::Pool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let rate = tally.successes as f64 / cfg.trials as f64;
    let ci = WilsonInterval::new(tally.successes, cfg.trials, Z_99);
    let slack = SLACK_HALF_WIDTHS * ci.half_width();
    let bound_consistent = rate >= bounds.mle_success_lower - slack;
    let minimax_consistent = bounds
        .necessary_condition_violated
        .then(|| 1.0 - rate >= 0.5 - slack);
    Ok(McSummary {
        graph: cfg.graph.describe(),
        n: g.n(),
        num_edges: g.num_edges(),
        cheeger_method: metrics.cheeger_method,
        regime: cfg.params.regime(),
        p: cfg.params.p(),
        q: cfg.params.q(),
        master_seed: cfg.master_seed,
        trials: cfg.trials,
        successes: tally.successes,
        rate,
        ci_low: ci.low,
        ci_high: ci.high,
        tie_trials: tally.ties,
        necessary_condition_violated: bounds.necessary_condition_violated,
        sufficient_condition_holds: bounds.sufficient_condition_holds,
        bounds,
        bound_consistent,
        minimax_consistent,
    })
}

/// Runs every configuration in order.
pub fn sweep(cfgs: &[TrialConfig]) -> Result<Vec<McSummary>, McError> {
    cfgs.iter().map(run_trials).collect()
}

/// Seed for cell `index` of a grid rooted at `master_seed`.
pub fn cell_seed(master_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// One configuration per parameter point, each with its own derived seed.
pub fn grid_configs(
    graph: &GraphSpec,
    params: &[ModelParams],
    trials: u64,
    master_seed: u64,
    workers: Option<usize>,
) -> Vec<TrialConfig> {
    params
        .iter()
        .enumerate()
        .map(|(i, &params)| TrialConfig {
            graph: graph.clone(),
            params,
            trials,
            master_seed: cell_seed(master_seed, i as u64),
            workers,
        })
        .collect()
}
