//! Closed-form minimax lower bounds, MLE success guarantees, tractable
//! algorithm error bounds and the associated recovery conditions.

mod lemmas;
pub mod numeric;
mod regime1;
mod regime2;

use serde::Serialize;

use crate::graph::{Graph, GraphMetrics};
use crate::model::{ModelError, ModelParams, Regime};

pub use lemmas::{lemma3_l, r_function};
pub use regime1::{
    epsilon1, f1, g1, g1_star, h1, kappa1, ln_mle_failure_regime1, ln_tau, minimax_lower_regime1,
    mle_success_lower_regime1, necessary_condition_violated_regime1,
    sufficient_condition_regime1, MinimaxParts,
};
pub use regime2::{
    epsilon2, f2, g2, g2_star, h2, kappa2, minimax_lower_regime2, mle_success_lower_regime2,
    necessary_condition_violated_regime2, sufficient_condition_regime2,
};

/// Largest number of binomial terms summed exactly when averaging over the
/// cycle-space variable; larger graphs are refused rather than approximated.
pub const MAX_EXPECTATION_TERMS: u64 = 1_000_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BoundError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid bound inputs: {0}")]
    InvalidInputs(String),
    #[error("expectation needs {terms} terms, more than the limit of {limit}")]
    TooManyTerms { terms: u64, limit: u64 },
}

/// Graph quantities the bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphShape {
    pub n: usize,
    pub num_edges: usize,
    pub delta_max: usize,
    pub cheeger: f64,
}

impl GraphShape {
    pub fn new(
        n: usize,
        num_edges: usize,
        delta_max: usize,
        cheeger: f64,
    ) -> Result<Self, BoundError> {
        let bad = |msg: String| Err(BoundError::InvalidInputs(msg));
        if n < 2 {
            return bad(format!("n = {n} must be at least 2"));
        }
        if num_edges + 1 < n {
            return bad(format!("{num_edges} edges cannot connect {n} nodes"));
        }
        if delta_max == 0 || delta_max >= n {
            return bad(format!("delta_max = {delta_max} must lie in [1, n)"));
        }
        if !(cheeger > 0.0 && cheeger.is_finite()) {
            return bad(format!("cheeger = {cheeger} must be positive and finite"));
        }
        Ok(GraphShape {
            n,
            num_edges,
            delta_max,
            cheeger,
        })
    }

    pub fn from_graph(g: &Graph, metrics: &GraphMetrics) -> Result<Self, BoundError> {
        GraphShape::new(g.n(), g.num_edges(), metrics.delta_max, metrics.cheeger)
    }

    pub fn is_tree(&self) -> bool {
        self.num_edges + 1 == self.n
    }

    /// Number of independent cycles, `|E| - n + 1`.
    pub fn cycle_rank(&self) -> u64 {
        (self.num_edges + 1 - self.n) as u64
    }
}

/// One point at which the bounds are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub shape: GraphShape,
    pub params: ModelParams,
}

impl BoundInputs {
    pub fn new(shape: GraphShape, params: ModelParams) -> Self {
        BoundInputs { shape, params }
    }
}

/// Whether the entropy-refined Fano term was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaStatus {
    /// The gating indicator is false; the refinement contributes nothing.
    NotNeeded,
    Computed,
    /// The expectation exceeds [`MAX_EXPECTATION_TERMS`]; the refinement is
    /// dropped, which can only make the reported lower bound weaker.
    SkippedTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub regime: Regime,
    pub n: usize,
    pub num_edges: usize,
    pub delta_max: usize,
    pub cheeger: f64,
    pub p: f64,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub f: f64,
    pub g: f64,
    pub g_star: f64,
    pub minimax_lower: f64,
    pub kappa: Option<f64>,
    pub kappa_status: KappaStatus,
    pub mle_success_lower_raw: f64,
    pub mle_success_lower: f64,
    pub epsilon1: f64,
    pub epsilon2: Option<f64>,
    pub epsilon_tractable: f64,
    pub tractable_success_lower: f64,
    pub necessary_condition_violated: bool,
    pub sufficient_condition_holds: bool,
}

pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Evaluates every bound for the regime implied by `inputs.params`.
pub fn bound_report(inputs: &BoundInputs) -> Result<BoundReport, BoundError> {
    let shape = &inputs.shape;
    let params = &inputs.params;
    let p = params.p();
    let eps1 = epsilon1(shape, p)?;
    let (parts, raw, eps2, necessary, sufficient) = match params.q() {
        None => (
            minimax_lower_regime1(shape, p)?,
            mle_success_lower_regime1(shape, p)?,
            None,
            necessary_condition_violated_regime1(shape, p)?,
            sufficient_condition_regime1(shape, p)?,
        ),
        Some(q) => (
            minimax_lower_regime2(shape, p, q)?,
            mle_success_lower_regime2(shape, params)?,
            Some(epsilon2(shape.n, q)?),
            necessary_condition_violated_regime2(shape, p, q)?,
            sufficient_condition_regime2(shape, params)?,
        ),
    };
    let eps_total = eps1 + eps2.unwrap_or(0.0);
    Ok(BoundReport {
        regime: params.regime(),
        n: shape.n,
        num_edges: shape.num_edges,
        delta_max: shape.delta_max,
        cheeger: shape.cheeger,
        p,
        q: params.q(),
        alpha: params.alpha(),
        f: parts.f,
        g: parts.g,
        g_star: parts.g_star,
        minimax_lower: parts.max(),
        kappa: parts.kappa,
        kappa_status: parts.kappa_status,
        mle_success_lower_raw: raw,
        mle_success_lower: clamp_unit(raw),
        epsilon1: eps1,
        epsilon2: eps2,
        epsilon_tractable: eps_total,
        tractable_success_lower: clamp_unit(1.0 - eps_total),
        necessary_condition_violated: necessary,
        sufficient_condition_holds: sufficient,
    })
}

/// Natural-log binary entropy with `0 ln 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64, BoundError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(BoundError::Model(ModelError::Domain {
            name: "p",
            value: p,
            allowed: "[0, 1]",
        }));
    }
    Ok(numeric::entropy(p))
}

pub(crate) fn check_prob(name: &'static str, value: f64) -> Result<(), BoundError> {
    crate::model::check_closed(name, value).map_err(BoundError::from)
}

pub(crate) fn check_positive_prob(name: &'static str, value: f64) -> Result<(), BoundError> {
    if value > 0.0 && value <= 0.5 {
        Ok(())
    } else {
        Err(BoundError::Model(ModelError::Domain {
            name,
            value,
            allowed: "(0, 1/2]",
        }))
    }
}
