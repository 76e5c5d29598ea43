use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use mrf_recovery::bounds::{bound_report, BoundInputs, BoundReport, GraphShape};
use mrf_recovery::figures::{generate, FigureError, FigureId, FigureSpec};
use mrf_recovery::format::{fmt_g, fmt_g12};
use mrf_recovery::graph::{
    build_family, parse_edge_list, CheegerPolicy, Graph, GraphError, GraphFamily,
    DEFAULT_ENUMERATION_LIMIT,
};
use mrf_recovery::model::ModelParams;
use mrf_recovery::montecarlo::{run_trials, GraphSpec, McError, TrialConfig};

/// Exit status for a bound-consistency violation.
const EXIT_VIOLATION: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mrf-recovery",
    version,
    about = "Recovery bounds, exhaustive MLE and Monte Carlo checks for binary MRFs",
    args_override_self = true
)]
pub struct Cli {
    /// `key = value` file whose entries act as flags; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print node count, edge count, maximum degree and Cheeger constant.
    GraphInfo(GraphArgs),
    /// Evaluate every bound at one parameter point.
    Bounds(BoundsArgs),
    /// Write the curve data of one figure.
    Figure(FigureArgs),
    /// Estimate the MLE success rate and compare it with the bounds.
    Simulate(SimulateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FamilyKind {
    Complete,
    Chain,
    Star,
    #[value(alias = "expander")]
    RegularExpander,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Graph family.
    #[arg(long, value_enum, conflicts_with = "edges")]
    pub family: Option<FamilyKind>,
    /// Number of nodes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree of a regular expander.
    #[arg(long)]
    pub d: Option<usize>,
    /// Seed of a regular expander.
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    /// Edge-list file instead of a family.
    #[arg(long, value_name = "PATH")]
    pub edges: Option<PathBuf>,
    /// Use this Cheeger constant instead of computing it.
    #[arg(long)]
    pub cheeger: Option<f64>,
    /// Enumerate cuts beyond the default size limit.
    #[arg(long)]
    pub allow_large: bool,
    /// Fall back to a cut-based upper bound when enumeration is refused.
    #[arg(long)]
    pub cheeger_upper_bound: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub enumeration_limit: usize,
}

impl GraphArgs {
    fn family(&self) -> Result<Option<GraphFamily>, CliError> {
        let Some(kind) = self.family else {
            return Ok(None);
        };
        let n = self
            .n
            .ok_or_else(|| CliError::Usage("--family needs --n".into()))?;
        Ok(Some(match kind {
            FamilyKind::Complete => GraphFamily::Complete { n },
            FamilyKind::Chain => GraphFamily::Chain { n },
            FamilyKind::Star => GraphFamily::Star { n },
            FamilyKind::RegularExpander => GraphFamily::RegularExpander {
                n,
                d: self
                    .d
                    .ok_or_else(|| CliError::Usage("regular-expander needs --d".into()))?,
                seed: self.graph_seed,
            },
        }))
    }

    fn spec(&self) -> Result<GraphSpec, CliError> {
        match (self.family()?, &self.edges) {
            (Some(f), None) => Ok(GraphSpec::Family(f)),
            (None, Some(path)) => Ok(GraphSpec::EdgeListFile(path.clone())),
            _ => Err(CliError::Usage("give either --family or --edges".into())),
        }
    }

    fn load(&self) -> Result<Graph, CliError> {
        match self.spec()? {
            GraphSpec::Family(f) => Ok(build_family(&f)?),
            GraphSpec::EdgeListFile(path) => {
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                Ok(parse_edge_list(&text)?)
            }
        }
    }

    fn policy(&self) -> CheegerPolicy {
        CheegerPolicy {
            enumeration_limit: self.enumeration_limit,
            allow_large: self.allow_large,
            upper_bound_fallback: self.cheeger_upper_bound,
            user_value: self.cheeger,
        }
    }
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Edge flip probability.
    #[arg(long)]
    pub p: f64,
    /// Node flip probability; enables the node-observation bounds.
    #[arg(long)]
    pub q: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// fig1, fig2, fig3, fig4, fig5, appendix-a1, appendix-a2, appendix-b1,
    /// appendix-b2 or fig7.
    pub id: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_step: Option<f64>,
    /// Comma-separated node flip probabilities.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Graph to plot, repeatable: `complete:N`, `chain:N`, `star:N` or
    /// `expander:N:D[:SEED]`. Replaces the figure's default graphs.
    #[arg(long = "graph", value_name = "SPEC")]
    pub graphs: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeArg {
    EdgeOnly,
    EdgeAndNode,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: Option<f64>,
    /// Defaults to edge-and-node when --q is given, edge-only otherwise.
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "MRF_RECOVERY_WORKERS")]
    pub workers: Option<usize>,
    /// Write the summary JSON here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::GraphInfo(args) => graph_info(&args),
        Command::Bounds(args) => bounds(&args),
        Command::Figure(args) => figure(&args),
        Command::Simulate(args) => simulate(&args),
    }
}

fn graph_info(args: &GraphArgs) -> Result<u8, CliError> {
    let g = args.load()?;
    let m = g.metrics(&args.policy())?;
    println!(
        "n={} edges={} delta_max={} cheeger={} ({})",
        g.n(),
        g.num_edges(),
        m.delta_max,
        fmt_g(m.cheeger, 6),
        m.cheeger_method.label()
    );
    println!("connected=true tree={}", g.is_tree());
    Ok(0)
}

fn params(p: f64, q: Option<f64>) -> Result<ModelParams, CliError> {
    match q {
        None => ModelParams::edge_only(p),
        Some(q) => ModelParams::edge_and_node(p, q),
    }
    .map_err(|e| CliError::Usage(e.to_string()))
}

fn bounds(args: &BoundsArgs) -> Result<u8, CliError> {
    let g = args.graph.load()?;
    let m = g.metrics(&args.graph.policy())?;
    let shape = GraphShape::from_graph(&g, &m).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = bound_report(&BoundInputs::new(shape, params(args.p, args.q)?))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", render_report(&report, m.cheeger_method.label()));
    }
    Ok(0)
}

fn kebab(v: serde_json::Result<serde_json::Value>) -> String {
    v.ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn render_report(r: &BoundReport, method: &str) -> String {
    let opt = |v: Option<f64>| v.map_or("none".to_string(), fmt_g12);
    let mut s = String::new();
    let mut line = |k: &str, v: String| writeln!(s, "{k}={v}").unwrap();
    line("regime", kebab(serde_json::to_value(r.regime)));
    line("n", r.n.to_string());
    line("edges", r.num_edges.to_string());
    line("delta_max", r.delta_max.to_string());
    line("cheeger", format!("{} ({method})", fmt_g12(r.cheeger)));
    line("p", fmt_g12(r.p));
    line("q", opt(r.q));
    line("alpha", opt(r.alpha));
    line("f", fmt_g12(r.f));
    line("g", fmt_g12(r.g));
    line("g_star", fmt_g12(r.g_star));
    line("minimax_lower", fmt_g12(r.minimax_lower));
    let branch = if r.minimax_lower == r.f {
        "f"
    } else if r.minimax_lower == r.g {
        "g"
    } else {
        "g_star"
    };
    line("minimax_branch", branch.to_string());
    line("kappa", opt(r.kappa));
    line("kappa_status", kebab(serde_json::to_value(r.kappa_status)));
    line("mle_success_lower_raw", fmt_g12(r.mle_success_lower_raw));
    line("mle_success_lower", fmt_g12(r.mle_success_lower));
    line("epsilon1", fmt_g12(r.epsilon1));
    line("epsilon2", opt(r.epsilon2));
    line("tractable_success_lower", fmt_g12(r.tractable_success_lower));
    line("necessary_condition_violated", r.necessary_condition_violated.to_string());
    line("sufficient_condition_holds", r.sufficient_condition_holds.to_string());
    s
}

fn parse_graph_spec(text: &str) -> Result<GraphFamily, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "bad graph {text:?}; use complete:N, chain:N, star:N or expander:N:D[:SEED]"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let num = |i: usize| -> Result<u64, CliError> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad)
    };
    let family = match (parts[0], parts.len()) {
        ("complete", 2) => GraphFamily::Complete { n: num(1)? as usize },
        ("chain", 2) => GraphFamily::Chain { n: num(1)? as usize },
        ("star", 2) => GraphFamily::Star { n: num(1)? as usize },
        ("expander" | "regular-expander", 3 | 4) => GraphFamily::RegularExpander {
            n: num(1)? as usize,
            d: num(2)? as usize,
            seed: if parts.len() == 4 { num(3)? } else { 0 },
        },
        _ => return Err(bad()),
    };
    family.validate()?;
    Ok(family)
}

fn figure_error(e: FigureError) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn figure(args: &FigureArgs) -> Result<u8, CliError> {
    let id: FigureId = args.id.parse().map_err(figure_error)?;
    let mut spec = FigureSpec::new(id);
    if let Some(v) = args.p_min {
        spec.p_min = v;
    }
    if let Some(v) = args.p_max {
        spec.p_max = v;
    }
    if let Some(v) = args.p_step {
        spec.p_step = v;
    }
    if let Some(q) = &args.q {
        spec.q_values = q.clone();
    }
    if !args.graphs.is_empty() {
        spec.graphs = args
            .graphs
            .iter()
            .map(|s| parse_graph_spec(s))
            .collect::<Result<_, _>>()?;
    }
    let panels = generate(&spec).map_err(figure_error)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;
    for panel in &panels {
        let (ext, body) = match args.format {
            OutputFormat::Csv => ("csv", panel.to_csv()),
            OutputFormat::Json => ("json", panel.to_json()),
        };
        let path = args.out.join(format!("{}.{ext}", panel.name));
        write_file(&path, &body)?;
        println!("{}", path.display());
    }
    if args.format == OutputFormat::Csv {
        // Graph and Cheeger provenance for each CSV.
        let manifest: Vec<serde_json::Value> = panels
            .iter()
            .map(|p| {
                serde_json::json!({
                    "panel": p.name,
                    "graph": p.graph,
                    "cheeger": p.cheeger,
                    "cheeger_method": p.cheeger_method,
                    "rows": p.rows.len(),
                })
            })
            .collect();
        let path = args.out.join(format!("{id}_manifest.json"));
        let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        body.push('\n');
        write_file(&path, &body)?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    let regime = args.regime.unwrap_or(if args.q.is_some() {
        RegimeArg::EdgeAndNode
    } else {
        RegimeArg::EdgeOnly
    });
    let q = match (regime, args.q) {
        (RegimeArg::EdgeOnly, Some(_)) => {
            return Err(CliError::Usage("--q is not used with --regime edge-only".into()))
        }
        (RegimeArg::EdgeAndNode, None) => {
            return Err(CliError::Usage("--regime edge-and-node needs --q".into()))
        }
        (_, q) => q,
    };
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let cfg = TrialConfig {
        graph: args.graph.spec()?,
        params: params(args.p, q)?,
        trials: args.trials,
        master_seed: args.seed,
        workers: args.workers,
    };
    let summary = run_trials(&cfg).map_err(|e| match e {
        McError::Io { .. } => CliError::Io(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    match &args.out {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    if summary.consistent() {
        println!("CONSISTENT");
        Ok(0)
    } else {
        println!("VIOLATION");
        Ok(EXIT_VIOLATION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_specs() {
        assert_eq!(parse_graph_spec("complete:5").unwrap(), GraphFamily::Complete { n: 5 });
        assert_eq!(
            parse_graph_spec("expander:16:4").unwrap(),
            GraphFamily::RegularExpander { n: 16, d: 4, seed: 0 }
        );
        assert_eq!(
            parse_graph_spec("expander:16:4:9").unwrap(),
            GraphFamily::RegularExpander { n: 16, d: 4, seed: 9 }
        );
        for bad in ["complete", "wheel:5", "chain:x", "expander:5:3", "star:1"] {
            assert!(parse_graph_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
