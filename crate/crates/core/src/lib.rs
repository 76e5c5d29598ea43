//! Exact label recovery in Markov random fields on graphs: graph metrics,
//! the noisy observation model, closed-form recovery bounds, exhaustive MLE
//! and Monte Carlo validation of the bounds.

pub mod bounds;
pub mod figures;
pub mod format;
pub mod graph;
pub mod mle;
pub mod model;
pub mod montecarlo;

pub use bounds::{bound_report, BoundError, BoundInputs, BoundReport, GraphShape};
pub use graph::{build_family, parse_edge_list, Graph, GraphError, GraphFamily};
pub use mle::{mle_edge_node, mle_edge_only, MleError, MleResult};
pub use model::{LabelVector, ModelError, ModelParams, Observation, Regime, RngSpec};
pub use montecarlo::{run_trials, sweep, McError, McSummary, TrialConfig};
