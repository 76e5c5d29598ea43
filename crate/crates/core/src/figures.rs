//! Curve data for the bound plots: one table per panel, evaluated on a
//! p-grid (and a q-list for the node-observation figures).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::numeric::entropy_gap;
use crate::bounds::{
    clamp_unit, epsilon1, epsilon2, f1, f2, g1, g2, minimax_lower_regime1, minimax_lower_regime2,
    mle_success_lower_regime1, mle_success_lower_regime2, r_function, BoundError, GraphShape,
};
use crate::format::fmt_g12;
use crate::graph::{
    build_family, cheeger_closed_form, CheegerMethod, CheegerPolicy, GraphError, GraphFamily,
};
use crate::model::ModelParams;

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error("unknown figure id {0:?}")]
    UnknownId(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    AppendixA1,
    AppendixA2,
    AppendixB1,
    AppendixB2,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::AppendixA1,
        FigureId::AppendixA2,
        FigureId::AppendixB1,
        FigureId::AppendixB2,
        FigureId::Fig7,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::AppendixA1 => "appendix-a1",
            FigureId::AppendixA2 => "appendix-a2",
            FigureId::AppendixB1 => "appendix-b1",
            FigureId::AppendixB2 => "appendix-b2",
            FigureId::Fig7 => "fig7",
        }
    }

    /// Graphs plotted when none are given.
    pub fn default_graphs(&self) -> Vec<GraphFamily> {
        use GraphFamily::*;
        let expander = |n, d| RegularExpander { n, d, seed: 0 };
        match self {
            FigureId::Fig1 | FigureId::Fig4 => vec![Chain { n: 16 }, expander(16, 4)],
            FigureId::Fig2 | FigureId::Fig7 => vec![],
            FigureId::Fig3 => vec![
                expander(4, 2),
                expander(16, 4),
                expander(16, 8),
                expander(64, 10),
                expander(64, 30),
                expander(64, 60),
                Chain { n: 4 },
                Chain { n: 16 },
                Chain { n: 64 },
                Star { n: 4 },
                Star { n: 16 },
                Star { n: 64 },
            ],
            FigureId::Fig5 => vec![expander(64, 30), Star { n: 64 }],
            FigureId::AppendixA1 => vec![
                Complete { n: 4 },
                Complete { n: 16 },
                Complete { n: 64 },
                Complete { n: 2048 },
            ],
            FigureId::AppendixA2 => vec![
                expander(64, 10),
                expander(64, 30),
                expander(64, 60),
                expander(2048, 2000),
            ],
            FigureId::AppendixB1 => vec![
                Complete { n: 16 },
                Complete { n: 64 },
                expander(64, 10),
                expander(64, 60),
            ],
            FigureId::AppendixB2 => vec![
                Chain { n: 16 },
                Chain { n: 64 },
                Star { n: 16 },
                Star { n: 64 },
            ],
        }
    }

    fn uses_q(&self) -> bool {
        matches!(
            self,
            FigureId::Fig4 | FigureId::Fig5 | FigureId::AppendixB1 | FigureId::AppendixB2
        )
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| FigureError::UnknownId(s.to_string()))
    }
}

pub const DEFAULT_Q_VALUES: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.45];

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    /// Node noise levels for the node-observation figures; for `fig7` the
    /// p-grid is reused for q.
    pub q_values: Vec<f64>,
    pub graphs: Vec<GraphFamily>,
    pub cheeger: CheegerPolicy,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        let (p_min, p_max, p_step) = match id {
            FigureId::Fig7 => (0.01, 0.49, 0.01),
            _ => (0.0, 0.5, 0.005),
        };
        FigureSpec {
            id,
            p_min,
            p_max,
            p_step,
            q_values: DEFAULT_Q_VALUES.to_vec(),
            graphs: id.default_graphs(),
            cheeger: CheegerPolicy {
                upper_bound_fallback: true,
                ..CheegerPolicy::default()
            },
        }
    }

    pub fn p_grid(&self) -> Result<Vec<f64>, FigureError> {
        p_grid(self.p_min, self.p_max, self.p_step)
    }
}

/// `lo, lo + step, ..., hi`, computed as `lo + (hi - lo) * i / m` so the
/// endpoints are exact.
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, FigureError> {
    if !(0.0..=0.5).contains(&lo) || !(0.0..=0.5).contains(&hi) || lo > hi {
        return Err(FigureError::InvalidGrid(format!(
            "range [{lo}, {hi}] must lie within [0, 1/2]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(FigureError::InvalidGrid(format!("step {step} must be positive")));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    let m = ((hi - lo) / step).round().max(1.0) as usize;
    Ok((0..=m)
        .map(|i| if i == m { hi } else { lo + (hi - lo) * i as f64 / m as f64 })
        .collect())
}

/// One output table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    /// File stem, e.g. `fig3_chain-n16`.
    pub name: String,
    pub graph: Option<String>,
    pub cheeger: Option<f64>,
    pub cheeger_method: Option<CheegerMethod>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Header row plus one line per grid point, `\n`-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_g12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON object with the same cells, formatted as in the CSV.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            name: &'a str,
            graph: &'a Option<String>,
            cheeger: Option<String>,
            cheeger_method: &'a Option<CheegerMethod>,
            columns: &'a [String],
            rows: Vec<Vec<String>>,
        }
        let doc = Doc {
            name: &self.name,
            graph: &self.graph,
            cheeger: self.cheeger.map(fmt_g12),
            cheeger_method: &self.cheeger_method,
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&v| fmt_g12(v)).collect())
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        s.push('\n');
        s
    }
}

fn slug(family: &GraphFamily) -> String {
    match *family {
        GraphFamily::Complete { n } => format!("complete-n{n}"),
        GraphFamily::Chain { n } => format!("chain-n{n}"),
        GraphFamily::Star { n } => format!("star-n{n}"),
        GraphFamily::RegularExpander { n, d, seed } => format!("expander-n{n}-d{d}-s{seed}"),
    }
}

/// Bound inputs for a family, without materializing graphs whose metrics
/// are known in closed form.
fn family_shape(
    family: &GraphFamily,
    policy: &CheegerPolicy,
) -> Result<(GraphShape, CheegerMethod), FigureError> {
    family.validate()?;
    let closed = |num_edges: usize, delta_max: usize| -> Result<_, FigureError> {
        let phi = cheeger_closed_form(family);
        match (phi, policy.user_value) {
            (Some(phi), None) => Ok(Some((
                GraphShape::new(family.n(), num_edges, delta_max, phi)?,
                CheegerMethod::ClosedForm,
            ))),
            _ => Ok(None),
        }
    };
    let shortcut = match *family {
        GraphFamily::Complete { n } => closed(n * (n - 1) / 2, n - 1)?,
        GraphFamily::Star { n } => closed(n - 1, n - 1)?,
        GraphFamily::Chain { n } => closed(n - 1, if n == 2 { 1 } else { 2 })?,
        GraphFamily::RegularExpander { .. } => None,
    };
    if let Some(found) = shortcut {
        return Ok(found);
    }
    let g = build_family(family)?;
    let metrics = g.metrics(policy)?;
    Ok((GraphShape::from_graph(&g, &metrics)?, metrics.cheeger_method))
}

/// Turns an evaluation failure into a `nan` cell (the quantity is undefined
/// at that grid point, e.g. the node-observation weight at `p = 0`).
fn or_nan(v: Result<f64, BoundError>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn edge_only_row(shape: &GraphShape, p: f64, columns: &[&str]) -> Vec<f64> {
    let parts = minimax_lower_regime1(shape, p);
    columns
        .iter()
        .map(|&c| match c {
            "p" => p,
            "f1" => f1(p, shape.delta_max),
            "g1" => g1(p, shape.n, shape.num_edges),
            "g1_star" => parts.as_ref().map(|x| x.g_star).unwrap_or(f64::NAN),
            "minimax_lower" => parts.as_ref().map(|x| x.max()).unwrap_or(f64::NAN),
            "mle_lower_raw" => or_nan(mle_success_lower_regime1(shape, p)),
            "mle_lower_clamped" => or_nan(mle_success_lower_regime1(shape, p).map(clamp_unit)),
            "tractable_lower_clamped" => or_nan(epsilon1(shape, p).map(|e| clamp_unit(1.0 - e))),
            other => unreachable!("unknown column {other}"),
        })
        .collect()
}

fn edge_node_row(shape: &GraphShape, p: f64, q: f64, columns: &[&str]) -> Vec<f64> {
    let parts = minimax_lower_regime2(shape, p, q).ok();
    let mle = ModelParams::edge_and_node(p, q)
        .map_err(BoundError::from)
        .and_then(|params| mle_success_lower_regime2(shape, &params))
        .unwrap_or(f64::NAN);
    let tractable = or_nan(
        epsilon1(shape, p).and_then(|e1| Ok(clamp_unit(1.0 - e1 - epsilon2(shape.n, q)?))),
    );
    let edge_only = edge_only_row(
        shape,
        p,
        &["minimax_lower", "mle_lower_clamped", "tractable_lower_clamped"],
    );
    columns
        .iter()
        .map(|&c| match c {
            "p" => p,
            "q" => q,
            "f2" => f2(p, q, shape.delta_max),
            "g2" => g2(p, q, shape.n, shape.num_edges),
            "g2_star" => parts.map_or(f64::NAN, |x| x.g_star),
            "minimax_lower" => parts.map_or(f64::NAN, |x| x.max()),
            "mle_lower_raw" => mle,
            "mle_lower_clamped" => if mle.is_nan() { mle } else { clamp_unit(mle) },
            "tractable_lower_clamped" => tractable,
            "minimax_lower_edge_only" => edge_only[0],
            "mle_lower_clamped_edge_only" => edge_only[1],
            "tractable_lower_clamped_edge_only" => edge_only[2],
            other => unreachable!("unknown column {other}"),
        })
        .collect()
}

fn columns(id: FigureId) -> &'static [&'static str] {
    match id {
        FigureId::Fig1 => &["p", "f1", "g1"],
        FigureId::Fig2 => &["p", "entropy_gap", "bernstein_rate"],
        FigureId::Fig3 | FigureId::AppendixA1 => &[
            "p",
            "f1",
            "g1",
            "g1_star",
            "minimax_lower",
            "mle_lower_raw",
            "mle_lower_clamped",
            "tractable_lower_clamped",
        ],
        FigureId::AppendixA2 => &["p", "mle_lower_raw", "mle_lower_clamped", "tractable_lower_clamped"],
        FigureId::Fig4 => &["p", "q", "f2", "g2"],
        FigureId::AppendixB1 | FigureId::AppendixB2 => &[
            "p",
            "q",
            "f2",
            "g2",
            "g2_star",
            "minimax_lower",
            "mle_lower_raw",
            "mle_lower_clamped",
            "tractable_lower_clamped",
        ],
        FigureId::Fig5 => &[
            "p",
            "q",
            "f2",
            "g2",
            "g2_star",
            "minimax_lower",
            "mle_lower_raw",
            "mle_lower_clamped",
            "tractable_lower_clamped",
            "minimax_lower_edge_only",
            "mle_lower_clamped_edge_only",
            "tractable_lower_clamped_edge_only",
        ],
        FigureId::Fig7 => &["p", "q", "r"],
    }
}

fn owned(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Evaluates every panel of a figure.
pub fn generate(spec: &FigureSpec) -> Result<Vec<Panel>, FigureError> {
    let grid = spec.p_grid()?;
    let cols = columns(spec.id);
    let id = spec.id.as_str();
    match spec.id {
        FigureId::Fig2 => {
            let rows = grid
                .par_iter()
                .map(|&p| {
                    let a = 1.0 - 2.0 * p;
                    vec![p, entropy_gap(p), a * a / ((1.0 - p) * (1.0 + 4.0 * p))]
                })
                .collect();
            Ok(vec![Panel {
                name: format!("{id}_functions"),
                graph: None,
                cheeger: None,
                cheeger_method: None,
                columns: owned(cols),
                rows,
            }])
        }
        FigureId::Fig7 => {
            let points: Vec<(f64, f64)> =
                grid.iter().flat_map(|&p| grid.iter().map(move |&q| (p, q))).collect();
            let rows = points
                .par_iter()
                .map(|&(p, q)| vec![p, q, or_nan(r_function(p, q))])
                .collect();
            Ok(vec![Panel {
                name: format!("{id}_r"),
                graph: None,
                cheeger: None,
                cheeger_method: None,
                columns: owned(cols),
                rows,
            }])
        }
        _ => {
            if spec.id.uses_q() {
                if spec.q_values.is_empty() {
                    return Err(FigureError::InvalidGrid("q list is empty".into()));
                }
                if let Some(q) = spec.q_values.iter().find(|q| !(0.0..=0.5).contains(*q)) {
                    return Err(FigureError::InvalidGrid(format!("q = {q} outside [0, 1/2]")));
                }
            }
            spec.graphs
                .iter()
                .map(|family| {
                    let (shape, method) = family_shape(family, &spec.cheeger)?;
                    let rows = if spec.id.uses_q() {
                        let points: Vec<(f64, f64)> = spec
                            .q_values
                            .iter()
                            .flat_map(|&q| grid.iter().map(move |&p| (p, q)))
                            .collect();
                        points
                            .par_iter()
                            .map(|&(p, q)| edge_node_row(&shape, p, q, cols))
                            .collect()
                    } else {
                        grid.par_iter().map(|&p| edge_only_row(&shape, p, cols)).collect()
                    };
                    Ok(Panel {
                        name: format!("{id}_{}", slug(family)),
                        graph: Some(family.to_string()),
                        cheeger: Some(shape.cheeger),
                        cheeger_method: Some(method),
                        columns: owned(cols),
                        rows,
                    })
                })
                .collect()
        }
    }
}
