//! The generative process: uniform labels, independently flipped edge and
//! node observations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("{name} = {value} is outside {allowed}")]
    Domain {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("labels must be +1 or -1, found {0}")]
    InvalidLabel(i64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("observation edge ({0}, {1}) is not an edge of the graph")]
    UnknownEdge(usize, usize),
    #[error("observation is missing edge ({0}, {1})")]
    MissingEdge(usize, usize),
    #[error("malformed observation JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Only edge observations; labels recoverable up to a global flip.
    EdgeOnly,
    /// Edge and node observations; labels must match exactly.
    EdgeAndNode,
}

/// Noise levels, plus the likelihood weight of the node term when node
/// observations are present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    p: f64,
    q: Option<f64>,
    alpha: Option<f64>,
}

impl ModelParams {
    /// Edge-only model; `p` may be anywhere in `[0, 1/2]`.
    pub fn edge_only(p: f64) -> Result<Self, ModelError> {
        check_closed("p", p)?;
        Ok(ModelParams {
            p,
            q: None,
            alpha: None,
        })
    }

    /// Edge-and-node model. Both probabilities must lie strictly inside
    /// `(0, 1/2)`, where `alpha = log((1-q)/q) / log((1-p)/p)` is finite and
    /// positive; use a tiny `q` such as `1e-9` for near-noiseless nodes.
    pub fn edge_and_node(p: f64, q: f64) -> Result<Self, ModelError> {
        check_open("p", p)?;
        check_open("q", q)?;
        let alpha = log_odds(q) / log_odds(p);
        Ok(ModelParams {
            p,
            q: Some(q),
            alpha: Some(alpha),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        if self.q.is_some() {
            Regime::EdgeAndNode
        } else {
            Regime::EdgeOnly
        }
    }
}

/// `log((1 - x) / x)`, accurate for small `x`.
fn log_odds(x: f64) -> f64 {
    (-x).ln_1p() - x.ln()
}

pub(crate) fn check_closed(name: &'static str, value: f64) -> Result<(), ModelError> {
    if (0.0..=0.5).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            value,
            allowed: "[0, 1/2]",
        })
    }
}

fn check_open(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value < 0.5 {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name,
            value,
            allowed: "(0, 1/2)",
        })
    }
}

/// A vector over {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LabelVector(Vec<i8>);

impl LabelVector {
    pub fn new(values: Vec<i8>) -> Result<Self, ModelError> {
        if let Some(&bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(ModelError::InvalidLabel(bad as i64));
        }
        Ok(LabelVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        LabelVector(self.0.iter().map(|&v| -v).collect())
    }

    /// Representative of `{y, -y}` with the first entry `+1`.
    pub fn canonical(&self) -> Self {
        match self.0.first() {
            Some(-1) => self.negated(),
            _ => self.clone(),
        }
    }
}

impl TryFrom<Vec<i64>> for LabelVector {
    type Error = ModelError;

    fn try_from(values: Vec<i64>) -> Result<Self, Self::Error> {
        if let Some(&bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(ModelError::InvalidLabel(bad));
        }
        Ok(LabelVector(values.into_iter().map(|v| v as i8).collect()))
    }
}

impl From<LabelVector> for Vec<i64> {
    fn from(y: LabelVector) -> Self {
        y.0.into_iter().map(i64::from).collect()
    }
}

/// Edge signs aligned with [`Graph::edges`], plus node signs when present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub edges: Vec<i8>,
    pub nodes: Option<Vec<i8>>,
}

#[derive(Serialize, Deserialize)]
struct ObservationJson {
    edges: Vec<(usize, usize, i8)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    nodes: Option<Vec<i8>>,
}

impl Observation {
    /// `{"edges": [[i, j, s], ...], "nodes": [...]}`; `nodes` is omitted for
    /// edge-only observations.
    pub fn to_json(&self, g: &Graph) -> String {
        let doc = ObservationJson {
            edges: g
                .edges()
                .iter()
                .zip(&self.edges)
                .map(|(&(i, j), &s)| (i, j, s))
                .collect(),
            nodes: self.nodes.clone(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    pub fn from_json(g: &Graph, text: &str) -> Result<Self, ModelError> {
        let doc: ObservationJson =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let mut edges = vec![0i8; g.num_edges()];
        for (i, j, s) in doc.edges {
            if s != 1 && s != -1 {
                return Err(ModelError::InvalidLabel(s as i64));
            }
            let idx = g.edge_index(i, j).ok_or(ModelError::UnknownEdge(i, j))?;
            edges[idx] = s;
        }
        if let Some(pos) = edges.iter().position(|&s| s == 0) {
            let (i, j) = g.edges()[pos];
            return Err(ModelError::MissingEdge(i, j));
        }
        if let Some(nodes) = &doc.nodes {
            if nodes.len() != g.n() {
                return Err(ModelError::LengthMismatch {
                    expected: g.n(),
                    found: nodes.len(),
                });
            }
            if let Some(&bad) = nodes.iter().find(|&&v| v != 1 && v != -1) {
                return Err(ModelError::InvalidLabel(bad as i64));
            }
        }
        Ok(Observation {
            edges,
            nodes: doc.nodes,
        })
    }
}

/// Identifies one independent random stream: ChaCha8 keyed by
/// `master_seed`, stream number `stream_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngSpec {
            master_seed,
            stream_id,
        }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Each label independently uniform on {-1, +1}.
pub fn sample_labels<R: Rng>(n: usize, rng: &mut R) -> LabelVector {
    LabelVector((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
}

/// Per edge `(i, j)`, `y_i y_j` kept with probability `1 - p`, negated otherwise.
pub fn sample_edge_obs<R: Rng>(g: &Graph, y: &LabelVector, p: f64, rng: &mut R) -> Vec<i8> {
    debug_assert_eq!(y.len(), g.n());
    let y = y.as_slice();
    g.edges()
        .iter()
        .map(|&(i, j)| {
            let truth = y[i] * y[j];
            if rng.random_bool(p) {
                -truth
            } else {
                truth
            }
        })
        .collect()
}

/// Per node, `y_k` kept with probability `1 - q`, negated otherwise.
pub fn sample_node_obs<R: Rng>(y: &LabelVector, q: f64, rng: &mut R) -> Vec<i8> {
    y.as_slice()
        .iter()
        .map(|&v| if rng.random_bool(q) { -v } else { v })
        .collect()
}

/// Draws the observation for `y`: edges first, then nodes in the
/// edge-and-node regime.
pub fn sample_observation<R: Rng>(
    g: &Graph,
    y: &LabelVector,
    params: &ModelParams,
    rng: &mut R,
) -> Observation {
    let edges = sample_edge_obs(g, y, params.p(), rng);
    let nodes = params.q().map(|q| sample_node_obs(y, q, rng));
    Observation { edges, nodes }
}
