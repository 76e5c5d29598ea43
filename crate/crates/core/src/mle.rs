//! Exhaustive maximum-likelihood decoding.
//!
//! Candidates are visited in Gray-code order so consecutive vectors differ in
//! one label and the objective is updated in O(deg) per step. The search
//! space is split into fixed prefix chunks; each chunk reports its best
//! score, the lexicographically smallest optimum and the number of optima,
//! and the chunk results are combined with an associative reduction, so the
//! answer is identical for any number of workers.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::Graph;
use crate::model::{LabelVector, Regime};

/// Largest `n` searched without an explicit override.
pub const DEFAULT_MLE_LIMIT: usize = 26;

const MAX_MLE_NODES: usize = 62;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MleError {
    #[error("graph has {n} nodes; exhaustive search is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("alpha = {0} must be positive and finite")]
    InvalidAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MleOptions {
    pub limit: usize,
    /// Split the search across the current rayon pool.
    pub parallel: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            limit: DEFAULT_MLE_LIMIT,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MleResult {
    /// Maximizer; its first entry is `+1` in the edge-only regime.
    pub argmax: LabelVector,
    /// `Σ_{(i,j)∈E} x_ij y_i y_j` at the maximizer.
    pub edge_score: i64,
    /// `Σ_k c_k y_k` at the maximizer, when node observations are used.
    pub node_score: Option<i64>,
    /// Full objective, `edge_score + alpha * node_score`.
    pub score: f64,
    /// Number of distinct maximizers (flip classes in the edge-only regime).
    pub ties: u64,
    /// Number of candidates scored.
    pub enumerated: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecoveryOutcome {
    pub regime: Regime,
    pub exact: bool,
}

pub fn score_edge(g: &Graph, x: &[i8], y: &LabelVector) -> i64 {
    let y = y.as_slice();
    g.edges()
        .iter()
        .zip(x)
        .map(|(&(i, j), &s)| i64::from(s * y[i] * y[j]))
        .sum()
}

pub fn score_combined(g: &Graph, x: &[i8], c: &[i8], alpha: f64, y: &LabelVector) -> f64 {
    score_edge(g, x, y) as f64 + alpha * node_agreement(c, y) as f64
}

fn node_agreement(c: &[i8], y: &LabelVector) -> i64 {
    c.iter().zip(y.as_slice()).map(|(&a, &b)| i64::from(a * b)).sum()
}

/// Objective value split into its exact integer parts.
#[derive(Debug, Clone, Copy)]
struct Score {
    edge: i64,
    node: i64,
}

impl Score {
    fn cmp(&self, other: &Score, alpha: f64) -> Ordering {
        if self.node == other.node {
            self.edge.cmp(&other.edge)
        } else {
            let a = self.edge as f64 + alpha * self.node as f64;
            let b = other.edge as f64 + alpha * other.node as f64;
            a.partial_cmp(&b).expect("scores are finite")
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    score: Score,
    /// Lexicographic rank of the smallest optimum; `-1 < +1`.
    key: u64,
    mask: u64,
    ties: u64,
}

impl Best {
    fn merge(a: Option<Best>, b: Option<Best>, alpha: f64) -> Option<Best> {
        match (a, b) {
            (Some(x), Some(y)) => Some(match x.score.cmp(&y.score, alpha) {
                Ordering::Greater => x,
                Ordering::Less => y,
                Ordering::Equal => {
                    let keep = if x.key <= y.key { x } else { y };
                    Best {
                        ties: x.ties + y.ties,
                        ..keep
                    }
                }
            }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

struct Problem<'a> {
    n: usize,
    /// `(neighbor, x)` lists.
    adjacency: Vec<Vec<(usize, i8)>>,
    nodes: Option<&'a [i8]>,
    alpha: f64,
    /// Search order: the i-th Gray-code bit toggles node `order[i]`.
    order: Vec<usize>,
}

impl Problem<'_> {
    /// Lexicographic rank of the labeling encoded by `mask` (bit set means -1).
    fn key(&self, mask: u64) -> u64 {
        let plus = !mask & ((1u64 << self.n) - 1);
        plus.reverse_bits() >> (64 - self.n)
    }

    fn score_mask(&self, y: &[i8]) -> Score {
        let mut edge = 0i64;
        for (i, list) in self.adjacency.iter().enumerate() {
            for &(j, x) in list {
                if i < j {
                    edge += i64::from(x * y[i] * y[j]);
                }
            }
        }
        let node = self
            .nodes
            .map(|c| c.iter().zip(y).map(|(&a, &b)| i64::from(a * b)).sum())
            .unwrap_or(0);
        Score { edge, node }
    }

    fn scan(&self, low_bits: usize, prefix_mask: u64) -> Best {
        let mut y: Vec<i8> = (0..self.n)
            .map(|v| if (prefix_mask >> v) & 1 == 1 { -1 } else { 1 })
            .collect();
        let mut mask = prefix_mask;
        let mut score = self.score_mask(&y);
        let mut best = Best {
            score,
            key: self.key(mask),
            mask,
            ties: 1,
        };
        for step in 1..(1u64 << low_bits) {
            let v = self.order[step.trailing_zeros() as usize];
            let field: i64 = self.adjacency[v]
                .iter()
                .map(|&(j, x)| i64::from(x * y[j]))
                .sum();
            let yv = i64::from(y[v]);
            score.edge -= 2 * yv * field;
            if let Some(c) = self.nodes {
                score.node -= 2 * yv * i64::from(c[v]);
            }
            y[v] = -y[v];
            mask ^= 1 << v;
            match score.cmp(&best.score, self.alpha) {
                Ordering::Greater => {
                    best = Best {
                        score,
                        key: self.key(mask),
                        mask,
                        ties: 1,
                    }
                }
                Ordering::Equal => {
                    best.ties += 1;
                    let key = self.key(mask);
                    if key < best.key {
                        best.key = key;
                        best.mask = mask;
                    }
                }
                Ordering::Less => {}
            }
        }
        best
    }
}

fn solve(
    g: &Graph,
    x: &[i8],
    nodes: Option<&[i8]>,
    alpha: f64,
    opts: &MleOptions,
) -> Result<MleResult, MleError> {
    let n = g.n();
    let limit = opts.limit.min(MAX_MLE_NODES);
    if n > limit {
        return Err(MleError::TooLarge { n, limit });
    }
    if x.len() != g.num_edges() {
        return Err(MleError::LengthMismatch {
            what: "edge observation",
            expected: g.num_edges(),
            found: x.len(),
        });
    }
    if let Some(c) = nodes {
        if c.len() != n {
            return Err(MleError::LengthMismatch {
                what: "node observation",
                expected: n,
                found: c.len(),
            });
        }
    }
    let mut adjacency = vec![Vec::new(); n];
    for (&(i, j), &s) in g.edges().iter().zip(x) {
        adjacency[i].push((j, s));
        adjacency[j].push((i, s));
    }
    // Without node observations node 0 stays at +1 (one member per flip
    // class). Low-degree nodes take the fast-toggling bits.
    let first = if nodes.is_none() { 1 } else { 0 };
    let mut order: Vec<usize> = (first..n).collect();
    order.sort_by_key(|&v| g.degree(v));
    let problem = Problem {
        n,
        adjacency,
        nodes,
        alpha,
        order,
    };

    let free = n - first;
    let high_bits = if opts.parallel { free.saturating_sub(8).min(6) } else { 0 };
    let low_bits = free - high_bits;
    let prefix_mask = |prefix: u64| {
        (0..high_bits)
            .filter(|b| (prefix >> b) & 1 == 1)
            .fold(0u64, |m, b| m | 1 << problem.order[low_bits + b])
    };
    let chunks = 1u64 << high_bits;
    let best = if opts.parallel {
        (0..chunks)
            .into_par_iter()
            .map(|prefix| Some(problem.scan(low_bits, prefix_mask(prefix))))
            .reduce(|| None, |a, b| Best::merge(a, b, alpha))
    } else {
        (0..chunks)
            .map(|prefix| Some(problem.scan(low_bits, prefix_mask(prefix))))
            .fold(None, |a, b| Best::merge(a, b, alpha))
    }
    .expect("at least one candidate");

    let labels: Vec<i8> = (0..n)
        .map(|v| if (best.mask >> v) & 1 == 1 { -1 } else { 1 })
        .collect();
    Ok(MleResult {
        argmax: LabelVector::new(labels).expect("labels are +-1"),
        edge_score: best.score.edge,
        node_score: nodes.map(|_| best.score.node),
        score: best.score.edge as f64 + alpha * best.score.node as f64,
        ties: best.ties,
        enumerated: 1u64 << free,
    })
}

/// Maximizes `y^T X y` over flip classes, with the default options.
pub fn mle_edge_only(g: &Graph, x: &[i8]) -> Result<MleResult, MleError> {
    mle_edge_only_with(g, x, &MleOptions::default())
}

pub fn mle_edge_only_with(g: &Graph, x: &[i8], opts: &MleOptions) -> Result<MleResult, MleError> {
    solve(g, x, None, 0.0, opts)
}

/// Maximizes `y^T X y + alpha c^T y` over all labelings, with the default
/// options.
pub fn mle_edge_node(g: &Graph, x: &[i8], c: &[i8], alpha: f64) -> Result<MleResult, MleError> {
    mle_edge_node_with(g, x, c, alpha, &MleOptions::default())
}

pub fn mle_edge_node_with(
    g: &Graph,
    x: &[i8],
    c: &[i8],
    alpha: f64,
    opts: &MleOptions,
) -> Result<MleResult, MleError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(MleError::InvalidAlpha(alpha));
    }
    solve(g, x, Some(c), alpha, opts)
}

/// Exact recovery: up to a global flip without node observations, exact
/// equality otherwise.
pub fn check_recovery(result: &MleResult, truth: &LabelVector, regime: Regime) -> RecoveryOutcome {
    let exact = match regime {
        Regime::EdgeOnly => result.argmax.canonical() == truth.canonical(),
        Regime::EdgeAndNode => result.argmax == *truth,
    };
    RecoveryOutcome { regime, exact }
}
