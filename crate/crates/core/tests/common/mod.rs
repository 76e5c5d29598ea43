//! Independent reference implementations used by the integration tests.
//! Everything here is written as directly as possible, without the log-space
//! or incremental tricks of the library.

#![allow(dead_code)]

use mrf_recovery::graph::{Graph, GraphFamily};
use mrf_recovery::model::LabelVector;
use rand::Rng;

/// Bayes error between the observation laws of `y` and `y'` when `y'`
/// differs from `y` at one node of degree `delta`: `(1/2) Σ_X min{P(X|y), P(X|y')}`
/// with `X` ranging over all `2^delta` outcomes on the incident edges.
pub fn tv_f1(p: f64, delta: usize) -> f64 {
    let mut total = 0.0;
    for mask in 0u32..(1 << delta) {
        // Bit set: the observation on that edge agrees with `y`.
        let mut under_y = 1.0;
        let mut under_flip = 1.0;
        for e in 0..delta {
            if mask >> e & 1 == 1 {
                under_y *= 1.0 - p;
                under_flip *= p;
            } else {
                under_y *= p;
                under_flip *= 1.0 - p;
            }
        }
        total += under_y.min(under_flip);
    }
    total / 2.0
}

/// Same as [`tv_f1`] with the flipped node's own observation appended.
pub fn tv_f2(p: f64, q: f64, delta: usize) -> f64 {
    let mut total = 0.0;
    for mask in 0u32..(1 << (delta + 1)) {
        let mut under_y = 1.0;
        let mut under_flip = 1.0;
        for e in 0..delta {
            if mask >> e & 1 == 1 {
                under_y *= 1.0 - p;
                under_flip *= p;
            } else {
                under_y *= p;
                under_flip *= 1.0 - p;
            }
        }
        if mask >> delta & 1 == 1 {
            under_y *= 1.0 - q;
            under_flip *= q;
        } else {
            under_y *= q;
            under_flip *= 1.0 - q;
        }
        total += under_y.min(under_flip);
    }
    total / 2.0
}

/// Result of the brute-force MLE.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveMle {
    pub argmax: Vec<i8>,
    pub edge_score: i64,
    pub node_score: i64,
    pub score: f64,
    pub ties: u64,
}

fn labels(n: usize, bits: u64) -> Vec<i8> {
    (0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()
}

/// Scores every labeling from scratch. Edge-only (`node = None`) fixes
/// `y_0 = +1`. Among optima the lexicographically smallest vector (with
/// `-1 < +1`) is returned.
pub fn naive_mle(g: &Graph, x: &[i8], node: Option<(&[i8], f64)>) -> NaiveMle {
    let n = g.n();
    let mut best: Option<NaiveMle> = None;
    for bits in 0u64..(1 << n) {
        let y = labels(n, bits);
        if node.is_none() && y[0] != 1 {
            continue;
        }
        let edge: i64 = g
            .edges()
            .iter()
            .zip(x)
            .map(|(&(i, j), &s)| i64::from(s * y[i] * y[j]))
            .sum();
        let (node_score, score) = match node {
            Some((c, alpha)) => {
                let v: i64 = c.iter().zip(&y).map(|(&a, &b)| i64::from(a * b)).sum();
                (v, edge as f64 + alpha * v as f64)
            }
            None => (0, edge as f64),
        };
        let cand = NaiveMle {
            argmax: y,
            edge_score: edge,
            node_score,
            score,
            ties: 1,
        };
        best = Some(match best {
            None => cand,
            Some(mut b) => {
                if cand.score > b.score {
                    cand
                } else if cand.score == b.score {
                    b.ties += 1;
                    if cand.argmax < b.argmax {
                        b.argmax = cand.argmax;
                        b.edge_score = cand.edge_score;
                        b.node_score = cand.node_score;
                    }
                    b
                } else {
                    b
                }
            }
        });
    }
    best.expect("at least one labeling")
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(n: usize, extra_prob: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && rng.random_bool(extra_prob) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("spanning tree keeps the graph connected")
}

pub fn random_labels<R: Rng>(n: usize, rng: &mut R) -> LabelVector {
    LabelVector::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
        .expect("entries are ±1")
}

/// Exact Cheeger constant by scanning every subset of size at most n/2,
/// keeping the ratio as a reduced fraction compared by cross-multiplication.
pub fn brute_cheeger(g: &Graph) -> f64 {
    let n = g.n();
    let mut best: Option<(usize, usize)> = None;
    for mask in 1u64..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > n / 2 {
            continue;
        }
        let boundary = g
            .edges()
            .iter()
            .filter(|&&(i, j)| (mask >> i & 1) != (mask >> j & 1))
            .count();
        best = match best {
            Some((b, s)) if b * size <= boundary * s => Some((b, s)),
            _ => Some((boundary, size)),
        };
    }
    let (b, s) = best.expect("n >= 2");
    b as f64 / s as f64
}

/// Table of closed-form graph quantities: `(n, |E|, delta_max, cheeger)`.
pub fn closed_form_shape(family: &GraphFamily) -> (usize, usize, usize, f64) {
    match *family {
        GraphFamily::Complete { n } => (n, n * (n - 1) / 2, n - 1, n as f64 / 2.0),
        GraphFamily::Chain { n } => (n, n - 1, if n > 2 { 2 } else { 1 }, 2.0 / n as f64),
        GraphFamily::Star { n } => (n, n - 1, n - 1, 1.0),
        GraphFamily::RegularExpander { .. } => panic!("no closed form"),
    }
}
