//! Bounds when node observations are available as well.

use std::f64::consts::LN_2;

use super::numeric::{entropy_gap, ln_binom, log_sum_exp, xlogy};
use super::regime1::{
    cycle_averages, g1, ln_h1, ln_union_h1_cuts, one_minus_exp, refine, MinimaxParts,
};
use super::{check_positive_prob, check_prob, BoundError, GraphShape};
use crate::model::ModelParams;

/// Assouad term with the extra node observation of the flipped node.
pub fn f2(p: f64, q: f64, delta_max: usize) -> f64 {
    let d = delta_max as u64;
    let (lq, lnq) = (q.ln(), (1.0 - q).ln());
    let terms = (0..=d).flat_map(|m| {
        let mf = m as f64;
        let rest = (d - m) as f64;
        let c = ln_binom(d, m);
        // p^m (1-p)^(d-m) and (1-p)^m p^(d-m).
        let a = xlogy(mf, p) + xlogy(rest, 1.0 - p);
        let b = xlogy(mf, 1.0 - p) + xlogy(rest, p);
        [c + (a + lq).min(b + lnq), c + (a + lnq).min(b + lq)]
    });
    0.5 * log_sum_exp(terms).exp()
}

pub fn g2(p: f64, q: f64, n: usize, num_edges: usize) -> f64 {
    g1(p, n, num_edges) - entropy_gap(q)
}

/// Mutual-information estimate with node observations; requires
/// `0 < p, q <= 1/2`.
pub fn kappa2(shape: &GraphShape, p: f64, q: f64) -> Result<f64, BoundError> {
    check_positive_prob("p", p)?;
    check_positive_prob("q", q)?;
    let avg = cycle_averages(shape, p)?;
    let e = shape.num_edges as f64;
    let n = shape.n as f64;
    let ln_edge = e * (LN_2 + (-p).ln_1p());
    let ln_node = n * (LN_2 + (-q).ln_1p());
    let first_weight = -e * (-p).ln_1p() - n * (-q).ln_1p();
    let first = first_weight * (ln_node + ln_edge + avg.ln_mean - LN_2).exp();
    let second = (-e * (-p).ln_1p() + n * LN_2) * (ln_edge - LN_2 - n * LN_2).exp();
    let third = if avg.entropy > 0.0 {
        (ln_node + ln_edge + avg.entropy.ln() - LN_2).exp()
    } else {
        0.0
    };
    Ok(first + second + third)
}

fn indicator2(shape: &GraphShape, p: f64, q: f64) -> bool {
    shape.num_edges as f64 * (-p).ln_1p() + shape.n as f64 * (-q).ln_1p() <= -1.0
}

pub fn g2_star(shape: &GraphShape, p: f64, q: f64) -> Result<f64, BoundError> {
    let parts = minimax_lower_regime2(shape, p, q)?;
    match parts.kappa_status {
        super::KappaStatus::SkippedTooLarge => Err(BoundError::TooManyTerms {
            terms: shape.cycle_rank() + 1,
            limit: super::MAX_EXPECTATION_TERMS,
        }),
        _ => Ok(parts.g_star),
    }
}

pub fn minimax_lower_regime2(shape: &GraphShape, p: f64, q: f64) -> Result<MinimaxParts, BoundError> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    let f = f2(p, q, shape.delta_max);
    let g = g2(p, q, shape.n, shape.num_edges);
    let capacity = (shape.num_edges + shape.n) as f64 * LN_2;
    let (g_star, kappa, kappa_status) = refine(g, shape.n, capacity, indicator2(shape, p, q), || {
        kappa2(shape, p, q)
    })?;
    Ok(MinimaxParts {
        f,
        g,
        g_star,
        kappa,
        kappa_status,
    })
}

/// True when `|E|(1 - H(p)/ln 2) + n(1 - H(q)/ln 2) <= n/2 - 1`.
pub fn necessary_condition_violated_regime2(
    shape: &GraphShape,
    p: f64,
    q: f64,
) -> Result<bool, BoundError> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    let lhs = shape.num_edges as f64 * entropy_gap(p) + shape.n as f64 * entropy_gap(q);
    Ok(lhs <= shape.n as f64 / 2.0 - 1.0)
}

fn edge_node(params: &ModelParams) -> Result<(f64, f64, f64), BoundError> {
    match (params.q(), params.alpha()) {
        (Some(q), Some(alpha)) => Ok((params.p(), q, alpha)),
        _ => Err(BoundError::InvalidInputs(
            "node-observation bound needs edge-and-node parameters".into(),
        )),
    }
}

/// Weight attached to the larger of the two per-observation ranges.
fn spread(p: f64, q: f64, alpha: f64) -> f64 {
    (1.0 - p).max((1.0 - q) * alpha)
}

pub(crate) fn ln_h2(p: f64, q: f64, alpha: f64, z: f64, w: f64) -> f64 {
    if z == 0.0 && w == 0.0 {
        return 0.0;
    }
    let num = (1.0 - 2.0 * p) * z + alpha * (1.0 - 2.0 * q) * w;
    let den = 8.0 * p * (1.0 - p) * z
        + 8.0 * q * (1.0 - q) * alpha * alpha * w
        + 4.0 / 3.0 * spread(p, q, alpha) * num;
    -(num * num) / den
}

/// Joint Bernstein tail for `z` disagreeing edge weight and `w` disagreeing
/// nodes; `h2(0, 0) = 1`.
pub fn h2(params: &ModelParams, z: f64, w: f64) -> Result<f64, BoundError> {
    let (p, q, alpha) = edge_node(params)?;
    Ok(ln_h2(p, q, alpha, z, w).exp())
}

/// Raw lower bound on exact recovery by the MLE: the smaller of the two union
/// bounds is subtracted from one.
pub fn mle_success_lower_regime2(shape: &GraphShape, params: &ModelParams) -> Result<f64, BoundError> {
    let (p, q, alpha) = edge_node(params)?;
    let n = shape.n as u64;
    let phi = shape.cheeger;
    let nodes = log_sum_exp((1..=n).map(|k| ln_binom(n, k) + ln_h1(q, k as f64)));
    let separate = log_sum_exp([ln_union_h1_cuts(shape, p), nodes]);
    let small = (1..=n / 2).map(|k| {
        let kf = k as f64;
        ln_binom(n, k) + ln_h2(p, q, alpha, phi * kf, kf)
    });
    let large = (0..=n / 2).map(|k| {
        let kf = k as f64;
        ln_binom(n, k) + ln_h2(p, q, alpha, phi * kf, (n - k) as f64)
    });
    let joint = log_sum_exp(small.chain(large));
    Ok(one_minus_exp(separate.min(joint)))
}

/// Node-side error term of the polynomial-time method.
pub fn epsilon2(n: usize, q: f64) -> Result<f64, BoundError> {
    check_prob("q", q)?;
    let a = 1.0 - 2.0 * q;
    Ok((-(n as f64) / 2.0 * a * a).exp())
}

/// Both inequalities of the node-observation sufficient condition.
pub fn sufficient_condition_regime2(shape: &GraphShape, params: &ModelParams) -> Result<bool, BoundError> {
    let (p, q, alpha) = edge_node(params)?;
    let phi = shape.cheeger;
    let ln_n = (shape.n as f64).ln();
    let m = spread(p, q, alpha);
    let a = 1.0 - 2.0 * p;
    let b = 1.0 - 2.0 * q;
    let joint = a * phi + alpha * b;
    let first = joint * joint
        / (6.0 * p * (1.0 - p) * phi + 6.0 * q * (1.0 - q) * alpha * alpha + m * joint);
    let second = alpha * b * b * shape.n as f64 / (6.0 * q * (1.0 - q) * alpha + m * b);
    Ok(first >= 8.0 / 3.0 * ln_n && second >= 4.0 / 3.0 * ln_n)
}
