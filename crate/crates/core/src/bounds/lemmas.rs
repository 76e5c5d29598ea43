//! Auxiliary functions used to justify monotonicity steps.

use super::numeric::{ln_binom, log_sum_exp, xlogy};
use super::BoundError;
use crate::model::ModelParams;

/// `l(n) = Σ_m C(n,m) min{p^m (1-p)^(n-m) q, (1-p)^m p^(n-m) (1-q)}`;
/// non-increasing in `n`.
pub fn lemma3_l(n_terms: u64, p: f64, q: f64) -> f64 {
    let n = n_terms;
    let (lq, lnq) = (q.ln(), (1.0 - q).ln());
    log_sum_exp((0..=n).map(|m| {
        let mf = m as f64;
        let rest = (n - m) as f64;
        let a = xlogy(mf, p) + xlogy(rest, 1.0 - p) + lq;
        let b = xlogy(mf, 1.0 - p) + xlogy(rest, p) + lnq;
        ln_binom(n, m) + a.min(b)
    }))
    .exp()
}

/// Ratio comparing the node and edge sides of the joint tail exponent;
/// requires `0 < p, q < 1/2`.
pub fn r_function(p: f64, q: f64) -> Result<f64, BoundError> {
    let params = ModelParams::edge_and_node(p, q)?;
    let alpha = params.alpha().expect("edge-and-node parameters carry alpha");
    let m = (1.0 - p).max((1.0 - q) * alpha);
    let num = 6.0 * q * (1.0 - q) * alpha / (1.0 - 2.0 * q) + m;
    let den = 6.0 * p * (1.0 - p) / (1.0 - 2.0 * p) + m;
    Ok(num / den)
}
