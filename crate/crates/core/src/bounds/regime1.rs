//! Edge-only bounds.

use std::f64::consts::LN_2;

use super::numeric::{entropy_gap, ln_binom, ln_odds_ratio, log_sum_exp, neg_entropy_term, xlogy};
use super::{check_positive_prob, check_prob, BoundError, GraphShape, KappaStatus, MAX_EXPECTATION_TERMS};

/// The three minimax components plus the refinement bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxParts {
    pub f: f64,
    pub g: f64,
    pub g_star: f64,
    pub kappa: Option<f64>,
    pub kappa_status: KappaStatus,
}

impl MinimaxParts {
    pub fn max(&self) -> f64 {
        self.f.max(self.g).max(self.g_star)
    }
}

/// Assouad term: half the total variation summed over a node's worst-case
/// neighborhood of `delta_max` edges.
pub fn f1(p: f64, delta_max: usize) -> f64 {
    // Both laws coincide at p = 1/2, so the sum is exactly 1; summing rounded
    // log binomials would land a few ulps off.
    if p == 0.5 {
        return 0.5;
    }
    let (lp, lq) = (p, 1.0 - p);
    let d = delta_max as u64;
    let terms = (0..=d).map(|m| {
        let mf = m as f64;
        let rest = (d - m) as f64;
        let a = xlogy(mf, lq) + xlogy(rest, lp);
        let b = xlogy(mf, lp) + xlogy(rest, lq);
        ln_binom(d, m) + a.min(b)
    });
    0.5 * log_sum_exp(terms).exp()
}

/// Fano term; negative when the edges carry enough information.
pub fn g1(p: f64, n: usize, num_edges: usize) -> f64 {
    let n_f = n as f64;
    (n_f - 1.0) / n_f - num_edges as f64 / n_f * entropy_gap(p)
}

/// `ln C(n, k)` for `k = 0..=n` plus `ln(p / (1 - p))`, reused across `m`.
pub(crate) struct TauTable {
    n: usize,
    cheeger: f64,
    ln_r: f64,
    ln_binoms: Vec<f64>,
}

impl TauTable {
    pub(crate) fn new(n: usize, cheeger: f64, p: f64) -> Self {
        TauTable {
            n,
            cheeger,
            ln_r: ln_odds_ratio(p),
            ln_binoms: (0..=n as u64).map(|k| ln_binom(n as u64, k)).collect(),
        }
    }

    pub(crate) fn ln_tau(&self, m: u64) -> f64 {
        let m_f = m as f64;
        let lead = LN_2 + if m == 0 { 0.0 } else { m_f * self.ln_r };
        let rest = (1..self.n).map(|k| {
            let cut = self.cheeger * k.min(self.n - k) as f64;
            let e = (cut - m_f).max(0.0);
            let scaled = if e == 0.0 { 0.0 } else { e * self.ln_r };
            self.ln_binoms[k] + scaled
        });
        log_sum_exp(std::iter::once(lead).chain(rest))
    }
}

/// `ln tau(m)`; requires `0 < p <= 1/2`.
pub fn ln_tau(m: u64, n: usize, cheeger: f64, p: f64) -> Result<f64, BoundError> {
    check_positive_prob("p", p)?;
    if !(cheeger > 0.0 && cheeger.is_finite()) || n < 2 {
        return Err(BoundError::InvalidInputs(format!(
            "tau needs n >= 2 and a positive cheeger constant, got n = {n}, cheeger = {cheeger}"
        )));
    }
    Ok(TauTable::new(n, cheeger, p).ln_tau(m))
}

/// Averages over `B ~ Bin(|E| - n + 1, 1/2)` of `t = tau(B) / 2^n`:
/// `ln E[t]` and `E[-t ln t]`.
pub(crate) struct CycleAverages {
    pub ln_mean: f64,
    pub entropy: f64,
}

pub(crate) fn cycle_averages(shape: &GraphShape, p: f64) -> Result<CycleAverages, BoundError> {
    let big_n = shape.cycle_rank();
    let terms = big_n + 1;
    if terms > MAX_EXPECTATION_TERMS {
        return Err(BoundError::TooManyTerms {
            terms,
            limit: MAX_EXPECTATION_TERMS,
        });
    }
    let table = TauTable::new(shape.n, shape.cheeger, p);
    let n_ln2 = shape.n as f64 * LN_2;
    let big_n_ln2 = big_n as f64 * LN_2;
    let mut mean_terms = Vec::with_capacity(terms as usize);
    let mut entropy_terms = Vec::with_capacity(terms as usize);
    for m in 0..=big_n {
        let ln_w = ln_binom(big_n, m) - big_n_ln2;
        let l = (table.ln_tau(m) - n_ln2).min(0.0);
        mean_terms.push(ln_w + l);
        let h = neg_entropy_term(l);
        if h > 0.0 {
            entropy_terms.push(ln_w + h.ln());
        }
    }
    Ok(CycleAverages {
        ln_mean: log_sum_exp(mean_terms),
        entropy: log_sum_exp(entropy_terms).exp(),
    })
}

/// Mutual-information estimate behind the refined Fano term.
pub fn kappa1(shape: &GraphShape, p: f64) -> Result<f64, BoundError> {
    check_positive_prob("p", p)?;
    let avg = cycle_averages(shape, p)?;
    let e = shape.num_edges as f64;
    let ln_prefactor = e * (LN_2 + (-p).ln_1p());
    let first = -e * (-p).ln_1p() * (ln_prefactor + avg.ln_mean).exp();
    let second = if avg.entropy > 0.0 {
        (ln_prefactor + avg.entropy.ln()).exp()
    } else {
        0.0
    };
    Ok(first + second)
}

fn indicator1(shape: &GraphShape, p: f64) -> bool {
    shape.num_edges as f64 * (-p).ln_1p() <= -1.0
}

/// Refined Fano term. The refinement is only evaluated when its indicator
/// holds; an oversized expectation is reported as an error.
pub fn g1_star(shape: &GraphShape, p: f64) -> Result<f64, BoundError> {
    check_prob("p", p)?;
    let parts = minimax_lower_regime1(shape, p)?;
    match parts.kappa_status {
        KappaStatus::SkippedTooLarge => Err(BoundError::TooManyTerms {
            terms: shape.cycle_rank() + 1,
            limit: MAX_EXPECTATION_TERMS,
        }),
        _ => Ok(parts.g_star),
    }
}

pub(crate) fn refine(
    g: f64,
    n: usize,
    capacity: f64,
    gate: bool,
    kappa: impl FnOnce() -> Result<f64, BoundError>,
) -> Result<(f64, Option<f64>, KappaStatus), BoundError> {
    if !gate {
        return Ok((g, None, KappaStatus::NotNeeded));
    }
    match kappa() {
        Ok(k) => {
            let gain = (capacity - k).max(0.0) / (n as f64 * LN_2);
            Ok((g + gain, Some(k), KappaStatus::Computed))
        }
        Err(BoundError::TooManyTerms { .. }) => Ok((g, None, KappaStatus::SkippedTooLarge)),
        Err(e) => Err(e),
    }
}

pub fn minimax_lower_regime1(shape: &GraphShape, p: f64) -> Result<MinimaxParts, BoundError> {
    check_prob("p", p)?;
    let f = f1(p, shape.delta_max);
    let g = g1(p, shape.n, shape.num_edges);
    let capacity = shape.num_edges as f64 * LN_2;
    let (g_star, kappa, kappa_status) =
        refine(g, shape.n, capacity, indicator1(shape, p), || kappa1(shape, p))?;
    Ok(MinimaxParts {
        f,
        g,
        g_star,
        kappa,
        kappa_status,
    })
}

/// True when `|E| (1 - H(p)/ln 2) <= n/2 - 1`, i.e. every estimator fails
/// with probability at least one half.
pub fn necessary_condition_violated_regime1(shape: &GraphShape, p: f64) -> Result<bool, BoundError> {
    check_prob("p", p)?;
    Ok(shape.num_edges as f64 * entropy_gap(p) <= shape.n as f64 / 2.0 - 1.0)
}

/// Exponent of [`h1`].
pub(crate) fn ln_h1(p: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let a = 1.0 - 2.0 * p;
    -(a * a * z) / (4.0 / 3.0 * (1.0 - p) * (1.0 + 4.0 * p))
}

/// Bernstein tail term for a cut of weight `z`.
pub fn h1(p: f64, z: f64) -> f64 {
    ln_h1(p, z).exp()
}

/// `1 - x` where `x = exp(ln_x)` is capped at `f64::MAX` so the result stays
/// finite even when the union bound is astronomically vacuous.
pub(crate) fn one_minus_exp(ln_x: f64) -> f64 {
    1.0 - ln_x.exp().min(f64::MAX)
}

pub(crate) fn ln_union_h1_cuts(shape: &GraphShape, p: f64) -> f64 {
    let n = shape.n as u64;
    log_sum_exp((1..=n / 2).map(|k| ln_binom(n, k) + ln_h1(p, shape.cheeger * k as f64)))
}

/// Log of the union bound on the MLE's failure probability. Stays accurate
/// when the failure bound is far below machine epsilon, where
/// `1 - mle_success_lower_regime1` would round to zero.
pub fn ln_mle_failure_regime1(shape: &GraphShape, p: f64) -> Result<f64, BoundError> {
    check_prob("p", p)?;
    Ok(ln_union_h1_cuts(shape, p))
}

/// Raw (possibly negative) lower bound on exact recovery by the MLE.
pub fn mle_success_lower_regime1(shape: &GraphShape, p: f64) -> Result<f64, BoundError> {
    check_prob("p", p)?;
    Ok(one_minus_exp(ln_union_h1_cuts(shape, p)))
}

/// Error bound of the polynomial-time method; `1 - epsilon1` is its success
/// guarantee.
pub fn epsilon1(shape: &GraphShape, p: f64) -> Result<f64, BoundError> {
    check_prob("p", p)?;
    let phi = shape.cheeger;
    let d = shape.delta_max as f64;
    let a = 1.0 - 2.0 * p;
    let num = -3.0 * a * a * phi.powi(4);
    let den = 1536.0 * d.powi(3) * p * (1.0 - p) + 32.0 * a * (1.0 - p) * phi * phi * d;
    let exponent = if num == 0.0 { 0.0 } else { num / den };
    Ok(2.0 * shape.n as f64 * exponent.exp())
}

/// `phi (1-2p)^2 / ((1-p)(1+4p)) >= (8/3) ln n`.
pub fn sufficient_condition_regime1(shape: &GraphShape, p: f64) -> Result<bool, BoundError> {
    check_prob("p", p)?;
    let a = 1.0 - 2.0 * p;
    let lhs = shape.cheeger * a * a / ((1.0 - p) * (1.0 + 4.0 * p));
    Ok(lhs >= 8.0 / 3.0 * (shape.n as f64).ln())
}
