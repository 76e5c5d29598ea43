//! Log-space helpers shared by the bound formulas.

use std::f64::consts::LN_2;

use statrs::function::factorial::ln_binomial;

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        ln_binomial(n, k)
    }
}

/// `ln Σ exp(x_i)`; `-inf` for an empty sequence or all `-inf` inputs.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `x * ln(y)` with `0 * ln(0) = 0`.
pub fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `-t ln t` for `t = exp(l)`, with the limit 0 as `l -> -inf`.
pub fn neg_entropy_term(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        0.0
    } else {
        -l * l.exp()
    }
}

/// Natural-log binary entropy, `0 ln 0 = 0`.
pub fn entropy(p: f64) -> f64 {
    -xlogy(p, p) - xlogy(1.0 - p, 1.0 - p)
}

/// `1 - H(p) / ln 2`, the per-observation capacity deficit in bits.
pub fn entropy_gap(p: f64) -> f64 {
    1.0 - entropy(p) / LN_2
}

/// `ln(p / (1 - p))`; exactly 0 at `p = 1/2`.
pub fn ln_odds_ratio(p: f64) -> f64 {
    if p == 0.5 {
        0.0
    } else {
        p.ln() - (-p).ln_1p()
    }
}
