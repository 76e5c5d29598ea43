//! Platform-independent number formatting for data files.

/// Twelve significant digits, as used in every data file.
pub fn fmt_g12(x: f64) -> String {
    fmt_g(x, 12)
}

/// `digits` significant digits in the style of C's `%g`: fixed notation for
/// decimal exponents in `[-4, digits)`, scientific otherwise, trailing zeros
/// removed. Non-finite values print as `nan`, `inf` and `-inf`.
pub fn fmt_g(x: f64, digits: usize) -> String {
    let digits = digits.max(1) as i32;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (digits - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..digits).contains(&exp) {
        let decimals = (digits - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
