//! Truncated power series arithmetic on coefficient slices, in multiple
//! precision.
//!
//! A series `Σ c_k u^k` is stored as `[c_0, c_1, …]`; every operation keeps
//! the input length. The coefficients of interest can be many orders of
//! magnitude below the leading ones, so the recurrences below would lose
//! them to rounding in `f64`.

use astro_float::{BigFloat, Consts, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

fn int(k: usize, p: usize) -> BigFloat {
    BigFloat::from_f64(k as f64, p)
}

pub(crate) fn big_to_f64(v: &BigFloat) -> f64 {
    format!("{v}").parse().unwrap_or(f64::NAN)
}

/// `log s` for a series with `s[0] > 0`, from `(log s)′ = s′ / s`.
pub fn log(s: &[BigFloat], p: usize, cc: &mut Consts) -> Vec<BigFloat> {
    assert!(
        !s.is_empty() && s[0].is_positive() && !s[0].is_zero(),
        "series log needs a positive constant term"
    );
    let mut out: Vec<BigFloat> = Vec::with_capacity(s.len());
    out.push(s[0].ln(p, RM, cc));
    for k in 1..s.len() {
        let mut acc = s[k].mul(&int(k, p), p, RM);
        for j in 1..k {
            acc = acc.sub(&out[j].mul(&s[k - j], p, RM).mul(&int(j, p), p, RM), p, RM);
        }
        out.push(acc.div(&s[0].mul(&int(k, p), p, RM), p, RM));
    }
    out
}

/// `exp s`, from `E′ = s′ E`.
pub fn exp(s: &[BigFloat], p: usize, cc: &mut Consts) -> Vec<BigFloat> {
    if s.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<BigFloat> = Vec::with_capacity(s.len());
    out.push(s[0].exp(p, RM, cc));
    for k in 1..s.len() {
        let mut acc = BigFloat::from_f64(0.0, p);
        for j in 1..=k {
            acc = acc.add(&s[j].mul(&out[k - j], p, RM).mul(&int(j, p), p, RM), p, RM);
        }
        out.push(acc.div(&int(k, p), p, RM));
    }
    out
}

/// `s^e` through `exp(e · log s)`.
pub fn pow(s: &[BigFloat], e: &BigFloat, p: usize, cc: &mut Consts) -> Vec<BigFloat> {
    let scaled: Vec<BigFloat> = log(s, p, cc).iter().map(|c| c.mul(e, p, RM)).collect();
    exp(&scaled, p, cc)
}

/// Cauchy product, truncated to the length of `lhs`.
pub fn mul(lhs: &[BigFloat], rhs: &[BigFloat], p: usize) -> Vec<BigFloat> {
    (0..lhs.len())
        .map(|k| {
            (0..=k)
                .filter(|&j| k - j < rhs.len())
                .fold(BigFloat::from_f64(0.0, p), |acc, j| {
                    acc.add(&lhs[j].mul(&rhs[k - j], p, RM), p, RM)
                })
        })
        .collect()
}
