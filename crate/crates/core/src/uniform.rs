//! `I_x(a,b) ≈ Γ(a+b)/Γ(a) · Σ_{n<N} d_n F_n`, uniformly in `x ∈ (0, 1]`.
//!
//! The prefactor `Γ(a+b)/Γ(a)`, the `e^{−aξ}` carried by every `F_n`, and
//! `F_0` itself are combined in one compensated exponent, so the product
//! is formed once even when each factor alone over- or underflows.

use serde::Serialize;

use crate::coefficients::coefficients;
use crate::error::{domain, Result};
use crate::fsequence::{f_recurrence, ln_scaled_f0};
use crate::numerics::{exp_sum, log_gamma_ratio, EvalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResultFlag {
    /// The partial sum fell outside `[0, 1]` and was clamped.
    Clamped,
    /// At least one `F_n` came from quadrature rather than the recurrence.
    FallbackEntries,
    /// Adaptive summation stopped because the terms started growing.
    AdaptiveStop,
    /// Adaptive summation reached its term cap.
    CapHit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionResult {
    pub value: f64,
    pub n_used: usize,
    /// `Γ(a+b)/Γ(a) · d_n F_n` for `n < n_used`.
    pub terms: Vec<f64>,
    pub error_estimate: f64,
    pub flags: Vec<ResultFlag>,
}

impl ExpansionResult {
    pub fn has_flag(&self, flag: ResultFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Every term `Γ(a+b)/Γ(a) · d_n F_n` for `n ≤ n_max`, plus the scale
/// `Γ(a+b)/Γ(a) · F_0` used by the bound-chain part of the error estimate.
struct Terms {
    all: Vec<f64>,
    lead: f64,
    beta: f64,
    fallback: bool,
}

fn all_terms(params: &EvalParams, n_max: usize) -> Result<Terms> {
    let table = coefficients(params.b(), params.abscissa(), n_max)?;
    let seq = f_recurrence(params, n_max)?;
    let ln_ratio = log_gamma_ratio(params.a(), params.b())?;
    let lead = match params.x_pow_a() {
        Some(p) => exp_sum(&[ln_ratio, ln_scaled_f0(params)]) * p,
        None => {
            let (hi, lo) = params.a_xi();
            exp_sum(&[ln_ratio, -hi, -lo, ln_scaled_f0(params)])
        }
    };
    let all = table
        .d()
        .iter()
        .enumerate()
        .map(|(n, d)| lead * d * seq.relative(n))
        .collect();
    Ok(Terms {
        all,
        lead,
        beta: seq.beta(),
        fallback: seq.has_fallback(),
    })
}

/// `∏_{k<n} (k+β)/a`.
fn bound_chain(n: usize, beta: f64, a: f64) -> f64 {
    (0..n).map(|k| (k as f64 + beta) / a).product()
}

fn finish(params: &EvalParams, t: &Terms, n: usize, mut flags: Vec<ResultFlag>) -> ExpansionResult {
    let terms = t.all[..n].to_vec();
    let sum: f64 = terms.iter().sum();
    let error_estimate = t.all[n].abs() + t.lead * bound_chain(n, t.beta, params.a());
    if t.fallback {
        flags.push(ResultFlag::FallbackEntries);
    }
    let value = if (0.0..=1.0).contains(&sum) {
        sum
    } else {
        flags.push(ResultFlag::Clamped);
        sum.clamp(0.0, 1.0)
    };
    ExpansionResult {
        value,
        n_used: n,
        terms,
        error_estimate,
        flags,
    }
}

/// The expansion truncated after `n_terms` terms.
pub fn evaluate_fixed(params: &EvalParams, n_terms: usize) -> Result<ExpansionResult> {
    if n_terms < 1 {
        return Err(domain("N", n_terms as f64, "need at least one term"));
    }
    let t = all_terms(params, n_terms)?;
    Ok(finish(params, &t, n_terms, Vec::new()))
}

/// Adds terms until the next one is below `rel_tol` of the partial sum,
/// the terms start growing, or `n_cap` terms are in.
pub fn evaluate_adaptive(params: &EvalParams, rel_tol: f64, n_cap: usize) -> Result<ExpansionResult> {
    if !(rel_tol > 0.0) {
        return Err(domain("rel_tol", rel_tol, "must be positive"));
    }
    if n_cap < 2 {
        return Err(domain("n_cap", n_cap as f64, "must be at least 2"));
    }
    let t = all_terms(params, n_cap)?;
    let mut partial = t.all[0];
    for n in 1..n_cap {
        let next = t.all[n].abs();
        if next <= rel_tol * partial.abs() {
            return Ok(finish(params, &t, n, Vec::new()));
        }
        if next > t.all[n - 1].abs() {
            return Ok(finish(params, &t, n, vec![ResultFlag::AdaptiveStop]));
        }
        partial += t.all[n];
    }
    Ok(finish(params, &t, n_cap, vec![ResultFlag::CapHit]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_params;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn b_one_collapses_to_power() {
        for a in [10.0, 100.0, 1000.0] {
            for x in [0.1, 0.5, 0.9, 0.99, 1.0] {
                let p = make_params(a, 1.0, x).unwrap();
                let r = evaluate_fixed(&p, 1).unwrap();
                let want = f64::powf(x, a);
                assert!(rel(r.value, want) <= 1e-14, "a={a} x={x}: {} vs {want}", r.value);
            }
        }
    }

    #[test]
    fn adaptive_b_one_stops_immediately() {
        let p = make_params(300.0, 1.0, 0.97).unwrap();
        let r = evaluate_adaptive(&p, 1e-12, 20).unwrap();
        assert_eq!(r.n_used, 1);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn value_near_one_at_unit_x() {
        let p = make_params(500.0, 3.0, 1.0).unwrap();
        let r = evaluate_fixed(&p, 4).unwrap();
        assert!((r.value - 1.0).abs() <= 10.0 * 6f64.powi(4) / 500f64.powi(4));
    }

    #[test]
    fn terms_sum_to_value() {
        let p = make_params(100.0, 2.5, 0.9).unwrap();
        let r = evaluate_fixed(&p, 5).unwrap();
        assert_eq!(r.terms.len(), 5);
        let s: f64 = r.terms.iter().sum();
        assert!((s - r.value).abs() <= 2.0 * f64::EPSILON * r.value);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn modest_a_cannot_reach_tiny_tolerance() {
        let p = make_params(20.0, 6.0, 0.5).unwrap();
        let r = evaluate_adaptive(&p, 1e-15, 10).unwrap();
        assert!(r.has_flag(ResultFlag::CapHit) || r.has_flag(ResultFlag::AdaptiveStop));
    }

    #[test]
    fn zero_terms_rejected() {
        let p = make_params(100.0, 2.5, 0.9).unwrap();
        assert!(evaluate_fixed(&p, 0).is_err());
    }
}
