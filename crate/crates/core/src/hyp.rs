//! The classical expansion
//!
//! ```text
//! I_x(a,b) ≈ x^a (1−x)^{b−1} / (a B(a,b)) · Σ_n (1−b)_n / (a+1)_n · (x/(x−1))^n,
//! ```
//!
//! kept for comparison: it is accurate for `x` bounded away from 1 and breaks
//! down as `x → 1`. No convergence guard is applied; the caller picks `N`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{exp_sum, ln_gamma, log_gamma_ratio, EvalParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypResult {
    pub value: f64,
    pub n_used: usize,
    /// Smallest `|term|` included, in the units of `value`.
    pub smallest_term: f64,
    /// The series ended because `(1−b)_n` vanished.
    pub terminated: bool,
}

pub fn evaluate_hyp(params: &EvalParams, n_terms: usize) -> Result<HypResult> {
    let (a, b) = (params.a(), params.b());
    if params.x() == 1.0 {
        return Err(domain("x", 1.0, "the non-uniform expansion is singular at x = 1"));
    }
    if n_terms < 1 {
        return Err(domain("N", n_terms as f64, "need at least one term"));
    }
    let (hi, lo) = params.a_xi();
    let prefactor = exp_sum(&[
        -hi,
        -lo,
        (b - 1.0) * params.one_minus_x().ln(),
        -a.ln(),
        -ln_gamma(b),
        log_gamma_ratio(a, b)?,
    ]);
    let ratio = -params.x() / params.one_minus_x();

    let mut term = 1.0_f64;
    let mut sum = 1.0;
    let mut smallest = 1.0_f64;
    let mut n_used = 1;
    let mut terminated = false;
    for n in 0..n_terms - 1 {
        let nf = n as f64;
        let poch = 1.0 - b + nf;
        if poch == 0.0 {
            terminated = true;
            break;
        }
        term *= poch / (a + 1.0 + nf) * ratio;
        sum += term;
        smallest = smallest.min(term.abs());
        n_used += 1;
    }
    if !terminated && 1.0 - b + (n_used - 1) as f64 == 0.0 {
        // The next Pochhammer factor is zero: the series is already complete.
        terminated = true;
    }
    Ok(HypResult {
        value: prefactor * sum,
        n_used,
        smallest_term: prefactor * smallest,
        terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_params;

    #[test]
    fn vanishing_prefactor_near_zero() {
        let p = make_params(50.0, 2.5, 1e-300).unwrap();
        assert_eq!(evaluate_hyp(&p, 6).unwrap().value, 0.0);
    }

    #[test]
    fn b_one_is_a_power() {
        let p = make_params(50.0, 1.0, 0.3).unwrap();
        let r = evaluate_hyp(&p, 5).unwrap();
        assert!(r.terminated);
        assert_eq!(r.n_used, 1);
        let want = 0.3f64.powf(50.0);
        assert!(((r.value - want) / want).abs() < 1e-14);
    }

    #[test]
    fn integer_b_terminates() {
        // I_x(a, 2) = x^a (1 + a(1−x)).
        let p = make_params(30.0, 2.0, 0.6).unwrap();
        let r = evaluate_hyp(&p, 10).unwrap();
        assert!(r.terminated);
        assert_eq!(r.n_used, 2);
        let want = 0.6f64.powf(30.0) * (1.0 + 30.0 * 0.4);
        assert!(((r.value - want) / want).abs() < 1e-13);
    }

    #[test]
    fn rejects_unit_x() {
        let p = make_params(50.0, 2.0, 1.0).unwrap();
        assert!(evaluate_hyp(&p, 3).is_err());
    }
}
