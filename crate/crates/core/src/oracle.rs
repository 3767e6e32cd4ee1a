//! Brute-force reference values by adaptive quadrature.
//!
//! `I_x(a,b)` is integrated in the form
//!
//! ```text
//! I_x(a,b) = 1/B(a,b) ∫_ξ^∞ e^{−at} (1 − e^{−t})^{b−1} dt,
//! ```
//!
//! shifted to `t = ξ + τ` so that the `e^{−aξ}` factor is applied
//! analytically. The integrand is smooth on `(0, ∞)` for every `a, b > 0`.
//!
//! The moments `c_n(a,b) = ∫_0^∞ (τ+ξ)^{b−1} τ^n e^{−aτ} dτ` and their
//! integration-by-parts identity are checked here as well.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::fsequence::shifted_moment;
use crate::hyp::evaluate_hyp;
use crate::numerics::{exp_sum, ln_gamma, log_gamma_ratio, make_params, EvalParams};
use crate::quadrature::{integrate_to_infinity, DecayingIntegrand, QuadConfig, ScaledIntegral};
use crate::uniform::evaluate_fixed;

const INEQUALITY_SLACK_ULPS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl OracleConfig {
    fn quad(&self) -> Result<QuadConfig> {
        if !(self.rel_tol > 0.0) {
            return Err(domain("rel_tol", self.rel_tol, "must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(domain("max_subdivisions", 0.0, "must be at least 1"));
        }
        Ok(QuadConfig {
            rel_tol: self.rel_tol,
            abs_tol: 0.0,
            max_subdivisions: self.max_subdivisions,
        })
    }
}

/// `∫_0^∞ e^{−aτ} (1 − e^{−(τ+ξ)})^{b−1} dτ`, scaled.
fn shifted_beta_integral(a: f64, b: f64, xi: f64, cfg: &QuadConfig) -> Result<ScaledIntegral> {
    let bm1 = b - 1.0;
    let log_integrand = move |t: f64| {
        let s = t + xi;
        if bm1 == 0.0 {
            -a * t
        } else {
            -a * t + bm1 * (-(-s).exp_m1()).ln()
        }
    };
    let (peak, width) = if bm1 > 0.0 {
        // φ′ = 0 at e^{t} − 1 = (b−1)/a.
        let t_star = (bm1 / a).ln_1p();
        let curvature = a * (a + bm1) / bm1;
        ((t_star - xi).max(0.0), (1.0 / curvature.sqrt()).max(1.0 / a))
    } else {
        (0.0, 1.0 / a)
    };
    let mut extra_breaks = Vec::new();
    if bm1 < 0.0 {
        // (1 − e^{−s})^{b−1} ≈ s^{b−1} varies on the scale ξ near the origin.
        let mut p = xi.max(1e-12);
        while p < 1.0 {
            extra_breaks.push(p);
            p *= 10.0;
        }
    }
    let spec = DecayingIntegrand {
        log_integrand,
        peak,
        width,
        extra_breaks,
        decay_rate: move |t: f64| a - bm1.max(0.0) / (t + xi).exp_m1(),
    };
    integrate_to_infinity(&spec, cfg)
}

/// `I_x(a,b)` by quadrature.
pub fn ibeta_quadrature(params: &EvalParams, cfg: &OracleConfig) -> Result<f64> {
    let qcfg = cfg.quad()?;
    if params.x() == 1.0 {
        return Ok(1.0);
    }
    let (a, b) = (params.a(), params.b());
    let integral = shifted_beta_integral(a, b, params.xi(), &qcfg)?;
    let (hi, lo) = params.a_xi();
    let value = exp_sum(&[
        log_gamma_ratio(a, b)?,
        -ln_gamma(b),
        -hi,
        -lo,
        integral.log_scale,
        integral.value.ln(),
    ]);
    Ok(value.clamp(0.0, 1.0))
}

/// `c_n(a,b) = ∫_0^∞ (τ+ξ)^{b−1} τ^n e^{−aτ} dτ` for `ξ > 0`; `b` may be any
/// real number.
pub fn cn_quadrature(a: f64, b: f64, xi: f64, n: usize, cfg: &OracleConfig) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("a", a, "must be positive and finite"));
    }
    if !b.is_finite() {
        return Err(domain("b", b, "must be finite"));
    }
    Ok(shifted_moment(a, b, xi, n, &cfg.quad()?)?.unscaled())
}

/// `|a c_{n+1}(a,b) − (n+b) c_n(a,b) − ξ(1−b) c_n(a,b−1)| / |a c_{n+1}(a,b)|`.
pub fn check_cn_recurrence(a: f64, b: f64, xi: f64, n: usize, cfg: &OracleConfig) -> Result<f64> {
    let next = cn_quadrature(a, b, xi, n + 1, cfg)?;
    let here = cn_quadrature(a, b, xi, n, cfg)?;
    let lowered = cn_quadrature(a, b - 1.0, xi, n, cfg)?;
    let lhs = a * next;
    let rhs = (n as f64 + b) * here + xi * (1.0 - b) * lowered;
    Ok(((lhs - rhs) / lhs).abs())
}

/// `0 ≤ ξ c_n(a,b−1) ≤ c_n(a,b)`, with a few units of rounding slack.
pub fn check_cn_inequality(a: f64, b: f64, xi: f64, n: usize, cfg: &OracleConfig) -> Result<bool> {
    let upper = cn_quadrature(a, b, xi, n, cfg)?;
    let lower = xi * cn_quadrature(a, b - 1.0, xi, n, cfg)?;
    Ok(lower >= 0.0 && lower <= upper * (1.0 + INEQUALITY_SLACK_ULPS * f64::EPSILON))
}

fn rel_error(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub n_terms: usize,
    pub oracle_value: f64,
    pub uniform_value: f64,
    pub uniform_error_estimate: f64,
    pub uniform_rel_error: f64,
    /// Absent at `x = 1`.
    pub hyp_value: Option<f64>,
    pub hyp_rel_error: Option<f64>,
    /// `R_N = (I − Γ(a+b)/Γ(a) Σ_{n<N} d_n F_n) · Γ(a)/Γ(a+b)`.
    pub observed_remainder: f64,
}

/// Runs the oracle, the uniform expansion and (for `x < 1`) the classical
/// expansion at the same truncation order.
pub fn compare_methods(params: &EvalParams, n_terms: usize, cfg: &OracleConfig) -> Result<ComparisonReport> {
    let oracle_value = ibeta_quadrature(params, cfg)?;
    let uniform = evaluate_fixed(params, n_terms)?;
    let hyp_value = if params.x() < 1.0 {
        Some(evaluate_hyp(params, n_terms)?.value)
    } else {
        None
    };
    let partial: f64 = uniform.terms.iter().sum();
    let ln_ratio = log_gamma_ratio(params.a(), params.b())?;
    Ok(ComparisonReport {
        a: params.a(),
        b: params.b(),
        x: params.x(),
        n_terms,
        oracle_value,
        uniform_value: uniform.value,
        uniform_error_estimate: uniform.error_estimate,
        uniform_rel_error: rel_error(uniform.value, oracle_value),
        hyp_value,
        hyp_rel_error: hyp_value.map(|h| rel_error(h, oracle_value)),
        observed_remainder: (oracle_value - partial) * (-ln_ratio).exp(),
    })
}

/// `I_x(a,b) + I_{1−x}(b,a) − 1`, both by quadrature.
pub fn symmetry_residual(a: f64, b: f64, x: f64, cfg: &OracleConfig) -> Result<f64> {
    let direct = ibeta_quadrature(&make_params(a, b, x)?, cfg)?;
    let mirrored = ibeta_quadrature(&make_params(b, a, 1.0 - x)?, cfg)?;
    Ok(direct + mirrored - 1.0)
}
