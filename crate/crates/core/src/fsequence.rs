//! The basis functions
//!
//! ```text
//! F_n = e^{−aξ}/Γ(b) ∫_0^∞ (τ+ξ)^{b−1} τ^n e^{−aτ} dτ,
//! ```
//!
//! linked by `a F_{n+1} = (n + b − aξ) F_n + nξ F_{n−1}`.
//!
//! Sequences are stored as `G_n = e^{aξ} F_n`, the common factor carried
//! as [`FSequence::log_scale`], and each `G_n` as a [`WideFloat`]: with
//! `a = 10⁶` the ratio `G_n/G_0 ≈ n!/aⁿ` leaves the `f64` range well
//! before `n = 80`.
//!
//! The recurrence is run in whichever direction keeps both of its terms
//! nonnegative: downward below the turning index `n* ≈ aξ − b`, upward
//! above it. Downward runs are started either by Miller's method
//! (normalised against `G_0`, when the spurious solution decays fast enough
//! before `n*`) or from two quadrature anchors at `n*`. Every consecutive
//! pair is then checked against `0 < F_{n+1} ≤ ((n+β)/a) F_n`,
//! `β = max(1, b)`; an entry that fails is recomputed by quadrature.

use crate::error::{domain, Result};
use crate::numerics::{
    exp_sum, ln_gamma, ln_scaled_upper_gamma, log_gamma_ratio_unchecked, reg_gamma_q, EvalParams, WideFloat,
};
use crate::quadrature::{integrate_to_infinity, DecayingIntegrand, QuadConfig};

/// Slack, in units of relative rounding, allowed on the ratio bound.
pub const BOUND_SLACK_ULPS: f64 = 4.0;
/// Relative tolerance of [`f_quadrature`].
pub const QUADRATURE_REL_TOL: f64 = 1e-12;
/// Miller's method is used when the start-value contamination at `n_max`
/// can be pushed below this.
const MILLER_DAMPING: f64 = 1e-20;
/// Largest per-step damping factor accepted inside Miller's run.
const MILLER_MAX_STEP: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryFlag {
    RecurrenceOk,
    BoundViolated,
    /// Recomputed by quadrature after failing the ratio bound.
    QuadratureFallback,
    /// Starting value taken from quadrature at the turning index.
    QuadratureSeed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FSequence {
    a: f64,
    b: f64,
    xi: f64,
    beta: f64,
    log_scale: f64,
    entries: Vec<WideFloat>,
    flags: Vec<EntryFlag>,
}

impl FSequence {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// `max(1, b)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `−aξ`: `F_n = G_n · exp(log_scale)`.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// `G_n = e^{aξ} F_n` for every index.
    pub fn entries(&self) -> &[WideFloat] {
        &self.entries
    }

    /// `G_n` as a plain float; underflows when `F_n/F_0` is tiny.
    pub fn scaled(&self, n: usize) -> f64 {
        self.entries[n].to_f64()
    }

    /// `F_n / F_0`.
    pub fn relative(&self, n: usize) -> f64 {
        self.entries[n].ratio(&self.entries[0])
    }

    pub fn flags(&self) -> &[EntryFlag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `F_n` itself; underflows to 0 when `aξ` is large.
    pub fn value(&self, n: usize) -> f64 {
        self.entries[n]
            .mul_wide(&WideFloat::from_ln(&[self.log_scale]))
            .to_f64()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.value(n)).collect()
    }

    /// Whether `0 < F_{n+1} ≤ ((n+β)/a) F_n` holds with the configured slack.
    pub fn bound_holds(&self, n: usize) -> bool {
        entries_satisfy_bound(&self.entries, n, self.beta, self.a)
    }

    /// `F_{n+1} / (((n+β)/a) F_n) − 1`: negative when the bound holds with
    /// room to spare, `+∞` when positivity fails.
    pub fn bound_excess(&self, n: usize) -> f64 {
        let (prev, next) = (&self.entries[n], &self.entries[n + 1]);
        if prev.mantissa() > 0.0 && next.mantissa() > 0.0 {
            next.ratio(prev) / ratio_bound(n, self.beta, self.a) - 1.0
        } else {
            f64::INFINITY
        }
    }

    /// Whether any entry failed the ratio bound, whether or not quadrature
    /// repaired it.
    pub fn has_fallback(&self) -> bool {
        self.flags
            .iter()
            .any(|f| matches!(f, EntryFlag::BoundViolated | EntryFlag::QuadratureFallback))
    }
}

#[inline]
fn ratio_bound(n: usize, beta: f64, a: f64) -> f64 {
    (n as f64 + beta) / a
}

/// Whether `0 < next ≤ ((n+β)/a) · prev` holds with the configured slack.
pub fn satisfies_ratio_bound(prev: f64, next: f64, n: usize, beta: f64, a: f64) -> bool {
    next > 0.0 && next <= ratio_bound(n, beta, a) * prev * (1.0 + BOUND_SLACK_ULPS * f64::EPSILON)
}

fn entries_satisfy_bound(g: &[WideFloat], n: usize, beta: f64, a: f64) -> bool {
    g[n + 1].within_ratio_of(&g[n], ratio_bound(n, beta, a), BOUND_SLACK_ULPS * f64::EPSILON)
}

/// `ln(e^{aξ} F_0)`.
pub(crate) fn ln_scaled_f0(params: &EvalParams) -> f64 {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    if xi == 0.0 {
        return -b * a.ln();
    }
    if b == 1.0 {
        return -a.ln();
    }
    b * xi.ln() - ln_gamma(b) + ln_scaled_upper_gamma(b, a * xi)
}

/// `F_0 = a^{−b} Q(b, aξ)`.
pub fn f0(params: &EvalParams) -> f64 {
    let (a, b) = (params.a(), params.b());
    (-b * a.ln()).exp() * reg_gamma_q(b, a * params.xi()).expect("validated parameters")
}

/// `ξ^b e^{−aξ} / (a Γ(b))` with the exponential removed.
fn scaled_f1_source(params: &EvalParams) -> WideFloat {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    if xi == 0.0 {
        return WideFloat::ZERO;
    }
    WideFloat::from_ln(&[b * xi.ln(), -a.ln(), -ln_gamma(b)])
}

/// `F_1 = ((b − aξ)/a) F_0 + ξ^b e^{−aξ} / (a Γ(b))`, as written.
pub fn f1(params: &EvalParams) -> f64 {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    let source = if xi == 0.0 {
        0.0
    } else {
        exp_sum(&[b * xi.ln(), -a * xi, -a.ln(), -ln_gamma(b)])
    };
    (b - a * xi) / a * f0(params) + source
}

/// `e^{aξ} F_n` by adaptive quadrature of the shifted integral; exact gamma
/// values at `ξ = 0`.
pub fn f_quadrature_wide(params: &EvalParams, n: usize) -> Result<WideFloat> {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    if xi == 0.0 {
        // Γ(b+n) / (Γ(b) a^{n+b})
        return Ok(WideFloat::from_ln(&[
            log_gamma_ratio_unchecked(b, n as f64),
            -(n as f64 + b) * a.ln(),
        ]));
    }
    let cfg = QuadConfig {
        rel_tol: QUADRATURE_REL_TOL,
        ..QuadConfig::default()
    };
    let integral = shifted_moment(a, b, xi, n, &cfg)?;
    Ok(WideFloat::from_ln(&[
        integral.value.ln(),
        integral.log_scale,
        -ln_gamma(b),
    ]))
}

/// [`f_quadrature_wide`] as a plain float.
pub fn f_quadrature_scaled(params: &EvalParams, n: usize) -> Result<f64> {
    Ok(f_quadrature_wide(params, n)?.to_f64())
}

/// `F_n` by quadrature, with the `e^{−aξ}` factor applied in log space.
pub fn f_quadrature(params: &EvalParams, n: usize) -> Result<f64> {
    let scaled = f_quadrature_wide(params, n)?;
    let (hi, lo) = params.a_xi();
    Ok(exp_sum(&[scaled.ln(), -hi, -lo]))
}

/// `∫_0^∞ (τ+ξ)^{e−1} τ^n e^{−aτ} dτ` for `ξ > 0` and any real exponent `e`.
pub(crate) fn shifted_moment(
    a: f64,
    exponent: f64,
    xi: f64,
    n: usize,
    cfg: &QuadConfig,
) -> Result<crate::quadrature::ScaledIntegral> {
    if !(xi > 0.0) {
        return Err(domain("xi", xi, "shifted moment quadrature needs xi > 0"));
    }
    let nf = n as f64;
    let em1 = exponent - 1.0;
    let log_integrand = move |t: f64| {
        let mut v = em1 * (t + xi).ln() - a * t;
        if n > 0 {
            v += nf * t.ln();
        }
        v
    };
    // Stationary point of the exponent: aτ² + (aξ − n − e + 1)τ − nξ = 0.
    let lin = a * xi - nf - em1;
    let peak = if n == 0 {
        (-lin / a).max(0.0)
    } else {
        let disc = (lin * lin + 4.0 * a * nf * xi).sqrt();
        if lin > 0.0 {
            2.0 * nf * xi / (lin + disc)
        } else {
            (disc - lin) / (2.0 * a)
        }
    };
    let curvature = if peak > 0.0 {
        let mut c = em1 / ((peak + xi) * (peak + xi));
        if n > 0 {
            c += nf / (peak * peak);
        }
        c
    } else {
        0.0
    };
    let width = if curvature > 0.0 {
        1.0 / curvature.sqrt()
    } else {
        1.0 / a
    };
    let mut extra_breaks = Vec::new();
    if em1 < 0.0 {
        // (τ+ξ)^{e−1} varies on the scale ξ near the origin.
        let mut p = xi;
        while p < peak + width {
            extra_breaks.push(p);
            p *= 10.0;
        }
    }
    let spec = DecayingIntegrand {
        log_integrand,
        peak,
        width,
        extra_breaks,
        decay_rate: move |t: f64| a - nf / t - em1.max(0.0) / (t + xi),
    };
    integrate_to_infinity(&spec, cfg)
}

/// Index at which `n + b ≥ aξ` first holds.
fn turning_index(b: f64, z: f64) -> usize {
    (z - b).max(0.0).ceil() as usize
}

/// End index for Miller's downward run, if one exists before the turning
/// index.
fn miller_start(b: f64, z: f64, n_max: usize) -> Option<usize> {
    let mut damping = 1.0;
    let mut k = n_max + 1;
    loop {
        let kf = k as f64;
        if kf + b >= z {
            return None;
        }
        let step = (kf + 1.0) / (z - kf - b);
        if step > MILLER_MAX_STEP {
            return None;
        }
        damping *= step;
        if damping < MILLER_DAMPING {
            return Some(k);
        }
        k += 1;
    }
}

/// Sequence from `G_0` and Miller's backward ratio recurrence.
fn miller(a: f64, b: f64, xi: f64, g0: WideFloat, start: usize, n_max: usize) -> Vec<WideFloat> {
    let z = a * xi;
    // ratio[k] = G_k / G_{k−1}, from r_k = kξ / (a r_{k+1} + aξ − k − b).
    let mut ratio = vec![0.0; start + 2];
    for k in (1..=start).rev() {
        let kf = k as f64;
        ratio[k] = kf * xi / (a * ratio[k + 1] + (z - kf - b));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(g0);
    for k in 1..=n_max {
        let prev = out[k - 1];
        out.push(prev.mul(ratio[k]));
    }
    out
}

/// `e^{aξ} F_0..F_{n_max}` using the recurrence in its positive-term
/// direction, plus per-entry flags for anchors taken from quadrature.
fn scaled_sequence(params: &EvalParams, n_max: usize) -> Result<(Vec<WideFloat>, Vec<EntryFlag>)> {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    let len = n_max + 1;
    let mut flags = vec![EntryFlag::RecurrenceOk; len];

    if xi == 0.0 || b == 1.0 {
        // G_{n+1} = ((n+b)/a) G_n exactly: a gamma ladder.
        let mut g = Vec::with_capacity(len);
        g.push(if xi == 0.0 {
            let p = a.powf(-b);
            if p.is_normal() {
                WideFloat::new(p)
            } else {
                WideFloat::from_ln(&[-b * a.ln()])
            }
        } else {
            WideFloat::new(1.0 / a)
        });
        for n in 0..n_max {
            let prev = g[n];
            g.push(prev.mul(ratio_bound(n, b, a)));
        }
        return Ok((g, flags));
    }

    let z = a * xi;
    let g0 = WideFloat::from_ln(&[ln_scaled_f0(params)]);
    let turn = turning_index(b, z);

    if turn <= 1 {
        // Upward throughout: (n + b − aξ) ≥ 0 for every n ≥ 1.
        let mut g = Vec::with_capacity(len.max(2));
        g.push(g0);
        g.push(WideFloat::lin2(
            1.0,
            &g0.mul(b - z).div(a),
            1.0,
            &scaled_f1_source(params),
        ));
        for n in 1..n_max {
            let nf = n as f64;
            g.push(WideFloat::lin2(nf + b - z, &g[n], nf * xi, &g[n - 1]).div(a));
        }
        g.truncate(len);
        return Ok((g, flags));
    }

    if let Some(start) = miller_start(b, z, n_max) {
        return Ok((miller(a, b, xi, g0, start, n_max), flags));
    }

    // Anchors at the turning index, then downward below and upward above.
    let anchor = turn.min(n_max).max(1);
    let top = (anchor + 1).max(n_max);
    let mut g = vec![WideFloat::ZERO; top + 1];
    g[0] = g0;
    g[anchor] = f_quadrature_wide(params, anchor)?;
    g[anchor + 1] = f_quadrature_wide(params, anchor + 1)?;
    for k in (2..=anchor).rev() {
        let kf = k as f64;
        g[k - 1] = WideFloat::lin2(a, &g[k + 1], z - kf - b, &g[k]).div(kf * xi);
    }
    for k in (anchor + 1)..top {
        let kf = k as f64;
        g[k + 1] = WideFloat::lin2(kf + b - z, &g[k], kf * xi, &g[k - 1]).div(a);
    }
    g.truncate(len);
    flags[anchor] = EntryFlag::QuadratureSeed;
    if anchor < len - 1 {
        flags[anchor + 1] = EntryFlag::QuadratureSeed;
    }
    Ok((g, flags))
}

/// `F_0..F_{n_max}` from the recurrence, with the ratio bound enforced at
/// every step.
pub fn f_recurrence(params: &EvalParams, n_max: usize) -> Result<FSequence> {
    let (a, b, xi) = (params.a(), params.b(), params.xi());
    let beta = b.max(1.0);
    let (mut entries, mut flags) = scaled_sequence(params, n_max)?;
    for n in 0..n_max {
        if entries_satisfy_bound(&entries, n, beta, a) {
            continue;
        }
        if flags[n + 1] == EntryFlag::RecurrenceOk {
            entries[n + 1] = f_quadrature_wide(params, n + 1)?;
        }
        flags[n + 1] = if entries_satisfy_bound(&entries, n, beta, a) {
            EntryFlag::QuadratureFallback
        } else {
            EntryFlag::BoundViolated
        };
    }
    Ok(FSequence {
        a,
        b,
        xi,
        beta,
        log_scale: -a * xi,
        entries,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_params_xi;
    use crate::numerics::make_params;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn f0_examples() {
        let p = make_params(10.0, 1.0, (-1.0f64).exp()).unwrap();
        assert!(rel(f0(&p), (-10.0f64).exp() / 10.0) < 1e-14);
        let p = make_params(7.0, 2.5, 1.0).unwrap();
        assert!(rel(f0(&p), 7.0f64.powf(-2.5)) < 1e-15);
    }

    #[test]
    fn f1_examples() {
        let p = make_params(7.0, 2.5, 1.0).unwrap();
        assert!(rel(f1(&p), 2.5 * 7.0f64.powf(-3.5)) < 1e-15);
        let p = make_params(10.0, 1.0, (-1.0f64).exp()).unwrap();
        assert!(rel(f1(&p), (-10.0f64).exp() / 100.0) < 1e-12);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let p = make_params(100.0, 2.5, 0.9).unwrap();
        assert!(rel(f0(&p), f_quadrature(&p, 0).unwrap()) < 1e-10);
        assert!(rel(f1(&p), f_quadrature(&p, 1).unwrap()) < 1e-10);
    }

    #[test]
    fn quadrature_trivial_cases() {
        let p = make_params_xi(3.0, 1.7, 0.0).unwrap();
        assert!(rel(f_quadrature(&p, 0).unwrap(), 3.0f64.powf(-1.7)) < 1e-15);
        let p = make_params_xi(10.0, 1.0, 0.5).unwrap();
        assert!(rel(f_quadrature(&p, 2).unwrap(), 2.0 * (-5.0f64).exp() / 1000.0) < 1e-12);
    }

    #[test]
    fn origin_is_gamma_ladder() {
        for (a, b) in [(50.0, 1.0), (10.0, 3.0), (1e6, 0.5)] {
            let s = f_recurrence(&make_params_xi(a, b, 0.0).unwrap(), 5).unwrap();
            for n in 0..=5 {
                let want = exp_sum(&[ln_gamma(b + n as f64) - ln_gamma(b), -(n as f64 + b) * a.ln()]);
                assert!(rel(s.value(n), want) < 1e-13, "a={a} b={b} n={n}");
            }
        }
    }

    #[test]
    fn recurrence_agrees_with_quadrature_in_every_regime() {
        // Upward, Miller and anchored branches respectively.
        for (a, b, xi) in [
            (10.0, 2.5, 0.05),
            (1000.0, 2.5, 2.0),
            (100.0, 2.5, 0.105),
            (100.0, 0.5, 0.5),
        ] {
            let p = make_params_xi(a, b, xi).unwrap();
            let s = f_recurrence(&p, 12).unwrap();
            for n in 0..=12 {
                let q = f_quadrature_scaled(&p, n).unwrap();
                assert!(rel(s.scaled(n), q) < 1e-9, "a={a} b={b} xi={xi} n={n}");
            }
        }
    }

    #[test]
    fn ratio_bound_and_decay_chain() {
        let p = make_params_xi(100.0, 2.5, 0.105).unwrap();
        let s = f_recurrence(&p, 8).unwrap();
        assert!(s.flags().iter().all(|f| *f != EntryFlag::BoundViolated));
        let mut chain = 1.0;
        for n in 0..8 {
            assert!(s.bound_holds(n));
            assert!(s.bound_excess(n) <= 4.0 * f64::EPSILON);
            chain *= (n as f64 + s.beta()) / s.a();
            assert!(s.relative(n + 1) <= chain * (1.0 + 1e-14));
        }
    }

    #[test]
    fn survives_underflow_of_f() {
        let p = make_params_xi(1e6, 2.5, 2.0).unwrap();
        let s = f_recurrence(&p, 50).unwrap();
        assert!(s
            .entries()
            .iter()
            .all(|g| g.mantissa() > 0.0 && g.mantissa().is_finite()));
        assert_eq!(s.value(0), 0.0);
        assert!(!s.has_fallback());
    }

    #[test]
    fn survives_underflow_of_the_ratio_chain() {
        // G_80/G_0 ≈ 80!/a^80 ≈ 1e−361 at the origin.
        let p = make_params_xi(1e6, 12.0, 0.0).unwrap();
        let s = f_recurrence(&p, 80).unwrap();
        assert_eq!(s.relative(80), 0.0);
        for n in 0..80 {
            assert!(s.bound_holds(n), "n={n}");
        }
        let want = ln_gamma(92.0) - ln_gamma(12.0) - 92.0 * 1e6f64.ln();
        assert!((s.entries()[80].ln() - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn miller_start_needs_room() {
        assert!(miller_start(2.5, 2000.0, 50).is_some());
        assert!(miller_start(2.5, 50.0, 50).is_none());
    }
}
