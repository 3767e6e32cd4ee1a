//! Taylor coefficients `d_n(ξ, b)` of `f(t) = ((1 − e^{−t})/t)^{b−1}` about
//! `t = ξ`.
//!
//! Two independent routes are provided:
//!
//! * [`d_recurrence`] advances the nonlinear convolution recurrence that
//!   follows from the differential equation satisfied by `f`. The
//!   recurrence divides by `ξ` at every order and has a parasitic solution
//!   growing roughly like `ξ^{−n}`, so it runs in multiple precision with a
//!   working width chosen from `ξ` and the requested order.
//! * [`d_series`] composes truncated power series: the Taylor coefficients of
//!   `g(t) = (1 − e^{−t})/t` about `ξ` come from the moments
//!   `∫_0^1 s^k e^{−ξ s} ds`, and `g^{b−1}` is formed as `exp((b−1) log g)`,
//!   also in multiple precision. It is valid for every `b > 0` and `ξ ≥ 0`.

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{domain, Error, Result};
use crate::numerics::Abscissa;
use crate::series::{self, big_to_f64};

/// `|b − 1|` below this is treated as the degenerate case for the recurrence.
pub const B_ONE_THRESHOLD: f64 = 1e-6;
/// `ξ` below this is outside the recurrence's domain.
pub const XI_THRESHOLD: f64 = 1e-6;
/// Below this `ξ` the closed forms for `d_0`, `d_1` switch to Maclaurin series.
const SMALL_XI: f64 = 1e-3;
/// Extra orders carried through the log/exp composition.
const GUARD_TERMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMethod {
    Recurrence,
    SeriesComposition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    b: f64,
    xi: f64,
    d: Vec<f64>,
    method: CoefficientMethod,
}

impl CoefficientTable {
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn method(&self) -> CoefficientMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(domain("b", b, "must be positive and finite"))
    }
}

/// `g(ξ) = (1 − e^{−ξ})/ξ`, through its Maclaurin series for small `ξ`.
fn g_at(point: &Abscissa) -> f64 {
    let xi = point.xi();
    if xi < SMALL_XI {
        1.0 + xi * (-1.0 / 2.0 + xi * (1.0 / 6.0 + xi * (-1.0 / 24.0 + xi * (1.0 / 120.0 - xi / 720.0))))
    } else {
        point.one_minus_x() / xi
    }
}

/// `d_0 = ((1 − x)/ξ)^{b−1}`.
pub fn d0(b: f64, point: &Abscissa) -> Result<f64> {
    check_b(b)?;
    if b == 1.0 {
        return Ok(1.0);
    }
    Ok(g_at(point).powf(b - 1.0))
}

/// `d_1 = (b − 1) d_0 · (xξ + x − 1)/((1 − x)ξ)`.
///
/// The bracket is `g′/g`; for small `ξ` it is taken from
/// `−1/2 + ξ/12 − ξ³/720 + ξ⁵/30240`.
pub fn d1(b: f64, point: &Abscissa) -> Result<f64> {
    let lead = d0(b, point)?;
    if b == 1.0 {
        return Ok(0.0);
    }
    let xi = point.xi();
    let bracket = if xi < SMALL_XI {
        let xi2 = xi * xi;
        -0.5 + xi * (1.0 / 12.0 + xi2 * (-1.0 / 720.0 + xi2 / 30240.0))
    } else {
        let x = point.x();
        (x * xi - point.one_minus_x()) / (point.one_minus_x() * xi)
    };
    Ok((b - 1.0) * lead * bracket)
}

/// Working precision in bits for the recurrence up to order `n_max`.
fn recurrence_bits(xi: f64, n_max: usize) -> usize {
    let per_order = (8.0 / xi).log2().max(0.0);
    let cancellation = (1.0 / xi).log2().max(0.0);
    128 + (n_max as f64 * per_order + cancellation).ceil() as usize
}

/// Coefficients from the convolution recurrence, seeded with the closed
/// forms of `d_0` and `d_1`.
pub fn d_recurrence(b: f64, point: &Abscissa, n_max: usize) -> Result<CoefficientTable> {
    check_b(b)?;
    if (b - 1.0).abs() < B_ONE_THRESHOLD {
        return Err(Error::Degenerate { field: "b", value: b });
    }
    let xi = point.xi();
    if xi < XI_THRESHOLD {
        return Err(domain(
            "xi",
            xi,
            "recurrence needs xi >= 1e-6; use the series composition",
        ));
    }

    let p = recurrence_bits(xi, n_max);
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("astro-float constants cache");
    let num = |v: f64| BigFloat::from_f64(v, p);

    let xi_b = num(xi);
    let bm1 = num(b).sub(&num(1.0), p, rm);
    let x = xi_b.neg().exp(p, rm, &mut cc);
    let one_minus_x = num(1.0).sub(&x, p, rm);
    let g = one_minus_x.div(&xi_b, p, rm);
    let first = bm1.mul(&g.ln(p, rm, &mut cc), p, rm).exp(p, rm, &mut cc);
    // (xξ + x − 1) / ((1 − x) ξ)
    let bracket = x
        .mul(&xi_b, p, rm)
        .sub(&one_minus_x, p, rm)
        .div(&one_minus_x.mul(&xi_b, p, rm), p, rm);
    let second = bm1.mul(&first, p, rm).mul(&bracket, p, rm);

    let mut d = vec![first, second];
    let inv_bm1 = num(1.0).div(&bm1, p, rm);
    for n in 0..n_max.saturating_sub(1) {
        let nf = n as f64;
        let mut s1 = num(0.0);
        let mut s2 = num(0.0);
        let mut s3 = num(0.0);
        for m in 0..=n {
            let mf = m as f64;
            // (m+1)(n − 2m + 1 + (m − n − 1)/(b − 1)) d_{m+1} d_{n−m+1}
            let c1 = num(nf - 2.0 * mf + 1.0).add(&num(mf - nf - 1.0).mul(&inv_bm1, p, rm), p, rm);
            let t1 = c1
                .mul(&num(mf + 1.0), p, rm)
                .mul(&d[m + 1].mul(&d[n - m + 1], p, rm), p, rm);
            s1 = s1.add(&t1, p, rm);
            // (m+1)(n − 2m − 2 − ξ + (m − n)/(b − 1)) d_{m+1} d_{n−m}
            let c2 = num(nf - 2.0 * mf - 2.0)
                .sub(&xi_b, p, rm)
                .add(&num(mf - nf).mul(&inv_bm1, p, rm), p, rm);
            let t2 = c2
                .mul(&num(mf + 1.0), p, rm)
                .mul(&d[m + 1].mul(&d[n - m], p, rm), p, rm);
            s2 = s2.add(&t2, p, rm);
            // (1 − m − b) d_m d_{n−m}
            let c3 = num(1.0 - mf).sub(&num(b), p, rm);
            s3 = s3.add(&c3.mul(&d[m].mul(&d[n - m], p, rm), p, rm), p, rm);
        }
        let rhs = xi_b.mul(&s1, p, rm).add(&s2, p, rm).add(&s3, p, rm);
        let denom = xi_b.mul(&num((nf + 1.0) * (nf + 2.0)), p, rm).mul(&d[0], p, rm);
        d.push(rhs.div(&denom, p, rm));
    }
    d.truncate(n_max + 1);

    Ok(CoefficientTable {
        b,
        xi,
        d: d.iter().map(big_to_f64).collect(),
        method: CoefficientMethod::Recurrence,
    })
}

/// Working precision of the series composition. The inputs are exact
/// (`ξ` is a double), and 192 bits leaves ample room for the cancellation
/// that makes late coefficients many orders smaller than `d_0`.
const SERIES_BITS: usize = 192;

/// `∫_0^1 s^k e^{−ξ s} ds` for `k = 0..=k_max`.
fn moments(xi: f64, k_max: usize, p: usize, cc: &mut Consts) -> Vec<BigFloat> {
    let rm = RoundingMode::ToEven;
    let num = |v: f64| BigFloat::from_f64(v, p);
    if xi == 0.0 {
        return (0..=k_max).map(|k| num(1.0).div(&num(k as f64 + 1.0), p, rm)).collect();
    }
    let xi_b = num(xi);
    let decay = xi_b.neg().exp(p, rm, cc);
    if xi > 50.0_f64.max(k_max as f64) {
        // Upward recurrence, contracting by k/ξ < 1.
        let mut out = Vec::with_capacity(k_max + 1);
        let mut m = num(1.0).sub(&decay, p, rm).div(&xi_b, p, rm);
        out.push(m.clone());
        for k in 1..=k_max {
            m = m.mul(&num(k as f64), p, rm).sub(&decay, p, rm).div(&xi_b, p, rm);
            out.push(m.clone());
        }
        return out;
    }
    // e^{−ξ} Σ_j ξ^j / ((k+1)(k+2)⋯(k+1+j)), all terms positive.
    let eps = num(2.0).powi(p, p, rm).reciprocal(p, rm);
    (0..=k_max)
        .map(|k| {
            let kf = k as f64;
            let mut term = num(1.0).div(&num(kf + 1.0), p, rm);
            let mut sum = term.clone();
            let mut j = 0.0;
            loop {
                term = term.mul(&xi_b, p, rm).div(&num(kf + 2.0 + j), p, rm);
                sum = sum.add(&term, p, rm);
                j += 1.0;
                if term < sum.mul(&eps, p, rm) {
                    break;
                }
            }
            decay.mul(&sum, p, rm)
        })
        .collect()
}

/// Taylor coefficients `(−1)^k m_k / k!` of `g(t) = (1 − e^{−t})/t = ∫_0^1 e^{−ts} ds`
/// about `ξ`.
fn g_taylor_big(xi: f64, k_max: usize, p: usize, cc: &mut Consts) -> Vec<BigFloat> {
    let rm = RoundingMode::ToEven;
    let mut fact = BigFloat::from_f64(1.0, p);
    moments(xi, k_max, p, cc)
        .into_iter()
        .enumerate()
        .map(|(k, m)| {
            if k > 0 {
                fact = fact.mul(&BigFloat::from_f64(k as f64, p), p, rm);
            }
            let c = m.div(&fact, p, rm);
            if k % 2 == 0 {
                c
            } else {
                c.neg()
            }
        })
        .collect()
}

/// Taylor coefficients of `g(t) = (1 − e^{−t})/t` about `ξ`.
pub fn g_taylor(xi: f64, k_max: usize) -> Vec<f64> {
    let mut cc = Consts::new().expect("astro-float constants cache");
    g_taylor_big(xi, k_max, SERIES_BITS, &mut cc)
        .iter()
        .map(big_to_f64)
        .collect()
}

/// Coefficients from series composition; valid for all `b > 0`, `ξ ≥ 0`.
pub fn d_series(b: f64, point: &Abscissa, n_max: usize) -> Result<CoefficientTable> {
    check_b(b)?;
    let p = SERIES_BITS;
    let mut cc = Consts::new().expect("astro-float constants cache");
    let g = g_taylor_big(point.xi(), n_max + GUARD_TERMS, p, &mut cc);
    let bm1 = BigFloat::from_f64(b, p).sub(&BigFloat::from_f64(1.0, p), p, RoundingMode::ToEven);
    let mut d: Vec<f64> = series::pow(&g, &bm1, p, &mut cc).iter().map(big_to_f64).collect();
    d.truncate(n_max + 1);
    Ok(CoefficientTable {
        b,
        xi: point.xi(),
        d,
        method: CoefficientMethod::SeriesComposition,
    })
}

/// Recurrence where it is defined, series composition otherwise.
pub fn coefficients(b: f64, point: &Abscissa, n_max: usize) -> Result<CoefficientTable> {
    if (b - 1.0).abs() < B_ONE_THRESHOLD || point.xi() < XI_THRESHOLD {
        d_series(b, point, n_max)
    } else {
        d_recurrence(b, point, n_max)
    }
}

/// Residual of `t f f″ − ((b−2)/(b−1)) t f′² + (t+2) f f′ + (b−1) f² = 0` at `t`,
/// normalised by `(b−1) f(t)²`, with `f, f′, f″` from a series expansion
/// centred at `t`.
pub fn ode_residual(b: f64, t: f64) -> Result<f64> {
    check_b(b)?;
    if b == 1.0 {
        return Err(domain("b", b, "the differential equation divides by b - 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", t, "must be positive and finite"));
    }
    let table = d_series(b, &Abscissa::from_xi(t)?, 4)?;
    let d = table.d();
    let (f, fp, fpp) = (d[0], d[1], 2.0 * d[2]);
    let bm1 = b - 1.0;
    let residual = t * f * fpp - (b - 2.0) / bm1 * t * fp * fp + (t + 2.0) * f * fp + bm1 * f * f;
    Ok(residual / (bm1 * f * f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_xi(xi: f64) -> Abscissa {
        Abscissa::from_xi(xi).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms_trivial() {
        for xi in [0.0, 0.3, 5.0] {
            assert_eq!(d0(1.0, &at_xi(xi)).unwrap(), 1.0);
            assert_eq!(d1(1.0, &at_xi(xi)).unwrap(), 0.0);
        }
        assert_eq!(d0(2.5, &Abscissa::from_x(1.0).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn closed_forms_at_unit_xi() {
        let e = (-1.0f64).exp();
        let p = Abscissa::from_x(e).unwrap();
        assert!(close(d0(2.0, &p).unwrap(), 1.0 - e, 1e-15));
        assert!(close(d1(2.0, &p).unwrap(), 2.0 * e - 1.0, 1e-14));
    }

    #[test]
    fn small_xi_limits() {
        assert!(close(d1(2.0, &at_xi(0.0)).unwrap(), -0.5, 1e-15));
        for b in [0.5, 2.0, 7.0] {
            let p = at_xi(1e-9);
            assert!(close(d0(b, &p).unwrap(), 1.0, 1e-7));
            assert!(close(d1(b, &p).unwrap(), -(b - 1.0) / 2.0, 1e-7));
        }
    }

    #[test]
    fn small_xi_branch_is_continuous() {
        // Either side of the switch the two formulas describe the same function.
        for b in [0.5, 2.5, 7.0] {
            let below = at_xi(SMALL_XI * (1.0 - 1e-14));
            let above = at_xi(SMALL_XI * (1.0 + 1e-14));
            assert!(close(d0(b, &below).unwrap(), d0(b, &above).unwrap(), 1e-12));
            assert!(close(d1(b, &below).unwrap(), d1(b, &above).unwrap(), 1e-11));
        }
    }

    #[test]
    fn series_b_one_is_exact() {
        let t = d_series(1.0, &at_xi(0.7), 20).unwrap();
        assert_eq!(t.d()[0], 1.0);
        assert!(t.d()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn series_at_origin() {
        let t = d_series(2.0, &at_xi(0.0), 2).unwrap();
        let want = [1.0, -0.5, 1.0 / 6.0];
        for (got, want) in t.d().iter().zip(want) {
            assert!(close(*got, want, 1e-15), "{got} vs {want}");
        }
    }

    #[test]
    fn series_matches_closed_forms() {
        let e = (-1.0f64).exp();
        let t = d_series(2.0, &at_xi(1.0), 1).unwrap();
        assert!(close(t.d()[0], 1.0 - e, 1e-15));
        assert!(close(t.d()[1], 2.0 * e - 1.0, 1e-14));
    }

    #[test]
    fn recurrence_matches_reference_values() {
        // 40-digit Taylor coefficients of ((1 − e^{−t})/t)^{b−1} about ξ.
        let cases: [(f64, f64, [f64; 7]); 3] = [
            (
                2.0,
                1.0,
                [
                    0.632_120_558_828_557_68,
                    -0.264_241_117_657_115_36,
                    0.080_301_397_071_394_196,
                    -0.018_988_156_876_153_809,
                    0.003_659_846_827_343_712_3,
                    -0.000_594_184_817_581_693,
                    8.324_114_928_802_310_8e-5,
                ],
            ),
            (
                3.0,
                0.5,
                [
                    0.619_272_486_984_701_9,
                    -0.567_880_199_609_278_77,
                    0.311_343_741_019_312_38,
                    -0.127_170_305_604_315_59,
                    0.042_141_214_892_981_215,
                    -0.011_852_997_090_025_403,
                    0.002_909_478_318_993_652_6,
                ],
            ),
            (
                0.5,
                2.0,
                [
                    1.520_866_623_178_814_9,
                    0.261_195_426_396_407_66,
                    -0.003_800_082_927_822_571_2,
                    -0.001_659_149_626_712_410_9,
                    0.000_245_511_207_676_557_91,
                    3.802_825_184_864_596_7e-6,
                    -5.080_636_901_734_768_5e-6,
                ],
            ),
        ];
        for (b, xi, want) in cases {
            let rec = d_recurrence(b, &at_xi(xi), 6).unwrap();
            let ser = d_series(b, &at_xi(xi), 6).unwrap();
            for (n, &w) in want.iter().enumerate() {
                assert!(close(rec.d()[n], w, 1e-12), "rec b={b} xi={xi} n={n}: {}", rec.d()[n]);
                assert!(close(ser.d()[n], w, 1e-12), "ser b={b} xi={xi} n={n}: {}", ser.d()[n]);
            }
        }
    }

    #[test]
    fn recurrence_excluded_region() {
        assert!(matches!(
            d_recurrence(1.0, &at_xi(0.5), 3),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            d_recurrence(1.0 + 1e-8, &at_xi(0.5), 3),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            d_recurrence(2.0, &at_xi(0.0), 3),
            Err(Error::Domain { field: "xi", .. })
        ));
        let auto = coefficients(1.0, &at_xi(0.5), 3).unwrap();
        assert_eq!(auto.method(), CoefficientMethod::SeriesComposition);
        let auto = coefficients(2.0, &at_xi(0.5), 3).unwrap();
        assert_eq!(auto.method(), CoefficientMethod::Recurrence);
    }

    #[test]
    fn recurrence_survives_small_xi() {
        for xi in [1e-5, 1e-3, 0.1] {
            let rec = d_recurrence(2.5, &at_xi(xi), 20).unwrap();
            let ser = d_series(2.5, &at_xi(xi), 20).unwrap();
            for n in 0..=20 {
                assert!(close(rec.d()[n], ser.d()[n], 1e-12), "xi={xi} n={n}");
            }
        }
    }

    #[test]
    fn large_xi_moments() {
        // ∫_0^1 s e^{−ξs} ds = (1 − (1+ξ)e^{−ξ})/ξ²
        let xi = 80.0;
        let m = g_taylor(xi, 3);
        assert!(close(-m[1], (1.0 - (1.0 + xi) * (-xi).exp()) / (xi * xi), 1e-15));
        let t = d_series(2.0, &at_xi(xi), 3).unwrap();
        assert!(close(t.d()[0], -(-xi).exp_m1() / xi, 1e-15));
    }

    #[test]
    fn ode_residual_vanishes() {
        for (b, t, tol) in [(2.0, 1.0, 1e-10), (0.5, 3.0, 1e-10), (5.0, 0.1, 1e-9)] {
            let r = ode_residual(b, t).unwrap();
            assert!(r.abs() <= tol, "b={b} t={t}: {r}");
        }
        assert!(ode_residual(1.0, 1.0).is_err());
        assert!(ode_residual(2.0, 0.0).is_err());
    }
}
