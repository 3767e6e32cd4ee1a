//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! [`integrate`] handles finite intervals; [`integrate_to_infinity`] handles
//! exponentially decaying integrands on `[0, ∞)` given in log form, with an
//! analytic bound on the discarded tail.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { lo, hi, value, error }
}

/// Integrates `f` over `[points[0], points[last]]`, using every entry of
/// `points` as an initial breakpoint. `points` must be sorted ascending.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
        });
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult {
                value,
                abs_error: error,
                subdivisions: segments.len(),
            });
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::Convergence {
                estimate: value,
                abs_error: error,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("nonempty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval exhausted at working precision; accept what is there.
            return Ok(QuadResult {
                value,
                abs_error: error,
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(kronrod15(&f, seg.lo, mid));
        segments.push(kronrod15(&f, mid, seg.hi));
    }
}

/// The range is extended until the bound on the remaining tail is below
/// this fraction of the integral.
const TAIL_FRACTION: f64 = 1e-18;

/// A value represented as `value · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIntegral {
    pub log_scale: f64,
    pub value: f64,
    pub abs_error: f64,
}

impl ScaledIntegral {
    pub fn unscaled(&self) -> f64 {
        self.value * self.log_scale.exp()
    }

    pub fn ln(&self) -> f64 {
        self.value.ln() + self.log_scale
    }
}

/// Shape information for a log-integrand `φ` on `[0, ∞)`.
pub struct DecayingIntegrand<P, K> {
    /// `φ(τ)`, the logarithm of the integrand.
    pub log_integrand: P,
    /// Location of the maximum of `φ` (0 when it is at the endpoint).
    pub peak: f64,
    /// Width of the peak region.
    pub width: f64,
    /// Additional breakpoints inside `(0, ∞)` worth splitting at.
    pub extra_breaks: Vec<f64>,
    /// For `T` past the peak, a lower bound `κ(T)` on `−φ′` over `[T, ∞)`;
    /// nonpositive when no bound is available yet.
    pub decay_rate: K,
}

/// `∫_0^∞ exp(φ(τ)) dτ`, scaled by the peak value so that the quadrature runs
/// on numbers near 1.
pub fn integrate_to_infinity<P, K>(spec: &DecayingIntegrand<P, K>, cfg: &QuadConfig) -> Result<ScaledIntegral>
where
    P: Fn(f64) -> f64,
    K: Fn(f64) -> f64,
{
    let phi = &spec.log_integrand;
    let log_scale = phi(spec.peak);
    let f = |t: f64| {
        let v = phi(t) - log_scale;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };

    let width = spec.width.max(f64::MIN_POSITIVE);
    let mut end = spec.peak + 40.0 * width;
    let mut points = vec![0.0];
    points.extend(spec.extra_breaks.iter().copied().filter(|&p| p > 0.0 && p < end));
    for p in [
        spec.peak,
        spec.peak + width,
        spec.peak + 4.0 * width,
        spec.peak + 12.0 * width,
    ] {
        if p > 0.0 && p < end {
            points.push(p);
        }
    }
    points.push(end);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut head = integrate(f, &points, cfg)?;
    let mut total = head.value;
    let mut err = head.abs_error;
    let mut subdivisions = head.subdivisions;
    for _ in 0..64 {
        let kappa = (spec.decay_rate)(end);
        let tail_bound = if kappa > 0.0 { f(end) / kappa } else { f64::INFINITY };
        if tail_bound <= TAIL_FRACTION * total.abs() {
            return Ok(ScaledIntegral {
                log_scale,
                value: total,
                abs_error: err + tail_bound,
            });
        }
        let next = end + (end - spec.peak).max(width);
        head = integrate(f, &[end, next], cfg)?;
        total += head.value;
        err += head.abs_error;
        subdivisions += head.subdivisions;
        end = next;
    }
    Err(Error::Convergence {
        estimate: total,
        abs_error: err,
        subdivisions,
    })
}
