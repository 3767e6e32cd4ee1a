//! Gamma-family kernels and cancellation-safe elementary transforms.
//!
//! Everything here is a pure function of its arguments. The log-gamma
//! routines use the Stirling series above [`STIRLING_MIN`] and, below it,
//! the Taylor series about 2 after shifting the argument into `[1.5, 2.5]`.

use crate::error::{domain, Result};

/// Arguments at or above this use the Stirling series directly.
const STIRLING_MIN: f64 = 10.0;

/// `B_{2k} / (2k(2k−1))` for k = 1..8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(k) − 1` for k = 2..31, the Taylor coefficients of `ln Γ` about 2.
const ZETA_MINUS_ONE: [f64; 30] = [
    0.64493406684822644,
    0.20205690315959429,
    0.082323233711138192,
    0.036927755143369926,
    0.01734306198444914,
    0.0083492773819228268,
    0.0040773561979443394,
    0.0020083928260822144,
    0.00099457512781808534,
    0.00049418860411946456,
    0.0002460865533080483,
    0.00012271334757848915,
    6.1248135058704829e-5,
    3.0588236307020494e-5,
    1.5282259408651872e-5,
    7.6371976378997623e-6,
    3.8172932649998399e-6,
    1.9082127165539389e-6,
    9.5396203387279611e-7,
    4.7693298678780646e-7,
    2.3845050272773299e-7,
    1.1921992596531107e-7,
    5.960818905125948e-8,
    2.980350351465228e-8,
    1.4901554828365041e-8,
    7.4507117898354295e-9,
    3.7253340247884571e-9,
    1.862659723513049e-9,
    9.3132743241966818e-10,
    4.6566290650337841e-10,
];

/// Relative tolerance and iteration cap for the incomplete gamma series and
/// continued fraction.
const GAMMA_Q_TOL: f64 = 1e-15;
const GAMMA_Q_MAX_ITER: usize = 500;

/// The point at which the expansion is evaluated, held both as `x` and as
/// `ξ = −ln x` together with a cancellation-safe `1 − x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    x: f64,
    xi: f64,
    /// Rounding error of `xi`: `−ln x = xi + xi_lo` to about twice working
    /// precision.
    xi_lo: f64,
    one_minus_x: f64,
    /// `x` is the caller's value rather than `exp(−ξ)` rounded.
    x_exact: bool,
}

impl Abscissa {
    pub fn from_x(x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(domain("x", x, "must lie in (0, 1]"));
        }
        let (xi, xi_lo) = if x == 1.0 { (0.0, 0.0) } else { neg_ln_split(x) };
        let one_minus_x = if x > 0.5 { -(-xi).exp_m1() } else { 1.0 - x };
        Ok(Self {
            x,
            xi,
            xi_lo,
            one_minus_x,
            x_exact: true,
        })
    }

    pub fn from_xi(xi: f64) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(domain("xi", xi, "must be finite and nonnegative"));
        }
        Ok(Self {
            x: (-xi).exp(),
            xi,
            xi_lo: 0.0,
            one_minus_x: -(-xi).exp_m1(),
            x_exact: false,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn one_minus_x(&self) -> f64 {
        self.one_minus_x
    }
}

/// `−ln x` split as `hi + lo`, with the low part from a wide evaluation.
fn neg_ln_split(x: f64) -> (f64, f64) {
    use astro_float::{BigFloat, Consts, RoundingMode};
    const BITS: usize = 192;
    let rm = RoundingMode::ToEven;
    let hi = -x.ln();
    let mut cc = Consts::new().expect("astro-float constants cache");
    let wide = BigFloat::from_f64(x, BITS).ln(BITS, rm, &mut cc).neg();
    let lo = wide.sub(&BigFloat::from_f64(hi, BITS), BITS, rm);
    (hi, format!("{lo}").parse().unwrap_or(0.0))
}

/// Validated `(a, b, x)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    a: f64,
    b: f64,
    point: Abscissa,
}

impl EvalParams {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn x(&self) -> f64 {
        self.point.x
    }

    pub fn xi(&self) -> f64 {
        self.point.xi
    }

    pub fn one_minus_x(&self) -> f64 {
        self.point.one_minus_x
    }

    pub fn abscissa(&self) -> &Abscissa {
        &self.point
    }

    /// `a·ξ` as an unevaluated sum `hi + lo`, carrying both the rounding
    /// error of the product and that of `ξ` itself. Exponentiating `−aξ`
    /// multiplies any absolute error in `ξ` by `a`.
    pub fn a_xi(&self) -> (f64, f64) {
        let hi = self.a * self.point.xi;
        let lo = self.a.mul_add(self.point.xi, -hi) + self.a * self.point.xi_lo;
        (hi, lo)
    }

    /// `x^a` from `powf`, when `x` is exact and the power is a normal
    /// number; it is then correct to within an ulp or so, which the
    /// exponential of `−aξ` is not.
    pub(crate) fn x_pow_a(&self) -> Option<f64> {
        if !self.point.x_exact {
            return None;
        }
        let p = self.point.x.powf(self.a);
        p.is_normal().then_some(p)
    }
}

pub fn make_params(a: f64, b: f64, x: f64) -> Result<EvalParams> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("a", a, "must be positive and finite"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain("b", b, "must be positive and finite"));
    }
    Ok(EvalParams {
        a,
        b,
        point: Abscissa::from_x(x)?,
    })
}

/// Builds parameters directly from `ξ`, for the ξ-native entry points.
pub fn make_params_xi(a: f64, b: f64, xi: f64) -> Result<EvalParams> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("a", a, "must be positive and finite"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain("b", b, "must be positive and finite"));
    }
    Ok(EvalParams {
        a,
        b,
        point: Abscissa::from_xi(xi)?,
    })
}

fn stirling_tail(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= 30.0 && z.fract() == 0.0 {
        // (z−1)! is exact in f64 through 22! and correctly rounded beyond.
        let fact: f64 = (2..z as u32).map(f64::from).product();
        return fact.ln();
    }
    if z >= STIRLING_MIN {
        return (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_tail(z);
    }
    // Move into [1.5, 2.5] with products of the recurrence factors, which
    // stay away from the cancellation a shift up to the Stirling range hits.
    let mut shifted = z;
    let mut up = 1.0;
    let mut down = 1.0;
    while shifted > 2.5 {
        shifted -= 1.0;
        up *= shifted;
    }
    while shifted < 1.5 {
        down *= shifted;
        shifted += 1.0;
    }
    ln_gamma_near_two(shifted - 2.0) + up.ln() - down.ln()
}

/// `ln Γ(2 + e)` for `|e| ≤ 1/2`:
/// `(1 − γ) e + Σ_{k≥2} (−1)^k (ζ(k) − 1) e^k / k`.
fn ln_gamma_near_two(e: f64) -> f64 {
    let mut acc = 0.0;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * e + sign * c / k;
    }
    e * ((1.0 - EULER_GAMMA) + e * acc)
}

/// `ln Γ(a+b) − ln Γ(a)`, computed without forming either log-gamma value
/// when `a` is large.
pub fn log_gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain("a", a, "must be positive"));
    }
    if !(b > 0.0) {
        return Err(domain("b", b, "must be positive"));
    }
    Ok(log_gamma_ratio_unchecked(a, b))
}

pub(crate) fn log_gamma_ratio_unchecked(a: f64, b: f64) -> f64 {
    if b == 1.0 {
        return a.ln();
    }
    if a + b <= STIRLING_MIN {
        return ln_gamma(a + b) - ln_gamma(a);
    }
    if a >= STIRLING_MIN {
        let c = a + b;
        return (a - 0.5) * (b / a).ln_1p() + b * c.ln() - b + (stirling_tail(c) - stirling_tail(a));
    }
    let mut shift = 0.0;
    let mut correction = 0.0;
    while a + shift < STIRLING_MIN {
        correction += (b / (a + shift)).ln_1p();
        shift += 1.0;
    }
    log_gamma_ratio_unchecked(a + shift, b) - correction
}

/// `ln B(a,b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(b) - log_gamma_ratio_unchecked(a, b)
}

/// Lower series `Σ z^k / ((s+1)⋯(s+k))`, so that `P(s,z) = e^{−z} z^s / Γ(s+1) · sum`.
fn lower_series(s: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=GAMMA_Q_MAX_ITER {
        term *= z / (s + k as f64);
        sum += term;
        if term < sum * GAMMA_Q_TOL {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the continued fraction for
/// `Γ(s,z) e^{z} z^{−s}`.
fn upper_fraction(s: f64, z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_Q_MAX_ITER {
        let fi = i as f64;
        let an = -fi * (fi - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_Q_TOL {
            break;
        }
    }
    h
}

/// `ln P(s,z)` on the series side (`z < s + 1`).
fn ln_lower_p(s: f64, z: f64) -> f64 {
    let (hi, lo) = compensated_sum(&[s * z.ln(), -z, -ln_gamma(s + 1.0), lower_series(s, z).ln()]);
    hi + lo
}

/// Normalised upper incomplete gamma function `Q(s,z) = Γ(s,z)/Γ(s)`.
pub fn reg_gamma_q(s: f64, z: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("s", s, "must be positive"));
    }
    if !(z >= 0.0) {
        return Err(domain("z", z, "must be nonnegative"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z < s + 1.0 {
        let p = ln_lower_p(s, z).exp();
        if p <= 0.5 {
            return Ok((1.0 - p).clamp(0.0, 1.0));
        }
    }
    Ok(upper_q(s, z).clamp(0.0, 1.0))
}

/// `Q(s,z)` from the continued fraction, with the `z^s · fraction` product
/// formed directly when both factors are representable.
fn upper_q(s: f64, z: f64) -> f64 {
    let h = upper_fraction(s, z);
    let scaled = z.powf(s) * h;
    let prefactor = exp_sum(&[-z, -ln_gamma(s)]);
    if scaled.is_normal() && prefactor.is_normal() {
        prefactor * scaled
    } else {
        exp_sum(&[s * z.ln(), -z, -ln_gamma(s), h.ln()])
    }
}

/// `ln Q(s,z)`, finite where `Q` itself underflows.
pub fn ln_reg_gamma_q(s: f64, z: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("s", s, "must be positive"));
    }
    if !(z >= 0.0) {
        return Err(domain("z", z, "must be nonnegative"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(s * z.ln() - z - ln_gamma(s) + ln_scaled_upper_gamma(s, z))
}

/// `ln(Γ(s,z) e^{z} z^{−s})` for `z > 0`: the upper incomplete gamma with its
/// dominant `e^{−z} z^{s}` factor removed analytically.
pub(crate) fn ln_scaled_upper_gamma(s: f64, z: f64) -> f64 {
    if z < s + 1.0 {
        let p = ln_lower_p(s, z).exp();
        if p <= 0.5 {
            return (-p).ln_1p() + z - s * z.ln() + ln_gamma(s);
        }
    }
    upper_fraction(s, z).ln()
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// `exp(Σ parts)` with the exponent accumulated in compensated arithmetic.
///
/// Large cancelling exponents (`ln Γ`-ratios against `a·ξ`) otherwise lose
/// their low-order bits before the exponential amplifies them.
pub fn exp_sum(parts: &[f64]) -> f64 {
    let (hi, lo) = compensated_sum(parts);
    if hi == f64::NEG_INFINITY {
        return 0.0;
    }
    hi.exp() * lo.exp()
}

fn compensated_sum(parts: &[f64]) -> (f64, f64) {
    let mut hi = 0.0;
    let mut lo = 0.0;
    for &p in parts {
        let (s, e) = two_sum(hi, p);
        hi = s;
        lo += e;
    }
    if !hi.is_finite() {
        return (hi, 0.0);
    }
    two_sum(hi, lo)
}

/// `2^k` for `k` in the normal exponent range.
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `x · 2^k` with a single final rounding.
pub fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= pow2(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= pow2(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(k as i32)
}

/// `mantissa · 2^exponent` with `|mantissa| ∈ [1, 2)`: a float whose
/// exponent range does not run out. Rescaling is exact, so arithmetic
/// rounds exactly as in plain `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WideFloat {
    mantissa: f64,
    exponent: i64,
}

impl WideFloat {
    pub const ZERO: Self = Self {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn new(v: f64) -> Self {
        Self::with_exponent(v, 0)
    }

    fn with_exponent(v: f64, exponent: i64) -> Self {
        if v == 0.0 || !v.is_finite() {
            return Self { mantissa: v, exponent };
        }
        let raw = ((v.to_bits() >> 52) & 0x7ff) as i32;
        if raw == 0 {
            return Self::with_exponent(v * pow2(64), exponent - 64);
        }
        let k = raw - 1023;
        Self {
            mantissa: ldexp(v, -i64::from(k)),
            exponent: exponent + i64::from(k),
        }
    }

    /// `exp(Σ parts)`, with the sum compensated and the binary exponent split
    /// off before exponentiating.
    pub fn from_ln(parts: &[f64]) -> Self {
        // fdlibm split of ln 2: k·LN2_HI is exact for |k| < 2^20.
        const LN2_HI: f64 = 6.931_471_803_691_238_164_9e-1;
        const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;
        let (hi, lo) = compensated_sum(parts);
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !hi.is_finite() {
            return Self::new(hi.exp());
        }
        let k = (hi / std::f64::consts::LN_2).round();
        let r = (hi - k * LN2_HI) - k * LN2_LO + lo;
        Self::with_exponent(r.exp(), k as i64)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn mul(&self, f: f64) -> Self {
        Self::with_exponent(self.mantissa * f, self.exponent)
    }

    pub fn mul_wide(&self, other: &Self) -> Self {
        Self::with_exponent(self.mantissa * other.mantissa, self.exponent + other.exponent)
    }

    pub fn div(&self, f: f64) -> Self {
        Self::with_exponent(self.mantissa / f, self.exponent)
    }

    /// This value's mantissa expressed at `other`'s exponent.
    fn aligned_to(&self, other: &Self) -> f64 {
        ldexp(self.mantissa, self.exponent - other.exponent)
    }

    /// `self / other` as a plain float.
    pub fn ratio(&self, other: &Self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        ldexp(self.mantissa / other.mantissa, self.exponent - other.exponent)
    }

    /// `c1·x1 + c2·x2`.
    pub fn lin2(c1: f64, x1: &Self, c2: f64, x2: &Self) -> Self {
        let base = if x1.mantissa == 0.0 {
            x2
        } else if x2.mantissa == 0.0 || x1.exponent >= x2.exponent {
            x1
        } else {
            x2
        };
        let v = c1 * x1.aligned_to(base) + c2 * x2.aligned_to(base);
        Self::with_exponent(v, base.exponent)
    }

    /// `0 < self ≤ bound · prev · (1 + slack)`, evaluated on mantissas
    /// aligned to `prev`'s exponent so that no intermediate leaves range.
    pub fn within_ratio_of(&self, prev: &Self, bound: f64, slack: f64) -> bool {
        let next = self.aligned_to(prev);
        next > 0.0 && next <= bound * prev.mantissa * (1.0 + slack)
    }
}
