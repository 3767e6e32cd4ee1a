//! Property suites: every recurrence, inequality and identity the expansion
//! rests on, checked on a parameter grid against an independent route.
//!
//! The small grid is the acceptance grid; the full grid widens every axis.

use serde::Serialize;

use crate::coefficients::{d_recurrence, d_series, ode_residual};
use crate::error::Result;
use crate::fsequence::{f_quadrature_wide, f_recurrence, EntryFlag};
use crate::numerics::{make_params, make_params_xi, Abscissa};
use crate::oracle::{check_cn_inequality, check_cn_recurrence, ibeta_quadrature, symmetry_residual, OracleConfig};
use crate::uniform::evaluate_fixed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Small,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest observed value of the suite's metric.
    pub worst: f64,
    /// Where it was observed.
    pub worst_at: String,
    /// The metric must not exceed this.
    pub limit: f64,
}

/// Accumulates a metric over many checks, remembering the worst point.
struct Tally {
    name: &'static str,
    limit: f64,
    checks: usize,
    failures: usize,
    worst: f64,
    worst_at: String,
}

impl Tally {
    fn new(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            limit,
            checks: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
            worst_at: String::new(),
        }
    }

    /// Records `metric`, which passes when `metric ≤ limit`. NaN fails.
    fn record(&mut self, metric: f64, at: impl FnOnce() -> String) {
        self.checks += 1;
        let ok = metric <= self.limit;
        if !ok {
            self.failures += 1;
        }
        if !self.worst.is_nan() && !(metric <= self.worst) {
            self.worst = metric;
            self.worst_at = at();
        }
    }

    fn fail(&mut self, at: String) {
        self.checks += 1;
        self.failures += 1;
        self.worst = f64::INFINITY;
        self.worst_at = at;
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst: self.worst,
            worst_at: self.worst_at,
            limit: self.limit,
        }
    }
}

fn rel(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        ((value - reference) / reference).abs()
    }
}

pub struct FGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub xi: Vec<f64>,
    pub n_max: usize,
}

pub fn f_grid(grid: Grid) -> FGrid {
    match grid {
        Grid::Small => FGrid {
            a: vec![10.0, 1e2, 1e3, 1e6],
            b: vec![0.5, 1.0, 2.5, 7.0],
            xi: vec![0.0, 0.01, 0.5, 2.0],
            n_max: 50,
        },
        Grid::Full => FGrid {
            a: vec![10.0, 30.0, 1e2, 3e2, 1e3, 3e3, 1e4, 1e5, 1e6],
            b: vec![0.25, 0.5, 1.0, 1.5, 2.5, 4.0, 7.0, 12.0],
            xi: vec![0.0, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0],
            n_max: 80,
        },
    }
}

/// `0 < F_{n+1} ≤ ((n+β)/a) F_n`. The metric is the relative excess
/// `F_{n+1} / (((n+β)/a) F_n) − 1`; positivity failures count as +∞.
pub fn ratio_bound_suite(grid: Grid) -> SuiteReport {
    let g = f_grid(grid);
    let mut tally = Tally::new("ratio-bound", crate::fsequence::BOUND_SLACK_ULPS * f64::EPSILON);
    for &a in &g.a {
        for &b in &g.b {
            for &xi in &g.xi {
                let at = |n: usize| format!("a={a} b={b} xi={xi} n={n}");
                let seq = match make_params_xi(a, b, xi).and_then(|p| f_recurrence(&p, g.n_max)) {
                    Ok(s) => s,
                    Err(e) => {
                        tally.fail(format!("a={a} b={b} xi={xi}: {e}"));
                        continue;
                    }
                };
                for n in 0..g.n_max {
                    tally.record(seq.bound_excess(n), || at(n));
                }
            }
        }
    }
    tally.finish()
}

/// Recurrence against quadrature, `n ≤ 10`, `a ≤ 10³`, on entries the
/// recurrence produced itself.
pub fn f_cross_suite(grid: Grid) -> SuiteReport {
    let g = f_grid(grid);
    let mut tally = Tally::new("f-recurrence-vs-quadrature", 1e-9);
    for &a in g.a.iter().filter(|&&a| a <= 1e3) {
        for &b in &g.b {
            for &xi in &g.xi {
                let outcome = make_params_xi(a, b, xi).and_then(|p| {
                    let seq = f_recurrence(&p, 10)?;
                    let mut out = Vec::new();
                    for n in 0..=10 {
                        if seq.flags()[n] == EntryFlag::RecurrenceOk {
                            let q = f_quadrature_wide(&p, n)?;
                            out.push((n, (seq.entries()[n].ratio(&q) - 1.0).abs()));
                        }
                    }
                    Ok(out)
                });
                match outcome {
                    Ok(rows) => {
                        for (n, metric) in rows {
                            tally.record(metric, || format!("a={a} b={b} xi={xi} n={n}"));
                        }
                    }
                    Err(e) => tally.fail(format!("a={a} b={b} xi={xi}: {e}")),
                }
            }
        }
    }
    tally.finish()
}

/// Recurrence against series composition. The metric is
/// `|d_rec − d_ser| / |d_ser|` divided by the order-dependent limit
/// (1e−12 up to order 10, 1e−8 up to order 20), so it passes at ≤ 1.
pub fn d_cross_suite(grid: Grid) -> SuiteReport {
    let (bs, xis): (Vec<f64>, Vec<f64>) = match grid {
        Grid::Small => (vec![0.5, 2.0, 2.5, 7.0], vec![0.1, 1.0, 3.0]),
        Grid::Full => (
            vec![0.25, 0.5, 0.9, 1.5, 2.0, 2.5, 4.0, 7.0, 12.0],
            vec![1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0],
        ),
    };
    let mut tally = Tally::new("d-recurrence-vs-series", 1.0);
    for &b in &bs {
        for &xi in &xis {
            let tables = Abscissa::from_xi(xi).and_then(|p| Ok((d_recurrence(b, &p, 20)?, d_series(b, &p, 20)?)));
            let (rec, ser) = match tables {
                Ok(t) => t,
                Err(e) => {
                    tally.fail(format!("b={b} xi={xi}: {e}"));
                    continue;
                }
            };
            for n in 0..=20 {
                let limit = if n <= 10 { 1e-12 } else { 1e-8 };
                tally.record(rel(rec.d()[n], ser.d()[n]) / limit, || format!("b={b} xi={xi} n={n}"));
            }
        }
    }
    tally.finish()
}

/// `b = 1`: the series gives `d_0 = 1`, `d_n = 0`, and the one-term
/// expansion reproduces `x^a`.
pub fn b_one_suite(grid: Grid) -> SuiteReport {
    let (avals, xvals): (Vec<f64>, Vec<f64>) = match grid {
        Grid::Small => (vec![10.0, 1e2, 1e3], vec![0.1, 0.5, 0.9, 0.99, 1.0]),
        Grid::Full => (
            vec![10.0, 50.0, 1e2, 1e3, 1e4, 1e5],
            vec![1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999, 0.999_999, 1.0],
        ),
    };
    let mut tally = Tally::new("b-one-exactness", 1e-14);
    for &xi in &[0.0, 1e-3, 0.1, 0.7, 3.0] {
        match Abscissa::from_xi(xi).and_then(|p| d_series(1.0, &p, 20)) {
            Ok(t) => {
                tally.record((t.d()[0] - 1.0).abs(), || format!("d_0 at xi={xi}"));
                for n in 1..=20 {
                    tally.record(t.d()[n].abs(), || format!("d_{n} at xi={xi}"));
                }
            }
            Err(e) => tally.fail(format!("xi={xi}: {e}")),
        }
    }
    for &a in &avals {
        for &x in &xvals {
            match make_params(a, 1.0, x).and_then(|p| evaluate_fixed(&p, 1)) {
                Ok(r) => tally.record(rel(r.value, x.powf(a)), || format!("a={a} x={x}")),
                Err(e) => tally.fail(format!("a={a} x={x}: {e}")),
            }
        }
    }
    tally.finish()
}

pub struct CnGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub xi: Vec<f64>,
    pub n: Vec<usize>,
}

pub fn cn_grid(grid: Grid) -> CnGrid {
    match grid {
        Grid::Small => CnGrid {
            a: vec![10.0, 1e2],
            b: vec![0.7, 1.0, 2.5, 5.0],
            xi: vec![0.3, 1.0, 3.0],
            n: vec![0, 1, 2, 5],
        },
        Grid::Full => CnGrid {
            a: vec![1.0, 10.0, 1e2, 1e3],
            b: vec![0.3, 0.7, 1.0, 1.5, 2.5, 5.0, 9.0],
            xi: vec![0.05, 0.3, 1.0, 3.0, 10.0],
            n: vec![0, 1, 2, 5, 10],
        },
    }
}

/// Integration-by-parts identity for `c_n`, residual relative to its
/// left-hand side.
pub fn cn_recurrence_suite(grid: Grid) -> SuiteReport {
    let g = cn_grid(grid);
    let cfg = OracleConfig::default();
    let mut tally = Tally::new("cn-recurrence", 1e-9);
    for &a in &g.a {
        for &b in &g.b {
            for &xi in &g.xi {
                for &n in &g.n {
                    let at = || format!("a={a} b={b} xi={xi} n={n}");
                    match check_cn_recurrence(a, b, xi, n, &cfg) {
                        Ok(r) => tally.record(r, at),
                        Err(e) => tally.fail(format!("{}: {e}", at())),
                    }
                }
            }
        }
    }
    tally.finish()
}

/// `0 ≤ ξ c_n(a,b−1) ≤ c_n(a,b)`; the metric counts violations.
pub fn cn_inequality_suite(grid: Grid) -> SuiteReport {
    let g = cn_grid(grid);
    let cfg = OracleConfig::default();
    let mut tally = Tally::new("cn-inequality", 0.0);
    for &a in &g.a {
        for &b in &g.b {
            for &xi in &g.xi {
                for &n in &g.n {
                    let at = || format!("a={a} b={b} xi={xi} n={n}");
                    match check_cn_inequality(a, b, xi, n, &cfg) {
                        Ok(ok) => tally.record(if ok { 0.0 } else { 1.0 }, at),
                        Err(e) => tally.fail(format!("{}: {e}", at())),
                    }
                }
            }
        }
    }
    tally.finish()
}

/// The differential equation satisfied by the generating function.
pub fn ode_suite(grid: Grid) -> SuiteReport {
    let (bs, ts): (Vec<f64>, Vec<f64>) = match grid {
        Grid::Small => (vec![0.5, 2.0, 5.0], vec![0.1, 1.0, 3.0, 10.0]),
        Grid::Full => (
            vec![0.25, 0.5, 0.9, 1.1, 2.0, 3.5, 5.0, 10.0],
            vec![0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0],
        ),
    };
    let mut tally = Tally::new("ode-residual", 1e-8);
    for &b in &bs {
        for &t in &ts {
            match ode_residual(b, t) {
                Ok(r) => tally.record(r.abs(), || format!("b={b} t={t}")),
                Err(e) => tally.fail(format!("b={b} t={t}: {e}")),
            }
        }
    }
    tally.finish()
}

/// `I_x(a,b) + I_{1−x}(b,a) = 1` for the quadrature oracle.
pub fn symmetry_suite(grid: Grid) -> SuiteReport {
    let (vals, xs): (Vec<f64>, Vec<f64>) = match grid {
        Grid::Small => (vec![0.5, 2.0, 10.0, 50.0], vec![0.1, 0.5, 0.9]),
        Grid::Full => (
            vec![0.3, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0],
            vec![0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99],
        ),
    };
    let cfg = OracleConfig::default();
    let mut tally = Tally::new("oracle-symmetry", 1e-11);
    for &a in &vals {
        for &b in &vals {
            for &x in &xs {
                match symmetry_residual(a, b, x, &cfg) {
                    Ok(r) => tally.record(r.abs(), || format!("a={a} b={b} x={x}")),
                    Err(e) => tally.fail(format!("a={a} b={b} x={x}: {e}")),
                }
            }
        }
    }
    tally.finish()
}

/// The oracle is nondecreasing in `x` and stays in `[0, 1]`. The metric is
/// the largest decrease between neighbouring grid points (or excursion
/// outside `[0, 1]`).
pub fn monotonicity_suite(grid: Grid) -> SuiteReport {
    let cases: Vec<(f64, f64)> = match grid {
        Grid::Small => vec![(0.5, 2.0), (2.0, 0.5), (10.0, 10.0), (50.0, 2.5), (500.0, 2.5)],
        Grid::Full => vec![
            (0.5, 0.5),
            (0.5, 2.0),
            (2.0, 0.5),
            (10.0, 10.0),
            (50.0, 2.5),
            (500.0, 2.5),
            (1e4, 7.0),
        ],
    };
    let points = match grid {
        Grid::Small => 50,
        Grid::Full => 200,
    };
    let cfg = OracleConfig::default();
    let mut tally = Tally::new("oracle-monotonicity", 0.0);
    for (a, b) in cases {
        let xs: Vec<f64> = (1..=points).map(|i| i as f64 / points as f64).collect();
        let values: Result<Vec<f64>> = xs
            .iter()
            .map(|&x| make_params(a, b, x).and_then(|p| ibeta_quadrature(&p, &cfg)))
            .collect();
        match values {
            Ok(v) => {
                for i in 0..v.len() {
                    let outside = (-v[i]).max(v[i] - 1.0).max(0.0);
                    let drop = if i > 0 { (v[i - 1] - v[i]).max(0.0) } else { 0.0 };
                    tally.record(outside.max(drop), || format!("a={a} b={b} x={}", xs[i]));
                }
            }
            Err(e) => tally.fail(format!("a={a} b={b}: {e}")),
        }
    }
    tally.finish()
}

pub fn run_all(grid: Grid) -> Vec<SuiteReport> {
    vec![
        ratio_bound_suite(grid),
        f_cross_suite(grid),
        d_cross_suite(grid),
        b_one_suite(grid),
        cn_recurrence_suite(grid),
        cn_inequality_suite(grid),
        ode_suite(grid),
        symmetry_suite(grid),
        monotonicity_suite(grid),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_tracks_worst_and_failures() {
        let mut t = Tally::new("t", 1.0);
        t.record(0.5, || "a".into());
        t.record(2.0, || "b".into());
        t.record(f64::NAN, || "c".into());
        let r = t.finish();
        assert_eq!((r.checks, r.failures), (3, 2));
        assert!(r.worst.is_nan());
        assert_eq!(r.worst_at, "c");
        assert!(!r.passed);
    }

    #[test]
    fn small_ode_suite_passes() {
        assert!(ode_suite(Grid::Small).passed);
    }
}
