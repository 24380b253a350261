use rayon::prelude::*;

use crate::quadrature::{CumulativeTable, Finiteness};
use crate::radial::{log_grid, QuadrantTable, Region};
use crate::scalar::{mul0, pow_ext, Real};

use super::{Argmax, ConditionReport, ScanConfig, TailDiagnostics};

/// Slope per decade above which an end counts as growing.
const GROWTH: f64 = 0.02;
/// Slope per decade below which an end counts as flat.
const FLAT: f64 = 1e-6;
const GOLDEN_STEPS: usize = 48;
const COORDINATE_ROUNDS: usize = 4;

/// One factor `(∫_{E(scale·t)} g)^exponent` of a supremum functional, or a
/// bare power `t^exponent`.
pub(crate) struct Factor<T: Real> {
    pub label: String,
    pub kind: FactorKind<T>,
    pub exponent: T,
}

pub(crate) enum FactorKind<T: Real> {
    Table { table: CumulativeTable<T>, region: Region, scale: T, breaks: Vec<T> },
    Power,
}

impl<T: Real> Factor<T> {
    pub fn table(label: impl Into<String>, table: CumulativeTable<T>, region: Region, exponent: T, breaks: Vec<T>) -> Self {
        Factor { label: label.into(), kind: FactorKind::Table { table, region, scale: T::one(), breaks }, exponent }
    }

    pub fn power(label: impl Into<String>, exponent: T) -> Self {
        Factor { label: label.into(), kind: FactorKind::Power, exponent }
    }

    pub fn at_scale(mut self, s: T) -> Self {
        if let FactorKind::Table { scale, .. } = &mut self.kind {
            *scale = s;
        }
        self
    }

    pub fn base(&self, t: T) -> T {
        match &self.kind {
            FactorKind::Table { table, region, scale, .. } => match region {
                Region::Ball => table.below(*scale * t),
                Region::Complement => table.above(*scale * t),
            },
            FactorKind::Power => t,
        }
    }

    pub fn value(&self, t: T) -> T {
        pow_ext(self.base(t), self.exponent)
    }

    /// Radii in `t` where the factor has kinks.
    pub fn kinks(&self) -> Vec<T> {
        match &self.kind {
            FactorKind::Table { scale, breaks, .. } => breaks.iter().map(|b| *b / *scale).collect(),
            FactorKind::Power => Vec::new(),
        }
    }

    fn explain(&self, t: T) -> String {
        let base = self.base(t);
        if base.is_infinite() {
            let side = match &self.kind {
                FactorKind::Table { table, .. } if table.head().is_divergent() => " (not integrable at the origin)",
                FactorKind::Table { table, .. } if table.tail().is_divergent() => " (not integrable at infinity)",
                _ => "",
            };
            format!("{} diverges at t={}{side}", self.label, t.as_f64())
        } else {
            format!("{} vanishes at t={} under a negative power", self.label, t.as_f64())
        }
    }
}

/// `Π factors(t)` with `0 · ∞ = 0`.
pub(crate) struct Product1<T: Real> {
    pub factors: Vec<Factor<T>>,
}

impl<T: Real> Product1<T> {
    pub fn eval(&self, t: T) -> T {
        let mut acc = T::one();
        for f in &self.factors {
            let v = f.value(t);
            if v.is_zero() {
                return T::zero();
            }
            acc = mul0(acc, v);
        }
        acc
    }

    fn kinks(&self) -> Vec<T> {
        self.factors.iter().flat_map(|f| f.kinks()).collect()
    }

    fn explain(&self, t: T) -> String {
        self.factors
            .iter()
            .find(|f| f.value(t).is_infinite())
            .map(|f| f.explain(t))
            .unwrap_or_else(|| format!("condition is infinite at t={}", t.as_f64()))
    }
}

/// Factor of a two-variable functional.
pub(crate) enum Factor2<T: Real> {
    First(Factor<T>),
    Second(Factor<T>),
    Quadrant { label: String, table: QuadrantTable<T>, regions: (Region, Region), exponent: T, kinks: (Vec<T>, Vec<T>) },
}

impl<T: Real> Factor2<T> {
    fn value(&self, t: T, tau: T) -> T {
        match self {
            Factor2::First(f) => f.value(t),
            Factor2::Second(f) => f.value(tau),
            Factor2::Quadrant { table, regions, exponent, .. } => {
                pow_ext(table.integral(t, regions.0, tau, regions.1), *exponent)
            }
        }
    }

    fn label(&self) -> &str {
        match self {
            Factor2::First(f) | Factor2::Second(f) => &f.label,
            Factor2::Quadrant { label, .. } => label,
        }
    }
}

pub(crate) struct Product2<T: Real> {
    pub factors: Vec<Factor2<T>>,
}

impl<T: Real> Product2<T> {
    pub fn eval(&self, t: T, tau: T) -> T {
        let mut acc = T::one();
        for f in &self.factors {
            let v = f.value(t, tau);
            if v.is_zero() {
                return T::zero();
            }
            acc = mul0(acc, v);
        }
        acc
    }

    fn kinks(&self) -> (Vec<T>, Vec<T>) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for f in &self.factors {
            match f {
                Factor2::First(f) => a.extend(f.kinks()),
                Factor2::Second(f) => b.extend(f.kinks()),
                Factor2::Quadrant { kinks, .. } => {
                    a.extend_from_slice(&kinks.0);
                    b.extend_from_slice(&kinks.1);
                }
            }
        }
        (a, b)
    }

    fn explain(&self, t: T, tau: T) -> String {
        self.factors
            .iter()
            .find(|f| f.value(t, tau).is_infinite())
            .map(|f| match f {
                Factor2::First(g) => g.explain(t),
                Factor2::Second(g) => g.explain(tau),
                Factor2::Quadrant { .. } => {
                    format!("{} diverges at (t, τ)=({}, {})", f.label(), t.as_f64(), tau.as_f64())
                }
            })
            .unwrap_or_else(|| format!("condition is infinite at (t, τ)=({}, {})", t.as_f64(), tau.as_f64()))
    }
}

/// Scan grid on `[t_min, t_max]` with the kinks inside the range added.
pub(crate) fn scan_grid<T: Real>(lo: T, hi: T, points: usize, kinks: &[T]) -> Vec<T> {
    let mut g = log_grid(lo, hi, points.max(2));
    g.extend(kinks.iter().copied().filter(|k| k.is_finite() && *k > lo && *k < hi));
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite scan grid"));
    g.dedup();
    g
}

fn golden<T: Real, F: Fn(T) -> T>(phi: F, mut a: T, mut b: T) -> (T, T) {
    let g = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// First index of the maximum; NaN never wins.
fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] || v[best].is_nan() {
            best = i;
        }
    }
    best
}

/// Verdict for one end from values at four points spaced one decade apart,
/// `f[0]` outermost. Returns the verdict and the outermost slope of
/// `log₁₀ f` per decade, measured moving outwards.
pub(crate) fn end_verdict<T: Real>(f: [T; 4]) -> (Finiteness, f64) {
    let v: Vec<f64> = f.iter().map(|x| x.as_f64()).collect();
    if v[0] == 0.0 {
        return (Finiteness::Finite, f64::NEG_INFINITY);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return (Finiteness::Infinite, f64::INFINITY);
    }
    if v[1] == 0.0 {
        return (Finiteness::Indeterminate, f64::NAN);
    }
    let slope = |i: usize| (v[i] / v[i + 1]).log10();
    let s3 = slope(0);
    if s3 >= GROWTH {
        return (Finiteness::Infinite, s3);
    }
    if s3 <= FLAT {
        return (Finiteness::Finite, s3);
    }
    if v[2] > 0.0 && v[3] > 0.0 && s3 <= slope(2) / 2.0 {
        return (Finiteness::Finite, s3);
    }
    (Finiteness::Indeterminate, s3)
}

fn combine(a: Finiteness, b: Finiteness) -> Finiteness {
    use Finiteness::*;
    match (a, b) {
        (Infinite, _) | (_, Infinite) => Infinite,
        (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
        _ => Finite,
    }
}

fn ends<T: Real>(scan: &ScanConfig<T>) -> ([T; 4], [T; 4]) {
    let span = (scan.t_max / scan.t_min).log10();
    let step = T::lit(10f64.powf((span.as_f64() / 8.0).min(1.0)));
    let lo = [scan.t_min, scan.t_min * step, scan.t_min * step * step, scan.t_min * step * step * step];
    let hi = [scan.t_max, scan.t_max / step, scan.t_max / (step * step), scan.t_max / (step * step * step)];
    (lo, hi)
}

fn regime_text(which: &str, slope: f64) -> String {
    if slope.is_finite() {
        format!("grows like t^{slope:.3} as t → {which}")
    } else {
        format!("grows without bound as t → {which}")
    }
}

/// Supremum of `f` over the scan range with golden-section refinement and
/// end-growth verdicts.
pub(crate) fn scan_1d<T: Real>(
    id: &str,
    f: &(dyn Fn(T) -> T + Sync),
    kinks: &[T],
    explain: &(dyn Fn(T) -> String + Sync),
    scan: &ScanConfig<T>,
) -> ConditionReport<T> {
    let grid = scan_grid(scan.t_min, scan.t_max, scan.points, kinks);
    let values: Vec<T> = grid.par_iter().map(|&t| f(t)).collect();
    let series: Vec<[T; 2]> = grid.iter().zip(&values).map(|(t, v)| [*t, *v]).collect();
    if let Some(i) = values.iter().position(|v| v.is_infinite() || v.is_nan()) {
        return ConditionReport {
            id: id.to_string(),
            value: T::infinity(),
            argmax: Argmax::Radius(grid[i]),
            finite: Finiteness::Infinite,
            tail_diagnostics: TailDiagnostics {
                growth_at_zero: f64::NAN,
                growth_at_infinity: f64::NAN,
                scanned_sup: f64::INFINITY,
                regime: Some(explain(grid[i])),
            },
            note: None,
            hypothesis_verified: None,
            scan: series,
        };
    }
    let i = argmax(&values);
    let (mut best_t, mut best) = (grid[i], values[i]);
    if scan.refine && grid.len() > 2 {
        let a = grid[i.saturating_sub(1)].ln();
        let b = grid[(i + 1).min(grid.len() - 1)].ln();
        let (x, v) = golden(|x: T| f(x.exp()), a, b);
        if v > best {
            best = v;
            best_t = x.exp();
        }
    }
    let (lo, hi) = ends(scan);
    let (v0, g0) = end_verdict(lo.map(|t| f(t)));
    let (v1, g1) = end_verdict(hi.map(|t| f(t)));
    let finite = combine(v0, v1);
    let regime = match (v0, v1) {
        (Finiteness::Infinite, _) => Some(regime_text("0", g0)),
        (_, Finiteness::Infinite) => Some(regime_text("∞", g1)),
        _ => None,
    };
    ConditionReport {
        id: id.to_string(),
        value: if finite == Finiteness::Infinite { T::infinity() } else { best },
        argmax: Argmax::Radius(best_t),
        finite,
        tail_diagnostics: TailDiagnostics {
            growth_at_zero: g0,
            growth_at_infinity: g1,
            scanned_sup: best.as_f64(),
            regime,
        },
        note: None,
        hypothesis_verified: None,
        scan: series,
    }
}

pub(crate) fn scan_product_1d<T: Real>(id: &str, p: &Product1<T>, scan: &ScanConfig<T>) -> ConditionReport<T> {
    scan_1d(id, &|t| p.eval(t), &p.kinks(), &|t| p.explain(t), scan)
}

/// Supremum over `(t, τ)` on the tensor scan grid with coordinate-wise
/// golden-section refinement. End verdicts use the row and column maxima.
pub(crate) fn scan_2d<T: Real>(id: &str, p: &Product2<T>, scan: &ScanConfig<T>) -> ConditionReport<T> {
    let (k1, k2) = p.kinks();
    let g1 = scan_grid(scan.t_min, scan.t_max, scan.points_2d, &k1);
    let g2 = scan_grid(scan.t_min, scan.t_max, scan.points_2d, &k2);
    let n2 = g2.len();
    let values: Vec<T> = (0..g1.len() * n2).into_par_iter().map(|k| p.eval(g1[k / n2], g2[k % n2])).collect();
    if let Some(k) = values.iter().position(|v| v.is_infinite() || v.is_nan()) {
        let (t, tau) = (g1[k / n2], g2[k % n2]);
        return ConditionReport {
            id: id.to_string(),
            value: T::infinity(),
            argmax: Argmax::Pair(t, tau),
            finite: Finiteness::Infinite,
            tail_diagnostics: TailDiagnostics {
                growth_at_zero: f64::NAN,
                growth_at_infinity: f64::NAN,
                scanned_sup: f64::INFINITY,
                regime: Some(p.explain(t, tau)),
            },
            note: None,
            hypothesis_verified: None,
            scan: Vec::new(),
        };
    }
    let k = argmax(&values);
    let (i, j) = (k / n2, k % n2);
    let (mut t, mut tau, mut best) = (g1[i], g2[j], values[k]);
    if scan.refine {
        let spread = |g: &[T], i: usize| (g[i.saturating_sub(1)].ln() - g[i].ln(), g[(i + 1).min(g.len() - 1)].ln() - g[i].ln());
        let (d1, d2) = (spread(&g1, i), spread(&g2, j));
        for _ in 0..COORDINATE_ROUNDS {
            let c = t.ln();
            let (x, v) = golden(|x: T| p.eval(x.exp(), tau), c + d1.0, c + d1.1);
            if v > best {
                best = v;
                t = x.exp();
            }
            let c = tau.ln();
            let (x, v) = golden(|x: T| p.eval(t, x.exp()), c + d2.0, c + d2.1);
            if v > best {
                best = v;
                tau = x.exp();
            }
        }
    }
    let (lo, hi) = ends(scan);
    let row = |t: T| g2.iter().map(|&s| p.eval(t, s)).fold(T::zero(), |a, b| if b > a || b.is_nan() { b } else { a });
    let col = |s: T| g1.iter().map(|&t| p.eval(t, s)).fold(T::zero(), |a, b| if b > a || b.is_nan() { b } else { a });
    let verdicts = [
        end_verdict(lo.map(|x| row(x))),
        end_verdict(hi.map(|x| row(x))),
        end_verdict(lo.map(|x| col(x))),
        end_verdict(hi.map(|x| col(x))),
    ];
    let finite = verdicts.iter().fold(Finiteness::Finite, |acc, v| combine(acc, v.0));
    let names = ["t → 0", "t → ∞", "τ → 0", "τ → ∞"];
    let regime = verdicts.iter().zip(names).find(|(v, _)| v.0 == Finiteness::Infinite).map(|(v, n)| {
        if v.1.is_finite() {
            format!("row/column supremum grows with slope {:.3} per decade as {n}", v.1)
        } else {
            format!("grows without bound as {n}")
        }
    });
    let max_slope = |a: f64, b: f64| if a.is_nan() { b } else if b.is_nan() { a } else { a.max(b) };
    ConditionReport {
        id: id.to_string(),
        value: if finite == Finiteness::Infinite { T::infinity() } else { best },
        argmax: Argmax::Pair(t, tau),
        finite,
        tail_diagnostics: TailDiagnostics {
            growth_at_zero: max_slope(verdicts[0].1, verdicts[2].1),
            growth_at_infinity: max_slope(verdicts[1].1, verdicts[3].1),
            scanned_sup: best.as_f64(),
            regime,
        },
        note: None,
        hypothesis_verified: None,
        scan: Vec::new(),
    }
}
