use std::sync::Arc;

use crate::error::{End, Error, Result};
use crate::geometry::{kernel_average, GroupGeometry};
use crate::quadrature::QuadratureConfig;
use crate::radial::{polar_table, DecreasingProfile, Radial, RadialProfile};
use crate::scalar::Real;

/// Which part of `I_α = J_α + S_α` a [`RieszProfile`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RieszPart {
    /// `J_α`: sources in `B(e, 2c₀ r(x))`.
    Near,
    /// `S_α`: sources outside `B(e, 2c₀ r(x))`.
    Far,
    Full,
    /// `S_α^*`: sources in `B(e, r(x)/(2c₀))`, the adjoint of `S_α`.
    FarAdjoint,
}

/// Constant pieces `[lo, hi)` of a piecewise-constant profile.
fn constant_pieces<T: Real>(f: &RadialProfile<T>) -> Vec<(T, T, T)> {
    let mut b = f.breakpoints();
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    b.dedup();
    let mut out = Vec::with_capacity(b.len() + 1);
    let mut lo = T::zero();
    for &hi in &b {
        let mid = if lo.is_zero() { hi / T::lit(2.0) } else { (lo * hi).sqrt() };
        out.push((lo, hi, f.value(mid)));
        lo = hi;
    }
    let last = if lo.is_zero() { T::one() } else { lo * T::lit(2.0) };
    out.push((lo, T::infinity(), f.value(last)));
    out
}

/// Halvings of `[0, 1]` towards `v = 0` in [`Engine::singular`].
const SINGULAR_PANELS: i32 = 20;

pub(crate) struct Engine<T: Real> {
    n: u32,
    sigma: T,
    c0: T,
    alpha: T,
    f: RadialProfile<T>,
    breaks: Vec<T>,
    pieces: Option<Vec<(T, T, T)>>,
    /// Flat start `f = v` on `(0, c)`, integrated in closed form on `ℝ¹`.
    head: Option<(T, T)>,
    cfg: QuadratureConfig<T>,
}

impl<T: Real> Engine<T> {
    pub(crate) fn new(geom: &GroupGeometry<T>, alpha: T, f: &RadialProfile<T>, cfg: &QuadratureConfig<T>) -> Result<Self> {
        let n = geom.require_euclidean()?;
        geom.check_order(alpha)?;
        f.validate()?;
        let mut breaks = f.breakpoints();
        breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        breaks.dedup();
        let pieces = (n == 1 && f.is_piecewise_constant()).then(|| constant_pieces(f));
        let head = if n == 1 && pieces.is_none() { f.constant_head() } else { None };
        Ok(Engine { n, sigma: geom.sigma_s, c0: geom.c0, alpha, f: f.clone(), breaks, pieces, head, cfg: cfg.clone() })
    }

    fn kernel(&self, t: T, s: T, d: T) -> T {
        kernel_average(self.n, self.sigma, t, s, d, self.alpha, &self.cfg)
    }

    fn density(&self, t: T, s: T, d: T) -> T {
        let v = self.f.value(s);
        if v.is_zero() {
            return T::zero();
        }
        let jac = if self.n == 1 { T::one() } else { s.powi(self.n as i32 - 1) };
        v * jac * self.kernel(t, s, d)
    }

    /// `∫_lo^hi f(s) s^{n-1} k(t, s) ds`.
    pub(crate) fn integral(&self, t: T, lo: T, hi: T) -> T {
        if !(hi > lo) {
            return T::zero();
        }
        if let Some(pieces) = &self.pieces {
            return self.integral_pieces(pieces, t, lo, hi);
        }
        if let Some((c, v)) = self.head {
            if lo < c {
                let flat = self.integral_pieces(&[(T::zero(), c, v)], t, lo, hi.min(c));
                return if hi > c { flat + self.integral(t, c, hi) } else { flat };
            }
        }
        let half = T::lit(0.5);
        let regular = |a: T, b: T| {
            if b > a {
                self.cfg.integrate_improper(&|s: T| self.density(t, s, (t - s).abs()), a, b, &self.breaks).value
            } else {
                T::zero()
            }
        };
        // near-diagonal band [t/2, 3t/2]; on ℝ¹ it is treated even when t is
        // an endpoint of, or just outside, [lo, hi]
        let (band_lo, band_hi) = ((t * half).max(lo), (t * T::lit(1.5)).min(hi));
        let interior = t > lo && t < hi;
        if !(band_hi > band_lo) || (self.n != 1 && !interior) {
            return regular(lo, hi);
        }
        let mut acc = regular(lo, band_lo) + regular(band_hi, hi);
        let left = t.min(band_hi);
        if left > band_lo {
            let ub: Vec<T> = self.breaks.iter().filter(|b| **b > band_lo && **b < left).map(|b| t - *b).collect();
            acc += self.singular(&|u: T| self.density(t, t - u, u), t - left, t - band_lo, &ub);
        }
        let right = t.max(band_lo);
        if band_hi > right {
            let ub: Vec<T> = self.breaks.iter().filter(|b| **b > right && **b < band_hi).map(|b| *b - t).collect();
            acc += self.singular(&|u: T| self.density(t, t + u, u), right - t, band_hi - t, &ub);
        }
        acc
    }

    /// `∫_from^to h(u) du` where `h(u) ~ u^{α−1}` at the diagonal `u = 0`.
    ///
    /// On `ℝ¹` the singularity is exactly `u^{α−1}`, removed by
    /// `u = to · v^{1/α}`; the `v`-integrand is then bounded and needs
    /// only a short geometric grading at `v = 0`.
    fn singular(&self, h: &dyn Fn(T) -> T, from: T, to: T, breaks: &[T]) -> T {
        if self.n != 1 {
            debug_assert!(from.is_zero(), "graded fallback starts at the diagonal");
            return self.cfg.integrate_graded(h, to, breaks).value;
        }
        let a = self.alpha;
        let inv = T::one() / a;
        let one_minus = T::one() - a;
        let g = |v: T| {
            let u = to * v.powf(inv);
            let x = h(u);
            if x.is_zero() {
                x
            } else {
                x * u.powf(one_minus)
            }
        };
        let v0 = (from / to).powf(a);
        let mut edges: Vec<T> = (0..=SINGULAR_PANELS).map(|k| T::lit(0.5).powi(k)).filter(|v| *v > v0).collect();
        edges.push(v0);
        edges.extend(breaks.iter().filter(|b| **b > from && **b < to).map(|b| (*b / to).powf(a)));
        edges.sort_by(|x, y| x.partial_cmp(y).expect("finite edges"));
        edges.dedup();
        let rule = self.cfg.rule();
        let body: T = edges.windows(2).map(|w| rule.integrate(&g, w[0], w[1])).fold(T::zero(), |x, y| x + y);
        to.powf(a) / a * body
    }

    /// Closed form on `ℝ¹` for piecewise-constant `f`.
    fn integral_pieces(&self, pieces: &[(T, T, T)], t: T, lo: T, hi: T) -> T {
        let a = self.alpha;
        // antiderivative of |t − s|^{α−1}
        let g = |s: T| {
            if s == T::infinity() {
                return T::infinity();
            }
            let d = s - t;
            let m = d.abs().powf(a) / a;
            if d < T::zero() {
                -m
            } else {
                m
            }
        };
        let h = |s: T| if s == T::infinity() { T::infinity() } else { (t + s).powf(a) / a };
        let mut acc = T::zero();
        for &(p, q, v) in pieces {
            let (x, y) = (p.max(lo), q.min(hi));
            if !(y > x) || v.is_zero() {
                continue;
            }
            if y == T::infinity() {
                return T::infinity();
            }
            acc += v * ((g(y) - g(x)) + (h(y) - h(x)));
        }
        acc
    }

    pub(crate) fn far_adjoint(&self, t: T) -> T {
        self.integral(t, T::zero(), t / (T::lit(2.0) * self.c0))
    }

    pub(crate) fn near(&self, t: T) -> T {
        self.integral(t, T::zero(), T::lit(2.0) * self.c0 * t)
    }

    pub(crate) fn far(&self, t: T) -> T {
        self.integral(t, T::lit(2.0) * self.c0 * t, T::infinity())
    }
}

/// `J_α f`, `S_α f` or `I_α f` on a Euclidean instance, evaluated on demand.
#[derive(Clone)]
pub struct RieszProfile<T: Real> {
    engine: Arc<Engine<T>>,
    part: RieszPart,
}

impl<T: Real> std::fmt::Debug for RieszProfile<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RieszProfile").field("part", &self.part).field("alpha", &self.engine.alpha).finish()
    }
}

impl<T: Real> RieszProfile<T> {
    pub fn part(&self) -> RieszPart {
        self.part
    }

    pub fn value(&self, t: T) -> T {
        match self.part {
            RieszPart::Near => self.engine.near(t),
            RieszPart::Far => self.engine.far(t),
            RieszPart::Full => self.engine.near(t) + self.engine.far(t),
            RieszPart::FarAdjoint => self.engine.far_adjoint(t),
        }
    }
}

impl<T: Real> Radial<T> for RieszProfile<T> {
    fn value(&self, t: T) -> T {
        RieszProfile::value(self, t)
    }
    fn breakpoints(&self) -> Vec<T> {
        let mut b = self.engine.breaks.clone();
        let scale = T::lit(2.0) * self.engine.c0;
        b.extend(self.engine.breaks.iter().map(|x| *x / scale));
        if self.part == RieszPart::FarAdjoint {
            b.extend(self.engine.breaks.iter().map(|x| *x * scale));
        }
        b
    }
}

fn check_origin<T: Real>(geom: &GroupGeometry<T>, f: &RadialProfile<T>, cfg: &QuadratureConfig<T>) -> Result<()> {
    let g = f.clone();
    let table = polar_table(geom, move |s| g.value(s), &f.breakpoints(), cfg);
    let head = table.head();
    if head.is_divergent() {
        return Err(Error::Divergent { end: End::Origin, exponent: head.exponent.as_f64(), partial: f64::INFINITY });
    }
    Ok(())
}

fn check_infinity<T: Real>(alpha: T, f: &RadialProfile<T>, cfg: &QuadratureConfig<T>) -> Result<()> {
    let g = f.clone();
    let am1 = alpha - T::one();
    let table = crate::quadrature::CumulativeTable::from_fn(
        move |s: T| {
            let v = g.value(s);
            if v.is_zero() {
                T::zero()
            } else {
                v * s.powf(am1)
            }
        },
        &f.breakpoints(),
        cfg,
    );
    let tail = table.tail();
    if tail.is_divergent() {
        return Err(Error::Divergent { end: End::Infinity, exponent: tail.exponent.as_f64(), partial: f64::INFINITY });
    }
    Ok(())
}

fn build<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &RadialProfile<T>,
    part: RieszPart,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    let engine = Engine::new(geom, alpha, f, cfg)?;
    if matches!(part, RieszPart::Near | RieszPart::Full | RieszPart::FarAdjoint) {
        check_origin(geom, f, cfg)?;
    }
    if matches!(part, RieszPart::Far | RieszPart::Full) {
        check_infinity(alpha, f, cfg)?;
    }
    Ok(RieszProfile { engine: Arc::new(engine), part })
}

/// `(J_α f)(x) = ∫_{B(e, 2c₀ r(x))} f(y) r(xy⁻¹)^{α−Q} dy`.
pub fn riesz_near<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &DecreasingProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    build(geom, alpha, f.profile(), RieszPart::Near, cfg)
}

/// `(S_α f)(x) = ∫_{G∖B(e, 2c₀ r(x))} f(y) r(xy⁻¹)^{α−Q} dy`.
pub fn riesz_far<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    build(geom, alpha, f, RieszPart::Far, cfg)
}

/// `(S_α^* g)(x) = ∫_{B(e, r(x)/(2c₀))} g(y) r(xy⁻¹)^{α−Q} dy`.
pub fn riesz_far_adjoint<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    g: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    build(geom, alpha, g, RieszPart::FarAdjoint, cfg)
}

/// `I_α f = J_α f + S_α f`.
pub fn riesz_full<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    build(geom, alpha, f, RieszPart::Full, cfg)
}

/// Near or far piece of a possibly non-monotone profile, used per axis by
/// the product operators.
pub(crate) fn riesz_part<T: Real>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &RadialProfile<T>,
    part: RieszPart,
    cfg: &QuadratureConfig<T>,
) -> Result<RieszProfile<T>> {
    build(geom, alpha, f, part, cfg)
}
