//! Direct quadrature of the defining integrals on `ℝ¹`, `ℝ²` and
//! `ℝ¹ × ℝ¹`, independent of the radial reduction used elsewhere.
//!
//! Lines are cut at every kink of the integrand, segments touching the
//! kernel singularity are integrated after the exact substitution
//! `z = h u^{1/(β+1)}`, segments touching an origin singularity of `f`
//! after `y = h u⁸`, and infinite tails in the variable `ln y`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{GroupGeometry, ProductGeometry};
use crate::operators::RieszPiece;
use crate::quadrature::GaussLegendre;
use crate::radial::{BiRadial, RadialProfile, Region};
use crate::scalar::Real;

use super::ratio::{OperatorSpec, ProductOperatorSpec};

const REL_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 24;
const ORIGIN_POWER: f64 = 8.0;

struct Rules<T> {
    coarse: GaussLegendre<T>,
    fine: GaussLegendre<T>,
}

impl<T: Real> Rules<T> {
    fn new() -> Self {
        Rules { coarse: GaussLegendre::new(10), fine: GaussLegendre::new(21) }
    }

    fn adapt(&self, f: &dyn Fn(T) -> T, a: T, b: T, floor: T, depth: u32) -> T {
        let c1 = self.coarse.integrate(f, a, b);
        let c2 = self.fine.integrate(f, a, b);
        if depth == 0 || (c1 - c2).abs() <= T::lit(REL_TOL) * c2.abs() + floor || !c2.is_finite() {
            return c2;
        }
        let m = (a + b) / T::lit(2.0);
        self.adapt(f, a, m, floor / T::lit(2.0), depth - 1) + self.adapt(f, m, b, floor / T::lit(2.0), depth - 1)
    }

    fn integrate(&self, f: &dyn Fn(T) -> T, a: T, b: T) -> T {
        if !(b > a) {
            return T::zero();
        }
        let rough = self.fine.integrate(f, a, b).abs();
        self.adapt(f, a, b, rough * T::lit(1e-15), MAX_DEPTH)
    }

    /// `∫_Y^∞ f` as `∫_0^∞ f(Y e^s) Y e^s ds` in growing chunks.
    fn tail(&self, f: &dyn Fn(T) -> T, y0: T) -> T {
        let g = |s: T| {
            let y = y0 * s.exp();
            let v = f(y);
            if v.is_zero() {
                T::zero()
            } else {
                v * y
            }
        };
        let (mut s, mut len, mut sum) = (T::zero(), T::one(), T::zero());
        for k in 0..200 {
            let c = self.integrate(&g, s, s + len);
            sum += c;
            s += len;
            if k >= 3 && c.abs() <= T::lit(1e-17) * sum.abs() {
                break;
            }
            if s > T::lit(600.0) || !sum.is_finite() {
                break;
            }
            if k % 4 == 3 {
                len = len * T::lit(2.0);
            }
        }
        sum
    }
}

/// `|x − y|^β` singularity on a line.
#[derive(Clone, Copy)]
struct Kernel<T> {
    x: T,
    beta: T,
}

/// `∫_lo^hi g(y) |x − y|^β dy` with `g` smooth between consecutive `cuts`.
fn line<T: Real>(rules: &Rules<T>, g: &dyn Fn(T) -> T, kernel: Option<Kernel<T>>, lo: T, hi: T, cuts: &[T], origin: bool) -> T {
    if !(hi > lo) {
        return T::zero();
    }
    let full = |y: T| {
        let v = g(y);
        match kernel {
            Some(k) if !v.is_zero() => v * (k.x - y).abs().powf(k.beta),
            _ => v,
        }
    };
    let mut pts: Vec<T> = cuts.iter().copied().filter(|c| c.is_finite() && *c > lo && *c < hi).collect();
    if let Some(k) = kernel {
        if k.x > lo && k.x < hi {
            pts.push(k.x);
        }
    }
    if T::zero() > lo && T::zero() < hi {
        pts.push(T::zero());
    }
    if lo.is_finite() {
        pts.push(lo);
    }
    if hi.is_finite() {
        pts.push(hi);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut points"));
    pts.dedup();
    let mut sum = T::zero();
    if pts.is_empty() {
        pts.push(T::zero());
    }
    if lo.is_infinite() {
        let p0 = pts[0];
        // tails start clear of every cut, the kernel point included
        let start = T::lit(2.0) * T::one().max(p0.abs());
        sum += rules.tail(&|y: T| full(-y), start);
        pts.insert(0, -start);
    }
    if hi.is_infinite() {
        let pn = pts[pts.len() - 1];
        let start = T::lit(2.0) * T::one().max(pn.abs());
        sum += rules.tail(&full, start);
        pts.push(start);
    }
    for w in pts.windows(2) {
        sum += segment(rules, g, &full, kernel, w[0], w[1], origin);
    }
    sum
}

#[derive(Clone, Copy, PartialEq)]
enum End {
    Smooth,
    Kernel,
    Origin,
}

fn segment<T: Real>(
    rules: &Rules<T>,
    g: &dyn Fn(T) -> T,
    full: &dyn Fn(T) -> T,
    kernel: Option<Kernel<T>>,
    a: T,
    b: T,
    origin: bool,
) -> T {
    let kind = |e: T| match kernel {
        Some(k) if k.x == e => End::Kernel,
        _ if origin && e.is_zero() => End::Origin,
        _ => End::Smooth,
    };
    let (ka, kb) = (kind(a), kind(b));
    if ka != End::Smooth && kb != End::Smooth {
        let m = (a + b) / T::lit(2.0);
        return segment(rules, g, full, kernel, a, m, origin) + segment(rules, g, full, kernel, m, b, origin);
    }
    let h = b - a;
    let (end, sign, kd) = if ka != End::Smooth { (a, T::one(), ka) } else { (b, -T::one(), kb) };
    match kd {
        End::Smooth => rules.integrate(full, a, b),
        End::Kernel => {
            let beta = kernel.expect("kernel end").beta;
            let e1 = beta + T::one();
            let inv = T::one() / e1;
            let f = |u: T| g(end + sign * h * u.powf(inv));
            h.powf(e1) / e1 * rules.integrate(&f, T::zero(), T::one())
        }
        End::Origin => {
            let m = T::lit(ORIGIN_POWER);
            let f = |u: T| {
                let v = full(end + sign * h * u.powf(m));
                if v.is_zero() {
                    T::zero()
                } else {
                    v * m * h * u.powf(m - T::one())
                }
            };
            rules.integrate(&f, T::zero(), T::one())
        }
    }
}

fn origin_singular<T: Real>(f: &RadialProfile<T>) -> bool {
    let small = T::lit(1e-12);
    let v = f.value(small);
    !v.is_finite() || v > f.value(T::lit(1e-6)) * T::lit(1.0 + 1e-9)
}

/// Radial breakpoints mirrored onto the line.
fn mirrored<T: Real>(b: &[T]) -> Vec<T> {
    b.iter().filter(|x| x.is_finite() && **x > T::zero()).flat_map(|x| [*x, -*x]).collect()
}

/// Which radii `|y|` an operator integrates over at probe radius `t`.
#[derive(Clone, Copy)]
enum Domain<T> {
    All,
    Inside(T),
    Outside(T),
}

impl<T: Real> Domain<T> {
    fn contains(&self, s: T) -> bool {
        match *self {
            Domain::All => true,
            Domain::Inside(r) => s < r,
            Domain::Outside(r) => s >= r,
        }
    }

    fn radius(&self) -> Option<T> {
        match *self {
            Domain::All => None,
            Domain::Inside(r) | Domain::Outside(r) => Some(r),
        }
    }
}

/// `(domain, kernel order)`: `None` order means no kernel.
fn single_setup<T: Real>(op: &OperatorSpec<T>, t: T, c0: T) -> (Domain<T>, Option<T>, T) {
    let two = T::lit(2.0);
    match *op {
        OperatorSpec::Hardy { a } => (Domain::Inside(a * t), None, T::one()),
        OperatorSpec::HardyTail { a } => (Domain::Outside(a * t), None, T::one()),
        // H_α f(t) = t^{α−Q} H f(t); Q is applied by the caller
        OperatorSpec::WeightedHardy { alpha } => (Domain::Inside(t), None, alpha),
        OperatorSpec::RieszNear { alpha } => (Domain::Inside(two * c0 * t), Some(alpha), T::one()),
        OperatorSpec::RieszFar { alpha } => (Domain::Outside(two * c0 * t), Some(alpha), T::one()),
        OperatorSpec::Riesz { alpha } => (Domain::All, Some(alpha), T::one()),
    }
}

fn on_line<T: Real>(rules: &Rules<T>, f: &RadialProfile<T>, domain: Domain<T>, kernel: Option<Kernel<T>>) -> T {
    let mut radii = f.breakpoints();
    radii.extend(domain.radius());
    let cuts = mirrored(&radii);
    let g = |y: T| {
        let s = y.abs();
        if domain.contains(s) {
            f.value(s)
        } else {
            T::zero()
        }
    };
    let (lo, hi) = match domain {
        Domain::Inside(r) => (-r, r),
        _ => (T::neg_infinity(), T::infinity()),
    };
    line(rules, &g, kernel, lo, hi, &cuts, origin_singular(f))
}

/// `I_α f(x)` on `ℝ²` for `|x| = t`, in polar coordinates `(ρ, θ)`
/// centred at `x`.
fn riesz_plane<T: Real>(rules: &Rules<T>, f: &RadialProfile<T>, domain: Domain<T>, alpha: T, t: T) -> T {
    let mut radii: Vec<T> = f.breakpoints().into_iter().filter(|b| b.is_finite() && *b > T::zero()).collect();
    radii.extend(domain.radius());
    let (two, pi) = (T::lit(2.0), T::lit(std::f64::consts::PI));
    let angular = |rho: T| {
        if rho.is_zero() {
            return if domain.contains(t) { two * pi * f.value(t) } else { T::zero() };
        }
        let mut cuts = vec![T::zero(), pi];
        for &b in &radii {
            let c = (b * b - t * t - rho * rho) / (two * t * rho);
            if c > -T::one() && c < T::one() {
                cuts.push(c.acos());
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
        cuts.dedup();
        let g = |th: T| {
            let s = (t * t + rho * rho + two * t * rho * th.cos()).max(T::zero()).sqrt();
            if domain.contains(s) && s > T::zero() {
                f.value(s)
            } else {
                T::zero()
            }
        };
        two * cuts.windows(2).map(|w| rules.integrate(&g, w[0], w[1])).fold(T::zero(), |a, b| a + b)
    };
    let mut rho_cuts: Vec<T> = radii.iter().flat_map(|b| [(*b - t).abs(), *b + t]).collect();
    rho_cuts.push(t);
    rho_cuts.retain(|r| *r > T::zero() && r.is_finite());
    rho_cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    rho_cuts.dedup();
    let mut sum = T::zero();
    // ∫_0^R ρ^{α−1} A(ρ) dρ = (1/α) ∫_0^{R^α} A(u^{1/α}) du
    let inv = T::one() / alpha;
    let at_u = |u: T| angular(u.powf(inv));
    let mut prev = T::zero();
    for &r in &rho_cuts {
        sum += rules.integrate(&at_u, prev, r.powf(alpha)) * inv;
        prev = r.powf(alpha);
    }
    let last = *rho_cuts.last().unwrap_or(&t);
    let bounded = matches!(domain, Domain::Inside(_)) || f.value(last * T::lit(1.5)).is_zero();
    if !bounded {
        sum += rules.tail(&|rho: T| rho.powf(alpha - T::one()) * angular(rho), last);
    }
    sum
}

/// Reference values of `(T f)(x)` at radii `probes`, by direct quadrature
/// of the defining integral on `ℝ¹` or `ℝ²`.
///
/// Probes that are not positive and finite, or where the integral is not
/// finite, come back as `None`.
pub fn brute_force_oracle<T: Real>(
    geom: &GroupGeometry<T>,
    op: &OperatorSpec<T>,
    f: &RadialProfile<T>,
    probes: &[T],
) -> Result<Vec<Option<T>>> {
    let n = match geom.euclidean_dim {
        Some(n @ 1..=2) => n,
        _ => return Err(Error::Unsupported("the brute-force oracle needs ℝ¹ or ℝ²".into())),
    };
    f.validate()?;
    let rules = Rules::new();
    let out = probes
        .par_iter()
        .map(|&t| {
            if !(t > T::zero()) || !t.is_finite() {
                return None;
            }
            let (domain, order, h_alpha) = single_setup(op, t, geom.c0);
            let v = match (n, order) {
                (1, Some(alpha)) => on_line(&rules, f, domain, Some(Kernel { x: t, beta: alpha - T::one() })),
                (2, Some(alpha)) => riesz_plane(&rules, f, domain, alpha, t),
                (_, None) => {
                    let raw = if n == 1 {
                        on_line(&rules, f, domain, None)
                    } else {
                        hardy_plane(&rules, f, domain)
                    };
                    if matches!(op, OperatorSpec::WeightedHardy { .. }) {
                        raw * t.powf(h_alpha - geom.q)
                    } else {
                        raw
                    }
                }
                _ => unreachable!(),
            };
            Some(v).filter(|v| v.is_finite())
        })
        .collect();
    Ok(out)
}

/// `∫_{domain} f` on `ℝ²` in polar coordinates.
fn hardy_plane<T: Real>(rules: &Rules<T>, f: &RadialProfile<T>, domain: Domain<T>) -> T {
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let mut radii = f.breakpoints();
    radii.extend(domain.radius());
    let g = |s: T| if domain.contains(s) { two_pi * s * f.value(s) } else { T::zero() };
    let (lo, hi) = match domain {
        Domain::Inside(r) => (T::zero(), r),
        Domain::Outside(r) => (r, T::infinity()),
        Domain::All => (T::zero(), T::infinity()),
    };
    line(rules, &g, None, lo, hi, &radii, origin_singular(f))
}

/// Per-axis domain and kernel order of a product operator.
fn product_setup<T: Real>(op: &ProductOperatorSpec<T>, t: T, tau: T) -> [(Domain<T>, Option<T>); 2] {
    let two = T::lit(2.0);
    let riesz = |near: bool, r: T, alpha: T| {
        (if near { Domain::Inside(two * r) } else { Domain::Outside(two * r) }, Some(alpha))
    };
    match *op {
        ProductOperatorSpec::Riesz { alpha1, alpha2 } => [(Domain::All, Some(alpha1)), (Domain::All, Some(alpha2))],
        ProductOperatorSpec::RieszPiece { alpha1, alpha2, piece } => {
            let (n1, n2) = match piece {
                RieszPiece::JJ => (true, true),
                RieszPiece::JS => (true, false),
                RieszPiece::SJ => (false, true),
                RieszPiece::SS => (false, false),
            };
            [riesz(n1, t, alpha1), riesz(n2, tau, alpha2)]
        }
        ProductOperatorSpec::Hardy { a, b, variant } => {
            let d = |r: Region, x: T| match r {
                Region::Ball => Domain::Inside(x),
                Region::Complement => Domain::Outside(x),
            };
            let (r1, r2) = variant.regions();
            [(d(r1, a * t), None), (d(r2, b * tau), None)]
        }
    }
}

/// Reference values of a product operator applied to `f` at radius pairs,
/// by iterated direct quadrature over `ℝ¹ × ℝ¹`.
pub fn brute_force_oracle_product<T: Real>(
    geom: &ProductGeometry<T>,
    op: &ProductOperatorSpec<T>,
    f: &BiRadial<T>,
    probes: &[(T, T)],
) -> Result<Vec<Option<T>>> {
    if geom.g1.euclidean_dim != Some(1) || geom.g2.euclidean_dim != Some(1) {
        return Err(Error::Unsupported("the product oracle needs ℝ¹ × ℝ¹".into()));
    }
    f.validate()?;
    let rules = Rules::new();
    let (b1, b2) = f.breakpoints();
    let out = probes
        .par_iter()
        .map(|&(t, tau)| {
            if !(t > T::zero() && tau > T::zero()) || !(t.is_finite() && tau.is_finite()) {
                return None;
            }
            let [(d1, o1), (d2, o2)] = product_setup(op, t, tau);
            let k1 = o1.map(|a| Kernel { x: t, beta: a - T::one() });
            let k2 = o2.map(|a| Kernel { x: tau, beta: a - T::one() });
            let span = |d: Domain<T>| match d {
                Domain::Inside(r) => (-r, r),
                _ => (T::neg_infinity(), T::infinity()),
            };
            let mut r1 = b1.clone();
            r1.extend(d1.radius());
            let mut r2 = b2.clone();
            r2.extend(d2.radius());
            let (c1, c2) = (mirrored(&r1), mirrored(&r2));
            let inner = |y1: T| {
                let s1 = y1.abs();
                if !d1.contains(s1) {
                    return T::zero();
                }
                let g = |y2: T| {
                    let s2 = y2.abs();
                    if d2.contains(s2) {
                        f.value(s1, s2)
                    } else {
                        T::zero()
                    }
                };
                let (lo, hi) = span(d2);
                line(&rules, &g, k2, lo, hi, &c2, false)
            };
            let (lo, hi) = span(d1);
            let v = line(&rules, &inner, k1, lo, hi, &c1, false);
            Some(v).filter(|v| v.is_finite())
        })
        .collect();
    Ok(out)
}

/// `∫_{B(e,|x|) ∖ B(e, 2|y|)} |t − y|^{α−n} dt` on `ℝ¹` or `ℝ²`, the
/// quantity bounded by `C |x − y|^α` in the kernel estimate.
pub fn kernel_estimate_integral<T: Real>(n: u32, alpha: T, x: &[T], y: &[T]) -> Result<T> {
    if x.len() != n as usize || y.len() != n as usize || !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument("points must have dimension n ∈ {1, 2}".into()));
    }
    if !(alpha > T::zero() && alpha < T::lit(n as f64)) {
        return Err(Error::InvalidArgument(format!("order alpha = {alpha} outside (0, {n})")));
    }
    let norm = |p: &[T]| p.iter().fold(T::zero(), |a, b| a + *b * *b).sqrt();
    let (rx, ry) = (norm(x), norm(y));
    let inner = T::lit(2.0) * ry;
    if !(rx > inner) {
        return Ok(T::zero());
    }
    let rules = Rules::new();
    if n == 1 {
        let k = Some(Kernel { x: y[0], beta: alpha - T::one() });
        let one = |_: T| T::one();
        let mut v = line(&rules, &one, k, inner, rx, &[], false);
        v += line(&rules, &one, k, -rx, -inner, &[], false);
        return Ok(v);
    }
    let beta = alpha - T::lit(2.0);
    let pi = T::lit(std::f64::consts::PI);
    if ry.is_zero() {
        // 2π ∫_0^{|x|} s^{α−1} ds
        return Ok(T::lit(2.0) * pi * rx.powf(alpha) / alpha);
    }
    let ring = |s: T| {
        let g = |phi: T| (s * s + ry * ry - T::lit(2.0) * s * ry * phi.cos()).powf(beta / T::lit(2.0));
        T::lit(2.0) * s * rules.integrate(&g, T::zero(), pi)
    };
    Ok(rules.integrate(&ring, inner, rx))
}
