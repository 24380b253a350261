//! Duality for the cone of radially decreasing functions.
//!
//! The right-hand sides are evaluated by quadrature; the left-hand
//! suprema are bounded from below by explicit decreasing witnesses.

mod bhp;
mod dyadic;
mod lhs;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conditions::ExponentPair;
use crate::error::{invalid, End, Error, Result};
use crate::geometry::GroupGeometry;
use crate::quadrature::{CumulativeTable, QuadratureConfig};
use crate::radial::{polar_table, Radial, RadialProfile, RadialWeight};
use crate::scalar::{mul0, pow_ext, Real};

pub use bhp::{bhp_four_term_rhs, BhpTerms};
pub use dyadic::{dyadic_sequence, DyadicSequence};
pub use lhs::{duality_lhs_maximize, DualityReport, LhsMethod};

/// The two summands of the duality right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DualityRhs<T> {
    /// `‖w‖₁^{-1/p} ‖g‖₁`, zero when `‖w‖₁ = ∞`.
    #[serde(with = "crate::scalar::extended")]
    pub mass_term: T,
    /// `(∫ H^{p'} W^{-p'} w)^{1/p'}` with `H(t) = ∫_{B(e,t)} g`.
    #[serde(with = "crate::scalar::extended")]
    pub level_term: T,
}

impl<T: Real> DualityRhs<T> {
    pub fn total(&self) -> T {
        self.mass_term + self.level_term
    }
}

pub(crate) fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p > T::one()) || !p.is_finite() {
        return invalid(format!("p must lie in (1, ∞), got {p}"));
    }
    Ok(())
}

fn check_geometry<T: Real>(geom: &GroupGeometry<T>, w: &RadialWeight<T>, role: &str) -> Result<()> {
    geom.validate()?;
    if w.geometry() != geom {
        return invalid(format!("weight {role} lives on a different geometry"));
    }
    Ok(())
}

/// `∫_0^∞` of a tabulated integrand, or the end where it diverges.
pub(crate) fn finite_total<T: Real>(table: &CumulativeTable<T>) -> Result<T> {
    let (head, tail) = (table.head(), table.tail());
    if head.is_divergent() {
        return Err(Error::Divergent { end: End::Origin, exponent: head.exponent.as_f64(), partial: f64::INFINITY });
    }
    if tail.is_divergent() {
        return Err(Error::Divergent { end: End::Infinity, exponent: tail.exponent.as_f64(), partial: f64::INFINITY });
    }
    let total = table.total();
    if !total.is_finite() {
        return Err(Error::Divergent { end: End::Singularity, exponent: f64::NAN, partial: total.as_f64() });
    }
    Ok(total)
}

fn profile_table<T: Real>(geom: &GroupGeometry<T>, g: &RadialProfile<T>, cfg: &QuadratureConfig<T>) -> CumulativeTable<T> {
    let h = g.clone();
    polar_table(geom, move |s| h.value(s), &g.breakpoints(), cfg)
}

/// `(∫_G H^{p'}(r) W^{-p'}(r) w)^{1/p'}` for a running integral `H`.
pub(crate) fn level_integral<T: Real>(
    geom: &GroupGeometry<T>,
    w: &RadialWeight<T>,
    h: Arc<dyn Fn(T) -> T + Send + Sync>,
    h_breaks: &[T],
    p_prime: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let r = w.clone();
    let mut breaks = w.breakpoints();
    breaks.extend_from_slice(h_breaks);
    let table = polar_table(
        geom,
        move |s| {
            let ws = r.value(s);
            if ws.is_zero() {
                return T::zero();
            }
            mul0(pow_ext(h(s), p_prime), mul0(pow_ext(r.cumulative_ext(s), -p_prime), ws))
        },
        &breaks,
        cfg,
    );
    Ok(pow_ext(finite_total(&table)?, T::one() / p_prime))
}

/// Both summands of the duality right-hand side for `g ≥ 0`.
pub fn duality_rhs<T: Real>(
    geom: &GroupGeometry<T>,
    p: T,
    w: &RadialWeight<T>,
    g: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<DualityRhs<T>> {
    check_p(p)?;
    check_geometry(geom, w, "w")?;
    g.validate()?;
    let p1 = p / (p - T::one());
    let gt = profile_table(geom, g, cfg);
    let mass = w.total_mass();
    let mass_term = if mass.is_infinite() {
        T::zero()
    } else {
        let norm = finite_total(&gt)?;
        mul0(pow_ext(mass, -T::one() / p), norm)
    };
    let h = Arc::new(move |s: T| gt.below(s));
    let level_term = level_integral(geom, w, h, &g.breakpoints(), p1, cfg)?;
    Ok(DualityRhs { mass_term, level_term })
}

/// Both sides of the tail Hardy inequality
/// `∫ w (∫_{G∖B(e,r(x))} f)^p dx` and `∫ f^p W^p(r) w^{1-p}`.
///
/// The right-hand side is returned without a constant in front.
pub fn lemma_tail_hardy_check<T: Real>(
    geom: &GroupGeometry<T>,
    p: T,
    w: &RadialWeight<T>,
    f: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<(T, T)> {
    check_p(p)?;
    check_geometry(geom, w, "w")?;
    f.validate()?;
    let ft = profile_table(geom, f, cfg);
    let mut breaks = w.breakpoints();
    breaks.extend(f.breakpoints());
    let r = w.clone();
    let lhs_table = polar_table(geom, move |s| mul0(r.value(s), pow_ext(ft.above(s), p)), &breaks, cfg);
    let lhs = finite_total(&lhs_table)?;
    let (r, h) = (w.clone(), f.clone());
    let rhs_table = polar_table(
        geom,
        move |s| {
            let fs = h.value(s);
            if fs.is_zero() {
                return T::zero();
            }
            mul0(pow_ext(fs, p), mul0(pow_ext(r.cumulative_ext(s), p), pow_ext(r.value(s), T::one() - p)))
        },
        &breaks,
        cfg,
    );
    let rhs = finite_total(&rhs_table)?;
    Ok((lhs, rhs))
}

/// An adjoint operator acting on radial profiles.
pub type Adjoint<'a, T> = dyn Fn(&RadialProfile<T>) -> Result<Arc<dyn Radial<T>>> + 'a;

/// Both sides of the duality criterion for `T : L^p_dec(w) → L^q(v)`
/// tested on one `g`:
/// `(∫ (∫_{B(e,r(x))} T*g)^{p'} W^{-p'} w)^{1/p'}` and
/// `(∫ g^{q'} v^{1-q'})^{1/q'}`.
pub fn sawyer_criterion_check<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    tstar: &Adjoint<'_, T>,
    g: &RadialProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<(T, T)> {
    check_geometry(geom, w, "w")?;
    check_geometry(geom, v, "v")?;
    g.validate()?;
    crate::conditions::require_infinite_mass(w, "w")?;
    let (p1, q1) = (pair.p_prime(), pair.q_prime());
    let tg = tstar(g)?;
    let tb = tg.breakpoints();
    let u = tg.clone();
    let inner = polar_table(geom, move |s| u.value(s), &tb, cfg);
    let lhs = level_integral(geom, w, Arc::new(move |s| inner.below(s)), &tb, p1, cfg)?;
    let (vv, gg) = (v.clone(), g.clone());
    let mut breaks = v.breakpoints();
    breaks.extend(g.breakpoints());
    let rhs_table = polar_table(
        geom,
        move |s| {
            let gs = gg.value(s);
            if gs.is_zero() {
                return T::zero();
            }
            mul0(pow_ext(gs, q1), pow_ext(vv.value(s), T::one() - q1))
        },
        &breaks,
        cfg,
    );
    let rhs = pow_ext(finite_total(&rhs_table)?, T::one() / q1);
    Ok((lhs, rhs))
}

/// The identity adjoint.
pub fn identity_adjoint<T: Real>(g: &RadialProfile<T>) -> Result<Arc<dyn Radial<T>>> {
    Ok(Arc::new(g.clone()))
}
