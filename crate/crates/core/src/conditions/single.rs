use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GroupGeometry;
use crate::quadrature::{CumulativeTable, Finiteness};
use crate::radial::{polar_table, RadialWeight, Region};
use crate::scalar::{mul0, pow_ext, Real};

use super::doubling::{doubling_check, DoublingClass, Membership};
use super::scan::{scan_product_1d, Factor, Product1};
use super::{ConditionReport, ExponentPair, Hypothesis, ScanConfig};

/// Which of the two Hardy transforms a condition characterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardySide {
    /// `H^a`: integration over `B(e, a r(x))`.
    Near,
    /// `H̃^a`: integration over `G ∖ B(e, a r(x))`.
    Far,
}

/// The three displayed conditions for the tail part of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SAlphaForm {
    /// Sufficient condition, `v`-ball of radius `t/(2c₀)`.
    Sufficient,
    /// Necessary condition, `v`-ball of radius `t/(4c₀)`.
    Necessary,
    /// Characterization under a doubling hypothesis, `v`-ball of radius `t`.
    DoublingEquiv,
}

#[inline]
pub(crate) fn spow<T: Real>(s: T, c: T) -> T {
    if c.is_zero() {
        T::one()
    } else {
        s.powf(c)
    }
}

/// `t ↦ ∫_{B(e,t)} r^c ρ`.
pub(crate) fn power_mass<T: Real>(geom: &GroupGeometry<T>, rho: &RadialWeight<T>, c: T, cfg: &ScanConfig<T>) -> CumulativeTable<T> {
    let r = rho.clone();
    polar_table(geom, move |s| mul0(spow(s, c), r.value(s)), &rho.breakpoints(), &cfg.quadrature)
}

/// `t ↦ ∫_{B(e,t)} r^c W^{-p'}(r) w`.
pub(crate) fn dual_mass<T: Real>(
    geom: &GroupGeometry<T>,
    w: &RadialWeight<T>,
    c: T,
    p_prime: T,
    cfg: &ScanConfig<T>,
) -> CumulativeTable<T> {
    let r = w.clone();
    polar_table(
        geom,
        move |s| {
            let ws = r.value(s);
            if ws.is_zero() {
                return T::zero();
            }
            mul0(spow(s, c) * ws, pow_ext(r.cumulative_ext(s), -p_prime))
        },
        &w.breakpoints(),
        &cfg.quadrature,
    )
}

/// `t ↦ ∫_{B(e,t)} u^e`.
pub(crate) fn conj_mass<T: Real>(geom: &GroupGeometry<T>, u: &RadialWeight<T>, e: T, cfg: &ScanConfig<T>) -> CumulativeTable<T> {
    let r = u.clone();
    polar_table(geom, move |s| pow_ext(r.value(s), e), &u.breakpoints(), &cfg.quadrature)
}

pub(crate) fn same_geometry<T: Real>(geom: &GroupGeometry<T>, w: &RadialWeight<T>, role: &str) -> Result<()> {
    geom.validate()?;
    if w.geometry() != geom {
        return Err(Error::InvalidArgument(format!("weight {role} lives on a different geometry")));
    }
    Ok(())
}

/// `W(e,∞) = ∞` with `W` locally finite.
pub(crate) fn require_infinite_mass<T: Real>(w: &RadialWeight<T>, role: &str) -> Result<()> {
    if w.table().head().is_divergent() {
        return Err(Error::Precondition(format!("{role} is not integrable near the origin, so W({role}) is infinite")));
    }
    let m = w.total_mass_is_infinite();
    match m.verdict {
        Finiteness::Infinite => Ok(()),
        Finiteness::Finite => Err(Error::Precondition(format!(
            "‖{role}‖_L¹ = ∞ is required but the total mass is {:.6e}",
            m.total
        ))),
        Finiteness::Indeterminate => Err(Error::Precondition(format!(
            "‖{role}‖_L¹ = ∞ could not be confirmed (tail exponent {:.4})",
            m.tail_exponent
        ))),
    }
}

/// Checks "either `w ∈ DC^{α,p}` or `v ∈ DC`" and names the branch.
pub(crate) fn doubling_hypothesis<T: Real>(
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    alpha: T,
    p: T,
    scan: &ScanConfig<T>,
) -> Result<Hypothesis> {
    let q = w.geometry().q;
    let mut tried = Vec::new();
    if alpha < q / p {
        let r = doubling_check(w, DoublingClass::DcGammaP { gamma: alpha, p }, scan)?;
        if r.member == Membership::Member {
            return Ok(Hypothesis { verified: true, note: format!("w ∈ DC^(α,p) with b = {:.6}", r.constant_b.as_f64()) });
        }
        tried.push(format!("w ∈ DC^(α,p) is {}", r.member.as_str()));
    } else {
        tried.push("DC^(α,p) is undefined for α ≥ Q/p".to_string());
    }
    let r = doubling_check(v, DoublingClass::Dc, scan)?;
    if r.member == Membership::Member {
        return Ok(Hypothesis { verified: true, note: format!("v ∈ DC with b = {:.6}", r.constant_b.as_f64()) });
    }
    tried.push(format!("v ∈ DC is {}", r.member.as_str()));
    Ok(Hypothesis { verified: false, note: format!("doubling hypothesis not verified: {}", tried.join("; ")) })
}

fn check_alpha<T: Real>(geom: &GroupGeometry<T>, alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < geom.q) {
        return Err(Error::InvalidArgument(format!("order α must lie in (0, Q), got {alpha}")));
    }
    Ok(())
}

/// Condition of the two-weight Hardy inequality `L^p(u₁) → L^q(u₂)` for
/// `H^a` (near) or `H̃^a` (far).
pub fn hardy_condition<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    u1: &RadialWeight<T>,
    u2: &RadialWeight<T>,
    a: T,
    side: HardySide,
    scan: &ScanConfig<T>,
) -> Result<ConditionReport<T>> {
    same_geometry(geom, u1, "u1")?;
    same_geometry(geom, u2, "u2")?;
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation a must be positive, got {a}")));
    }
    u1.require_positive("u1")?;
    let (p1, q) = (pair.p_prime(), pair.q());
    let conj = conj_mass(geom, u1, T::one() - p1, scan);
    let mass = power_mass(geom, u2, T::zero(), scan);
    let (ru2, ru1, id, l2, l1) = match side {
        HardySide::Near => (Region::Complement, Region::Ball, "hardy_near", "∫_{G∖B(t)} u2", "∫_{B(at)} u1^(1-p')"),
        HardySide::Far => (Region::Ball, Region::Complement, "hardy_far", "∫_{B(t)} u2", "∫_{G∖B(at)} u1^(1-p')"),
    };
    let f = Product1 {
        factors: vec![
            Factor::table(l2, mass, ru2, T::one() / q, u2.breakpoints()),
            Factor::table(l1, conj, ru1, T::one() / p1, u1.breakpoints()).at_scale(a),
        ],
    };
    Ok(scan_product_1d(id, &f, scan))
}

/// `(F1)`, `(F2)`, `(F3)` for `I_α : L^p_dec(w) → L^q(v)`.
pub fn thm31_conditions<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    alpha: T,
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<[ConditionReport<T>; 3]> {
    check_alpha(geom, alpha)?;
    same_geometry(geom, w, "w")?;
    same_geometry(geom, v, "v")?;
    require_infinite_mass(w, "w")?;
    let h = doubling_hypothesis(w, v, alpha, pair.p(), scan)?;
    let (p, p1, q, big_q) = (pair.p(), pair.p_prime(), pair.q(), geom.q);
    let (wb, vb) = (w.breakpoints(), v.breakpoints());
    let one = T::one();
    let f1 = Product1 {
        factors: vec![
            Factor::table("W(t)^(-1/p)", w.table().clone(), Region::Ball, -one / p, wb.clone()),
            Factor::table("∫_{B(t)} r^(αq) v", power_mass(geom, v, alpha * q, scan), Region::Ball, one / q, vb.clone()),
        ],
    };
    let f2 = Product1 {
        factors: vec![
            Factor::table("∫_{B(t)} r^(p'Q) W^(-p') w", dual_mass(geom, w, p1 * big_q, p1, scan), Region::Ball, one / p1, wb.clone()),
            Factor::table(
                "∫_{G∖B(t)} r^((α-Q)q) v",
                power_mass(geom, v, (alpha - big_q) * q, scan),
                Region::Complement,
                one / q,
                vb.clone(),
            ),
        ],
    };
    let f3 = Product1 {
        factors: vec![
            Factor::table("∫_{B(t)} v", power_mass(geom, v, T::zero(), scan), Region::Ball, one / q, vb),
            Factor::table(
                "∫_{G∖B(t)} r^(αp') W^(-p') w",
                dual_mass(geom, w, alpha * p1, p1, scan),
                Region::Complement,
                one / p1,
                wb,
            ),
        ],
    };
    Ok([
        scan_product_1d("F1", &f1, scan).with_hypothesis(&h),
        scan_product_1d("F2", &f2, scan).with_hypothesis(&h),
        scan_product_1d("F3", &f3, scan).with_hypothesis(&h),
    ])
}

/// Conditions (i) and (ii) for `H : L^p_dec(w) → L^q(v)`.
pub fn hardy_cone_conditions<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<[ConditionReport<T>; 2]> {
    same_geometry(geom, w, "w")?;
    same_geometry(geom, v, "v")?;
    require_infinite_mass(w, "w")?;
    let (p, p1, q, big_q) = (pair.p(), pair.p_prime(), pair.q(), geom.q);
    let (wb, vb) = (w.breakpoints(), v.breakpoints());
    let one = T::one();
    let c1 = Product1 {
        factors: vec![
            Factor::table("W(t)^(-1/p)", w.table().clone(), Region::Ball, -one / p, wb.clone()),
            Factor::table("∫_{B(t)} v r^(Qq)", power_mass(geom, v, big_q * q, scan), Region::Ball, one / q, vb.clone()),
        ],
    };
    let c2 = Product1 {
        factors: vec![
            Factor::table("∫_{B(t)} r^(Qp') W^(-p') w", dual_mass(geom, w, big_q * p1, p1, scan), Region::Ball, one / p1, wb),
            Factor::table("∫_{G∖B(t)} v", power_mass(geom, v, T::zero(), scan), Region::Complement, one / q, vb),
        ],
    };
    Ok([scan_product_1d("hardy_cone_i", &c1, scan), scan_product_1d("hardy_cone_ii", &c2, scan)])
}

/// One of the three displayed conditions for `S_α`, with the `c₀`-scaled
/// ball radii.
pub fn s_alpha_conditions<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    alpha: T,
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    which: SAlphaForm,
    scan: &ScanConfig<T>,
) -> Result<ConditionReport<T>> {
    check_alpha(geom, alpha)?;
    same_geometry(geom, w, "w")?;
    same_geometry(geom, v, "v")?;
    require_infinite_mass(w, "w")?;
    let h = match which {
        SAlphaForm::DoublingEquiv => Some(doubling_hypothesis(w, v, alpha, pair.p(), scan)?),
        _ => None,
    };
    let (p1, q) = (pair.p_prime(), pair.q());
    let two = T::lit(2.0);
    let (scale, id, label) = match which {
        SAlphaForm::Sufficient => (T::one() / (two * geom.c0), "s_alpha_sufficient", "∫_{B(t/(2c0))} v"),
        SAlphaForm::Necessary => (T::one() / (two * two * geom.c0), "s_alpha_necessary", "∫_{B(t/(4c0))} v"),
        SAlphaForm::DoublingEquiv => (T::one(), "s_alpha_doubling_equiv", "∫_{B(t)} v"),
    };
    let f = Product1 {
        factors: vec![
            Factor::table(
                "∫_{G∖B(t)} r^(αp') W^(-p') w",
                dual_mass(geom, w, alpha * p1, p1, scan),
                Region::Complement,
                T::one() / p1,
                w.breakpoints(),
            ),
            Factor::table(label, power_mass(geom, v, T::zero(), scan), Region::Ball, T::one() / q, v.breakpoints())
                .at_scale(scale),
        ],
    };
    let r = scan_product_1d(id, &f, scan);
    Ok(match h {
        Some(h) => r.with_hypothesis(&h),
        None => r,
    })
}
