use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{GroupGeometry, ProductGeometry};
use crate::operators::HardyVariant;
use crate::radial::{BiRadial, ProductWeight, QuadrantTable, RadialWeight, Region};
use crate::scalar::Real;

use super::doubling::{doubling_check, doubling_check_section, Axis, DoublingClass, Membership};
use super::scan::{scan_2d, Factor, Factor2, Product2};
use super::single::{conj_mass, dual_mass, require_infinite_mass, spow};
use super::{ConditionReport, ExponentPair, Hypothesis, ScanConfig};

/// `w₁ ⊗ w₂` factors of a product weight, also for one-term separable
/// densities.
fn product_factors<T: Real>(w: &ProductWeight<T>, scan: &ScanConfig<T>) -> Result<Option<(RadialWeight<T>, RadialWeight<T>)>> {
    if let Some((a, b)) = w.factors() {
        return Ok(Some((a.clone(), b.clone())));
    }
    let geom = w.geometry();
    match w.density() {
        BiRadial::Separable { terms } if terms.len() == 1 => {
            let k = &terms[0];
            let a = RadialWeight::new(geom.g1, k.first.scaled(k.coeff), &scan.quadrature)?;
            let b = RadialWeight::new(geom.g2, k.second.clone(), &scan.quadrature)?;
            Ok(Some((a, b)))
        }
        _ => Ok(None),
    }
}

fn require_product<T: Real>(w: &ProductWeight<T>, scan: &ScanConfig<T>) -> Result<(RadialWeight<T>, RadialWeight<T>)> {
    product_factors(w, scan)?
        .ok_or_else(|| Error::Precondition("w must be a product weight w₁(x) w₂(y)".into()))
}

fn check_geometry<T: Real>(geom: &ProductGeometry<T>, w: &ProductWeight<T>, role: &str) -> Result<()> {
    geom.g1.validate()?;
    geom.g2.validate()?;
    if &w.geometry() != geom {
        return Err(Error::InvalidArgument(format!("weight {role} lives on a different product geometry")));
    }
    Ok(())
}

/// `(∫∫_{E₁(t)×E₂(τ)} r₁^{c₁} r₂^{c₂} v)^{exponent}`.
fn quadrant<T: Real>(
    label: &str,
    geom: &ProductGeometry<T>,
    v: &BiRadial<T>,
    c: (T, T),
    regions: (Region, Region),
    exponent: T,
    scan: &ScanConfig<T>,
) -> Factor2<T> {
    let (c1, c2) = c;
    let table = QuadrantTable::new(
        geom,
        v,
        Arc::new(move |s: T| spow(s, c1)),
        &[],
        Arc::new(move |s: T| spow(s, c2)),
        &[],
        &scan.quadrature,
    );
    Factor2::Quadrant { label: label.into(), table, regions, exponent, kinks: v.breakpoints() }
}

fn cumulative<T: Real>(label: &str, w: &RadialWeight<T>, region: Region, exponent: T) -> Factor<T> {
    Factor::table(label, w.table().clone(), region, exponent, w.breakpoints())
}

fn dual<T: Real>(label: &str, g: &GroupGeometry<T>, w: &RadialWeight<T>, c: T, p1: T, region: Region, scan: &ScanConfig<T>) -> Factor<T> {
    Factor::table(label, dual_mass(g, w, c, p1, scan), region, T::one() / p1, w.breakpoints())
}

fn opposite(r: Region) -> Region {
    match r {
        Region::Ball => Region::Complement,
        Region::Complement => Region::Ball,
    }
}

/// Condition (i)–(iv) for the double Hardy operators
/// `L^p(w) → L^q(v)` on `G₁ × G₂`.
pub fn product_hardy_conditions<T: Real>(
    geom: &ProductGeometry<T>,
    pair: ExponentPair<T>,
    w: &ProductWeight<T>,
    v: &ProductWeight<T>,
    a: T,
    b: T,
    variant: HardyVariant,
    scan: &ScanConfig<T>,
) -> Result<ConditionReport<T>> {
    check_geometry(geom, w, "w")?;
    check_geometry(geom, v, "v")?;
    if !(a > T::zero() && b > T::zero()) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("dilations a, b must be positive".into()));
    }
    let wf = product_factors(w, scan)?;
    if wf.is_none() && product_factors(v, scan)?.is_none() {
        return Err(Error::Precondition("either w or v must be a product weight".into()));
    }
    let (p1, q) = (pair.p_prime(), pair.q());
    let e = T::one() - p1;
    let wr = variant.regions();
    let vr = (opposite(wr.0), opposite(wr.1));
    let v_factor = quadrant("∫∫ v", geom, &v.density(), (T::zero(), T::zero()), vr, T::one() / q, scan);
    let mut factors = vec![v_factor];
    match wf {
        Some((w1, w2)) => {
            w1.require_positive("w1")?;
            w2.require_positive("w2")?;
            factors.push(Factor2::First(
                Factor::table("∫ w1^(1-p')", conj_mass(&geom.g1, &w1, e, scan), wr.0, T::one() / p1, w1.breakpoints())
                    .at_scale(a),
            ));
            factors.push(Factor2::Second(
                Factor::table("∫ w2^(1-p')", conj_mass(&geom.g2, &w2, e, scan), wr.1, T::one() / p1, w2.breakpoints())
                    .at_scale(b),
            ));
        }
        None => {
            return Err(Error::Unsupported(
                "w^(1-p') of a non-product weight is only available for one-term separable densities".into(),
            ))
        }
    }
    let id = match variant {
        HardyVariant::NearNear => "product_hardy_i",
        HardyVariant::FarFar => "product_hardy_ii",
        HardyVariant::NearFar => "product_hardy_iii",
        HardyVariant::FarNear => "product_hardy_iv",
    };
    Ok(scan_2d(id, &Product2 { factors }, scan))
}

fn product_with_infinite_masses<T: Real>(
    geom: &ProductGeometry<T>,
    w: &ProductWeight<T>,
    v: &ProductWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<(RadialWeight<T>, RadialWeight<T>)> {
    check_geometry(geom, w, "w")?;
    check_geometry(geom, v, "v")?;
    let (w1, w2) = require_product(w, scan)?;
    require_infinite_mass(&w1, "w1")?;
    require_infinite_mass(&w2, "w2")?;
    Ok((w1, w2))
}

/// Conditions (i)–(iv) for `H^{1,1} : L^p_dec(w₁ ⊗ w₂) → L^q(v)`.
pub fn double_hardy_cone_conditions<T: Real>(
    geom: &ProductGeometry<T>,
    pair: ExponentPair<T>,
    w: &ProductWeight<T>,
    v: &ProductWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<[ConditionReport<T>; 4]> {
    let (w1, w2) = product_with_infinite_masses(geom, w, v, scan)?;
    let (p, p1, q) = (pair.p(), pair.p_prime(), pair.q());
    let (q1, q2) = (geom.g1.q, geom.g2.q);
    let vd = v.density();
    let one = T::one();
    let zero = T::zero();
    use Region::{Ball, Complement};
    let c1 = Product2 {
        factors: vec![
            Factor2::First(cumulative("W1(a1)^(-1/p)", &w1, Ball, -one / p)),
            Factor2::Second(cumulative("W2(a2)^(-1/p)", &w2, Ball, -one / p)),
            quadrant("∫∫_{B×B} r1^(Q1 q) r2^(Q2 q) v", geom, &vd, (q1 * q, q2 * q), (Ball, Ball), one / q, scan),
        ],
    };
    let c2 = Product2 {
        factors: vec![
            Factor2::First(dual("P1(a1)", &geom.g1, &w1, q1 * p1, p1, Ball, scan)),
            Factor2::Second(dual("P2(a2)", &geom.g2, &w2, q2 * p1, p1, Ball, scan)),
            quadrant("∫∫_{∁B×∁B} v", geom, &vd, (zero, zero), (Complement, Complement), one / q, scan),
        ],
    };
    let c3 = Product2 {
        factors: vec![
            Factor2::First(cumulative("W1(a1)^(-1/p)", &w1, Ball, -one / p)),
            Factor2::Second(dual("P2(a2)", &geom.g2, &w2, q2 * p1, p1, Ball, scan)),
            quadrant("∫∫_{B×∁B} r1^(Q1 q) v", geom, &vd, (q1 * q, zero), (Ball, Complement), one / q, scan),
        ],
    };
    let c4 = Product2 {
        factors: vec![
            Factor2::First(dual("P1(a1)", &geom.g1, &w1, q1 * p1, p1, Ball, scan)),
            Factor2::Second(cumulative("W2(a2)^(-1/p)", &w2, Ball, -one / p)),
            quadrant("∫∫_{∁B×B} r2^(Q2 q) v", geom, &vd, (zero, q2 * q), (Complement, Ball), one / q, scan),
        ],
    };
    Ok([
        scan_2d("double_hardy_i", &c1, scan),
        scan_2d("double_hardy_ii", &c2, scan),
        scan_2d("double_hardy_iii", &c3, scan),
        scan_2d("double_hardy_iv", &c4, scan),
    ])
}

/// Verifies "either `wᵢ ∈ DC^{αᵢ,p}`, i = 1, 2, or `v ∈ DC(x) ∩ DC(y)`".
fn product_doubling_branch<T: Real>(
    w: (&RadialWeight<T>, &RadialWeight<T>),
    v: &ProductWeight<T>,
    alpha: (T, T),
    p: T,
    scan: &ScanConfig<T>,
) -> Result<String> {
    let mut tried = Vec::new();
    let (q1, q2) = (w.0.geometry().q, w.1.geometry().q);
    if alpha.0 < q1 / p && alpha.1 < q2 / p {
        let r1 = doubling_check(w.0, DoublingClass::DcGammaP { gamma: alpha.0, p }, scan)?;
        let r2 = doubling_check(w.1, DoublingClass::DcGammaP { gamma: alpha.1, p }, scan)?;
        if r1.member == Membership::Member && r2.member == Membership::Member {
            return Ok(format!(
                "wᵢ ∈ DC^(αᵢ,p) with b = {:.6}, {:.6}",
                r1.constant_b.as_f64(),
                r2.constant_b.as_f64()
            ));
        }
        tried.push(format!("w1 ∈ DC^(α1,p) is {}, w2 ∈ DC^(α2,p) is {}", r1.member.as_str(), r2.member.as_str()));
    } else {
        tried.push("DC^(αᵢ,p) is undefined for αᵢ ≥ Qᵢ/p".to_string());
    }
    let rx = doubling_check_section(v, Axis::First, scan)?;
    let ry = doubling_check_section(v, Axis::Second, scan)?;
    if rx.member == Membership::Member && ry.member == Membership::Member {
        return Ok(format!("v ∈ DC(x) ∩ DC(y) with b = {:.6}, {:.6}", rx.constant_b.as_f64(), ry.constant_b.as_f64()));
    }
    tried.push(format!("v ∈ DC(x) is {}, v ∈ DC(y) is {}", rx.member.as_str(), ry.member.as_str()));
    Err(Error::Precondition(format!("doubling hypothesis fails: {}", tried.join("; "))))
}

/// `A₁`–`A₉` for `I_{α₁,α₂} : L^p_dec(w₁ ⊗ w₂) → L^q(v)`.
///
/// Notation: `Pᵢ(a) = ∫_{B(a)} r^{Qᵢp'} Wᵢ^{-p'} wᵢ` and
/// `Tᵢ(a) = ∫_{Gᵢ∖B(a)} r^{αᵢp'} Wᵢ^{-p'} wᵢ`.
pub fn a_conditions<T: Real>(
    geom: &ProductGeometry<T>,
    pair: ExponentPair<T>,
    alpha1: T,
    alpha2: T,
    w: &ProductWeight<T>,
    v: &ProductWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<[ConditionReport<T>; 9]> {
    check_geometry(geom, w, "w")?;
    check_geometry(geom, v, "v")?;
    let (q1, q2) = (geom.g1.q, geom.g2.q);
    if !(alpha1 > T::zero() && alpha1 < q1 && alpha2 > T::zero() && alpha2 < q2) {
        return Err(Error::InvalidArgument(format!("orders must satisfy 0 < αᵢ < Qᵢ, got ({alpha1}, {alpha2})")));
    }
    let (w1, w2) = require_product(w, scan)?;
    let (p, p1, q) = (pair.p(), pair.p_prime(), pair.q());
    let branch = product_doubling_branch((&w1, &w2), v, (alpha1, alpha2), p, scan)?;
    let vd = v.density();
    let one = T::one();
    let zero = T::zero();
    use Region::{Ball, Complement};
    let (g1, g2) = (&geom.g1, &geom.g2);
    let w1f = || Factor2::First(cumulative("W1(a1)^(-1/p)", &w1, Ball, -one / p));
    let w2f = || Factor2::Second(cumulative("W2(a2)^(-1/p)", &w2, Ball, -one / p));
    let p1f = || Factor2::First(dual("P1(a1)", g1, &w1, q1 * p1, p1, Ball, scan));
    let p2f = || Factor2::Second(dual("P2(a2)", g2, &w2, q2 * p1, p1, Ball, scan));
    let t1f = || Factor2::First(dual("T1(a1)", g1, &w1, alpha1 * p1, p1, Complement, scan));
    let t2f = || Factor2::Second(dual("T2(a2)", g2, &w2, alpha2 * p1, p1, Complement, scan));
    let qv = |label: &str, c: (T, T), r: (Region, Region)| quadrant(label, geom, &vd, c, r, one / q, scan);
    let (n1, n2) = ((alpha1 - q1) * q, (alpha2 - q2) * q);
    let specs: Vec<(&str, Product2<T>)> = vec![
        ("A1", Product2 { factors: vec![w1f(), w2f(), qv("∫∫_{B×B} r1^(α1 q) r2^(α2 q) v", (alpha1 * q, alpha2 * q), (Ball, Ball))] }),
        ("A2", Product2 { factors: vec![p1f(), p2f(), qv("∫∫_{∁B×∁B} r1^((α1-Q1)q) r2^((α2-Q2)q) v", (n1, n2), (Complement, Complement))] }),
        ("A3", Product2 { factors: vec![w1f(), p2f(), qv("∫∫_{B×∁B} r1^(α1 q) r2^((α2-Q2)q) v", (alpha1 * q, n2), (Ball, Complement))] }),
        ("A4", Product2 { factors: vec![p1f(), w2f(), qv("∫∫_{∁B×B} r1^((α1-Q1)q) r2^(α2 q) v", (n1, alpha2 * q), (Complement, Ball))] }),
        ("A5", Product2 { factors: vec![t1f(), t2f(), qv("∫∫_{B×B} v", (zero, zero), (Ball, Ball))] }),
        ("A6", Product2 { factors: vec![w1f(), t2f(), qv("∫∫_{B×B} r1^(α1 q) v", (alpha1 * q, zero), (Ball, Ball))] }),
        ("A7", Product2 { factors: vec![p1f(), t2f(), qv("∫∫_{∁B×B} r1^((α1-Q1)q) v", (n1, zero), (Complement, Ball))] }),
        ("A8", Product2 { factors: vec![t1f(), w2f(), qv("∫∫_{B×B} r2^(α2 q) v", (zero, alpha2 * q), (Ball, Ball))] }),
        ("A9", Product2 { factors: vec![p2f(), t1f(), qv("∫∫_{B×∁B} r2^((α2-Q2)q) v", (zero, n2), (Ball, Complement))] }),
    ];
    let h = Hypothesis { verified: true, note: branch };
    let reports: Vec<ConditionReport<T>> = specs.iter().map(|(id, c)| scan_2d(id, c, scan).with_hypothesis(&h)).collect();
    Ok(reports.try_into().unwrap_or_else(|_| unreachable!("nine conditions")))
}

/// Trace condition `B` for `I_{α₁,α₂} : L^p_dec → L^q(v)`.
pub fn trace_condition_b<T: Real>(
    geom: &ProductGeometry<T>,
    pair: ExponentPair<T>,
    alpha1: T,
    alpha2: T,
    v: &ProductWeight<T>,
    scan: &ScanConfig<T>,
) -> Result<ConditionReport<T>> {
    check_geometry(geom, v, "v")?;
    let (p, q) = (pair.p(), pair.q());
    let (q1, q2) = (geom.g1.q, geom.g2.q);
    if !(alpha1 > T::zero() && alpha1 < q1 / p && alpha2 > T::zero() && alpha2 < q2 / p) {
        return Err(Error::Precondition(format!(
            "the trace condition needs 0 < αᵢ < Qᵢ/p, got α = ({alpha1}, {alpha2}) with Q/p = ({}, {})",
            q1 / p,
            q2 / p
        )));
    }
    let c = Product2 {
        factors: vec![
            quadrant("∫∫_{B×B} v", geom, &v.density(), (T::zero(), T::zero()), (Region::Ball, Region::Ball), T::one() / q, scan),
            Factor2::First(Factor::power("a1^(α1-Q1/p)", alpha1 - q1 / p)),
            Factor2::Second(Factor::power("a2^(α2-Q2/p)", alpha2 - q2 / p)),
        ],
    };
    Ok(scan_2d("B", &c, scan))
}
