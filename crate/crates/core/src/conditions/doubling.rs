use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{CumulativeTable, Finiteness};
use crate::radial::{polar_table, ProductWeight, RadialWeight};
use crate::scalar::Real;

use super::scan::{scan_1d, scan_grid};
use super::single::dual_mass;
use super::{ScanConfig, TailDiagnostics};

/// Doubling classes of a radial weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum DoublingClass<T> {
    /// `∫_{B(e,2t)} ρ ≤ b ∫_{B(e,t)} ρ`.
    Dc,
    /// `∫_{G∖B(e,t)} r^{γp'} W^{-p'} ρ ≤ b ∫_{G∖B(e,2t)} r^{γp'} W^{-p'} ρ`.
    DcGammaP {
        #[serde(with = "crate::scalar::extended")]
        gamma: T,
        #[serde(with = "crate::scalar::extended")]
        p: T,
    },
}

/// Variable in which a product-space weight is tested for doubling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
    Indeterminate,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Member => "member",
            Membership::NotMember => "not_member",
            Membership::Indeterminate => "indeterminate",
        }
    }

    fn from_finiteness(f: Finiteness) -> Self {
        match f {
            Finiteness::Finite => Membership::Member,
            Finiteness::Infinite => Membership::NotMember,
            Finiteness::Indeterminate => Membership::Indeterminate,
        }
    }
}

/// Worst doubling ratio over the scan range and the membership verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DoublingReport<T> {
    pub class: String,
    #[serde(with = "crate::scalar::extended")]
    pub constant_b: T,
    pub member: Membership,
    #[serde(with = "crate::scalar::extended")]
    pub argmax: T,
    pub diagnostics: TailDiagnostics,
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if num.is_zero() && den.is_zero() {
        T::one()
    } else if den.is_zero() {
        T::infinity()
    } else if num.is_infinite() && den.is_infinite() {
        T::nan()
    } else {
        num / den
    }
}

fn indeterminate<T: Real>(class: String, why: String) -> DoublingReport<T> {
    DoublingReport {
        class,
        constant_b: T::nan(),
        member: Membership::Indeterminate,
        argmax: T::nan(),
        diagnostics: TailDiagnostics {
            growth_at_zero: f64::NAN,
            growth_at_infinity: f64::NAN,
            scanned_sup: f64::NAN,
            regime: Some(why),
        },
    }
}

fn ball_ratio_report<T: Real>(class: &str, table: &CumulativeTable<T>, breaks: &[T], scan: &ScanConfig<T>) -> DoublingReport<T> {
    if table.head().is_divergent() {
        return indeterminate(class.into(), "the ball integrals diverge at the origin".into());
    }
    let two = T::lit(2.0);
    let f = |t: T| ratio(table.below(two * t), table.below(t));
    let kinks: Vec<T> = breaks.iter().flat_map(|b| [*b, *b / two]).collect();
    let r = scan_1d(class, &f, &kinks, &|t| format!("ratio W(2t)/W(t) is infinite at t={}", t.as_f64()), scan);
    let argmax = match r.argmax {
        super::Argmax::Radius(t) => t,
        super::Argmax::Pair(t, _) => t,
    };
    DoublingReport {
        class: class.into(),
        constant_b: r.value,
        member: Membership::from_finiteness(r.finite),
        argmax,
        diagnostics: r.tail_diagnostics,
    }
}

/// Empirical doubling constant of `rho` for the requested class.
pub fn doubling_check<T: Real>(rho: &RadialWeight<T>, class: DoublingClass<T>, scan: &ScanConfig<T>) -> Result<DoublingReport<T>> {
    match class {
        DoublingClass::Dc => Ok(ball_ratio_report("DC", rho.table(), &rho.breakpoints(), scan)),
        DoublingClass::DcGammaP { gamma, p } => {
            let q = rho.geometry().q;
            if !(p > T::one()) || !p.is_finite() {
                return Err(Error::InvalidArgument(format!("DC^(γ,p) needs 1 < p < ∞, got {p}")));
            }
            if !(gamma > T::zero() && gamma < q / p) {
                return Err(Error::InvalidArgument(format!("DC^(γ,p) needs 0 < γ < Q/p, got γ={gamma}")));
            }
            let name = "DC^(gamma,p)";
            let p1 = p / (p - T::one());
            let table = dual_mass(rho.geometry(), rho, gamma * p1, p1, scan);
            if table.tail().is_divergent() {
                return Ok(indeterminate(name.into(), "the tail integrals diverge at infinity".into()));
            }
            let two = T::lit(2.0);
            let f = |t: T| ratio(table.above(t), table.above(two * t));
            let kinks: Vec<T> = rho.breakpoints().iter().flat_map(|b| [*b, *b / two]).collect();
            let r = scan_1d(name, &f, &kinks, &|t| format!("tail ratio is infinite at t={}", t.as_f64()), scan);
            let argmax = match r.argmax {
                super::Argmax::Radius(t) | super::Argmax::Pair(t, _) => t,
            };
            Ok(DoublingReport {
                class: name.into(),
                constant_b: r.value,
                member: Membership::from_finiteness(r.finite),
                argmax,
                diagnostics: r.tail_diagnostics,
            })
        }
    }
}

/// `ρ ∈ DC^{(s)}` in the variable `axis`, uniformly over probe radii of the
/// other variable.
pub fn doubling_check_section<T: Real>(rho: &ProductWeight<T>, axis: Axis, scan: &ScanConfig<T>) -> Result<DoublingReport<T>> {
    let class = match axis {
        Axis::First => "DC^(s)(x)",
        Axis::Second => "DC^(s)(y)",
    };
    if let Some((a, b)) = rho.factors() {
        let (other, along) = match axis {
            Axis::First => (b, a),
            Axis::Second => (a, b),
        };
        if other.profile().is_zero() {
            return Err(Error::InvalidArgument("weight vanishes identically".into()));
        }
        let mut r = doubling_check(along, DoublingClass::Dc, scan)?;
        r.class = class.into();
        return Ok(r);
    }
    let (rho, axis_geom) = match axis {
        Axis::First => (rho.swapped(), rho.geometry().g1),
        Axis::Second => (rho.clone(), rho.geometry().g2),
    };
    let density = rho.density();
    let (b1, b2) = density.breakpoints();
    let probes = scan_grid(scan.t_min, scan.t_max, scan.points_2d, &b1);
    let reports: Vec<DoublingReport<T>> = probes
        .par_iter()
        .filter_map(|&s1| {
            let d = density.clone();
            let table = polar_table(&axis_geom, move |u| d.value(s1, u), &b2, &scan.quadrature);
            if table.total().is_zero() {
                return None;
            }
            Some(ball_ratio_report(class, &table, &b2, scan))
        })
        .collect();
    if reports.is_empty() {
        return Err(Error::InvalidArgument("weight vanishes on every probed slice".into()));
    }
    let mut worst = reports[0].clone();
    for r in &reports[1..] {
        let rank = |m: Membership| match m {
            Membership::Member => 0,
            Membership::Indeterminate => 1,
            Membership::NotMember => 2,
        };
        if rank(r.member) > rank(worst.member) || (r.member == worst.member && r.constant_b > worst.constant_b) {
            worst = r.clone();
        }
    }
    Ok(worst)
}
