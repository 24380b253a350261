use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{
    a_conditions, hardy_cone_conditions, s_alpha_conditions, thm31_conditions, trace_condition_b, ConditionReport,
    ExponentPair, SAlphaForm, ScanConfig,
};
use crate::error::Result;
use crate::geometry::{GroupGeometry, ProductGeometry};
use crate::quadrature::Finiteness;
use crate::radial::{ProductWeight, RadialProfile, RadialWeight};
use crate::scalar::Real;

use super::families::TestFamily;
use super::ratio::{ratio_maximize, ratio_maximize_product, OperatorSpec, ProductOperatorSpec, RatioReport};

/// The characterization being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `I_α` on one group, conditions (F1)–(F3).
    Riesz,
    /// `H` on the cone, conditions (i)–(ii).
    HardyCone,
    /// `S_α`, one of its three displayed conditions.
    FarPiece,
    /// `I_{α₁,α₂}` on a product, conditions A₁–A₉.
    ProductRiesz,
    /// `I_{α₁,α₂}` from unweighted `L^p_dec`, condition B.
    ProductTrace,
}

/// Which implication the theorem asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// conditions finite ⇔ bounded
    Iff,
    /// conditions finite ⇒ bounded
    Sufficient,
    /// bounded ⇒ conditions finite
    Necessary,
}

/// A theorem together with its inputs.
#[derive(Clone)]
pub enum TheoremScenario<T: Real> {
    Riesz { geom: GroupGeometry<T>, pair: ExponentPair<T>, alpha: T, w: RadialWeight<T>, v: RadialWeight<T> },
    HardyCone { geom: GroupGeometry<T>, pair: ExponentPair<T>, w: RadialWeight<T>, v: RadialWeight<T> },
    FarPiece { geom: GroupGeometry<T>, pair: ExponentPair<T>, alpha: T, w: RadialWeight<T>, v: RadialWeight<T>, form: SAlphaForm },
    ProductRiesz {
        geom: ProductGeometry<T>,
        pair: ExponentPair<T>,
        alpha1: T,
        alpha2: T,
        w: ProductWeight<T>,
        v: ProductWeight<T>,
    },
    ProductTrace { geom: ProductGeometry<T>, pair: ExponentPair<T>, alpha1: T, alpha2: T, v: ProductWeight<T> },
}

impl<T: Real> TheoremScenario<T> {
    pub fn theorem(&self) -> Theorem {
        match self {
            TheoremScenario::Riesz { .. } => Theorem::Riesz,
            TheoremScenario::HardyCone { .. } => Theorem::HardyCone,
            TheoremScenario::FarPiece { .. } => Theorem::FarPiece,
            TheoremScenario::ProductRiesz { .. } => Theorem::ProductRiesz,
            TheoremScenario::ProductTrace { .. } => Theorem::ProductTrace,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            TheoremScenario::FarPiece { form: SAlphaForm::Sufficient, .. } => Direction::Sufficient,
            TheoremScenario::FarPiece { form: SAlphaForm::Necessary, .. } => Direction::Necessary,
            _ => Direction::Iff,
        }
    }
}

/// Scan, test families and optimizer settings shared by a sweep.
#[derive(Debug, Clone)]
pub struct SweepSettings<T> {
    pub scan: ScanConfig<T>,
    /// Defaults to [`TestFamily::standard`].
    pub families: Option<Vec<TestFamily<T>>>,
    /// Ratio evaluations per scenario, ascent included.
    pub budget: usize,
    pub seed: u64,
}

impl<T: Real> Default for SweepSettings<T> {
    fn default() -> Self {
        SweepSettings { scan: ScanConfig::default(), families: None, budget: 160, seed: 0 }
    }
}

/// Finiteness of one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlag {
    pub id: String,
    pub finite: Finiteness,
}

/// Whether measured boundedness agrees with the theorem's conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Verdict<T: Real> {
    pub theorem: Theorem,
    pub direction: Direction,
    pub conditions_finite: Vec<ConditionFlag>,
    /// `None` when the family traces neither saturate nor grow clearly.
    pub ratio_bounded: Option<bool>,
    #[serde(with = "crate::scalar::extended")]
    pub growth: f64,
    pub consistent: bool,
    pub indeterminate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_verified: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub conditions: Vec<ConditionReport<T>>,
    pub ratio: RatioReport<T>,
}

fn judge<T: Real>(
    theorem: Theorem,
    direction: Direction,
    conditions: Vec<ConditionReport<T>>,
    ratio: RatioReport<T>,
) -> Verdict<T> {
    let flags: Vec<ConditionFlag> =
        conditions.iter().map(|c| ConditionFlag { id: c.id.clone(), finite: c.finite }).collect();
    let hypothesis_verified = conditions.iter().filter_map(|c| c.hypothesis_verified).reduce(|a, b| a && b);
    let mut notes = Vec::new();
    let cond_state = if flags.iter().any(|f| f.finite == Finiteness::Indeterminate) {
        notes.push("a condition verdict is indeterminate".to_string());
        None
    } else {
        Some(flags.iter().all(|f| f.finite == Finiteness::Finite))
    };
    let bounded = ratio.bounded();
    if bounded.is_none() {
        notes.push(format!("ratio growth {:.3} over three decades is inconclusive", ratio.growth()));
    }
    let (consistent, indeterminate) = match (cond_state, bounded) {
        (Some(finite), Some(bounded)) => {
            let agrees = match direction {
                Direction::Iff => finite == bounded,
                Direction::Sufficient => !finite || bounded,
                Direction::Necessary => finite || !bounded,
            };
            if agrees {
                (true, false)
            } else if hypothesis_verified == Some(false) {
                notes.push("disagreement under an unverified doubling hypothesis".to_string());
                (true, true)
            } else {
                (false, false)
            }
        }
        _ => (true, true),
    };
    Verdict {
        theorem,
        direction,
        conditions_finite: flags,
        ratio_bounded: bounded,
        growth: ratio.growth(),
        consistent,
        indeterminate,
        hypothesis_verified,
        notes,
        conditions,
        ratio,
    }
}

/// Evaluates the scenario's conditions and measures the operator ratio,
/// then compares them in the direction the theorem asserts.
pub fn theorem_consistency_sweep<T: Real>(scenario: &TheoremScenario<T>, settings: &SweepSettings<T>) -> Result<Verdict<T>> {
    let cfg = &settings.scan.quadrature;
    let (budget, seed) = (settings.budget, settings.seed);
    let single_families = |geom: &GroupGeometry<T>, p: T| settings.families.clone().unwrap_or_else(|| TestFamily::standard(geom, p));
    let (conditions, ratio) = match scenario {
        TheoremScenario::Riesz { geom, pair, alpha, w, v } => {
            let c = thm31_conditions(geom, *pair, *alpha, w, v, &settings.scan)?.to_vec();
            let fam = single_families(geom, pair.p());
            (c, ratio_maximize(geom, *pair, OperatorSpec::Riesz { alpha: *alpha }, w, v, &fam, budget, seed, cfg)?)
        }
        TheoremScenario::HardyCone { geom, pair, w, v } => {
            let c = hardy_cone_conditions(geom, *pair, w, v, &settings.scan)?.to_vec();
            let fam = single_families(geom, pair.p());
            (c, ratio_maximize(geom, *pair, OperatorSpec::Hardy { a: T::one() }, w, v, &fam, budget, seed, cfg)?)
        }
        TheoremScenario::FarPiece { geom, pair, alpha, w, v, form } => {
            let c = vec![s_alpha_conditions(geom, *pair, *alpha, w, v, *form, &settings.scan)?];
            let fam = single_families(geom, pair.p());
            (c, ratio_maximize(geom, *pair, OperatorSpec::RieszFar { alpha: *alpha }, w, v, &fam, budget, seed, cfg)?)
        }
        TheoremScenario::ProductRiesz { geom, pair, alpha1, alpha2, w, v } => {
            let c = a_conditions(geom, *pair, *alpha1, *alpha2, w, v, &settings.scan)?.to_vec();
            let fam = single_families(&geom.g1, pair.p());
            let op = ProductOperatorSpec::Riesz { alpha1: *alpha1, alpha2: *alpha2 };
            (c, ratio_maximize_product(geom, *pair, op, w, v, &fam, cfg)?)
        }
        TheoremScenario::ProductTrace { geom, pair, alpha1, alpha2, v } => {
            let c = vec![trace_condition_b(geom, *pair, *alpha1, *alpha2, v, &settings.scan)?];
            let one = |g: &GroupGeometry<T>| RadialWeight::new(*g, RadialProfile::constant(T::one()), cfg);
            let w = ProductWeight::product(one(&geom.g1)?, one(&geom.g2)?);
            let fam = single_families(&geom.g1, pair.p());
            let op = ProductOperatorSpec::Riesz { alpha1: *alpha1, alpha2: *alpha2 };
            (c, ratio_maximize_product(geom, *pair, op, &w, v, &fam, cfg)?)
        }
    };
    Ok(judge(scenario.theorem(), scenario.direction(), conditions, ratio))
}

/// [`theorem_consistency_sweep`] over many scenarios in parallel; results
/// come back in input order.
pub fn consistency_sweep<T: Real>(scenarios: &[TheoremScenario<T>], settings: &SweepSettings<T>) -> Vec<Result<Verdict<T>>> {
    scenarios.par_iter().map(|s| theorem_consistency_sweep(s, settings)).collect()
}
