use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::ExponentPair;
use crate::duality::finite_total;
use crate::error::{invalid, Error, Result};
use crate::geometry::{GroupGeometry, ProductGeometry};
use crate::operators::{
    hardy, hardy_tail, product_hardy, product_riesz_pieces, riesz_far, riesz_full, riesz_near, weighted_hardy_h_alpha, HardyVariant,
    RieszPart, RieszPiece,
};
use crate::operators::riesz_part;
use crate::quadrature::QuadratureConfig;
use crate::radial::{polar_table, BiDecreasingProfile, BiRadial, DecreasingProfile, ProductWeight, QuadrantTable};
use crate::radial::{Radial, RadialProfile, RadialWeight, Region};
use crate::scalar::{mul0, pow_ext, Real};

use super::families::TestFamily;

/// Growth over three decades at or above which a trace counts as unbounded.
pub const UNBOUNDED_GROWTH: f64 = 10.0;
/// Growth over three decades at or below which a trace counts as saturated.
pub const BOUNDED_GROWTH: f64 = 2.0;

/// Operators on one group whose `L^p(w) → L^q(v)` ratio can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum OperatorSpec<T> {
    Hardy {
        #[serde(with = "crate::scalar::extended")]
        a: T,
    },
    HardyTail {
        #[serde(with = "crate::scalar::extended")]
        a: T,
    },
    /// `H_α f = r^{α−Q} H f`.
    WeightedHardy {
        #[serde(with = "crate::scalar::extended")]
        alpha: T,
    },
    RieszNear {
        #[serde(with = "crate::scalar::extended")]
        alpha: T,
    },
    RieszFar {
        #[serde(with = "crate::scalar::extended")]
        alpha: T,
    },
    Riesz {
        #[serde(with = "crate::scalar::extended")]
        alpha: T,
    },
}

impl<T: Real> OperatorSpec<T> {
    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Hardy { a } => format!("H^{a}"),
            OperatorSpec::HardyTail { a } => format!("H~^{a}"),
            OperatorSpec::WeightedHardy { alpha } => format!("H_{alpha}"),
            OperatorSpec::RieszNear { alpha } => format!("J_{alpha}"),
            OperatorSpec::RieszFar { alpha } => format!("S_{alpha}"),
            OperatorSpec::Riesz { alpha } => format!("I_{alpha}"),
        }
    }

    fn check(&self, geom: &GroupGeometry<T>) -> Result<()> {
        geom.validate()?;
        match *self {
            OperatorSpec::Hardy { a } | OperatorSpec::HardyTail { a } => {
                if !(a > T::zero()) || !a.is_finite() {
                    return invalid(format!("dilation parameter must be positive, got {a}"));
                }
                Ok(())
            }
            OperatorSpec::WeightedHardy { alpha } => geom.check_order(alpha),
            OperatorSpec::RieszNear { alpha } | OperatorSpec::RieszFar { alpha } | OperatorSpec::Riesz { alpha } => {
                geom.require_euclidean()?;
                geom.check_order(alpha)
            }
        }
    }

    /// `Tf` as a radial function.
    pub fn apply(&self, geom: &GroupGeometry<T>, f: &RadialProfile<T>, cfg: &QuadratureConfig<T>) -> Result<Arc<dyn Radial<T>>> {
        Ok(match *self {
            OperatorSpec::Hardy { a } => Arc::new(hardy(geom, a, f, cfg)?),
            OperatorSpec::HardyTail { a } => Arc::new(hardy_tail(geom, a, f, cfg)?),
            OperatorSpec::WeightedHardy { alpha } => Arc::new(weighted_hardy_h_alpha(geom, alpha, f, cfg)?),
            OperatorSpec::RieszNear { alpha } => Arc::new(riesz_near(geom, alpha, &DecreasingProfile::new(f.clone())?, cfg)?),
            OperatorSpec::RieszFar { alpha } => Arc::new(riesz_far(geom, alpha, f, cfg)?),
            OperatorSpec::Riesz { alpha } => Arc::new(riesz_full(geom, alpha, f, cfg)?),
        })
    }
}

impl<T: Real> OperatorSpec<T> {
    /// `Tf` at the probe radii.
    pub fn evaluate(&self, geom: &GroupGeometry<T>, f: &RadialProfile<T>, probes: &[T], cfg: &QuadratureConfig<T>) -> Result<Vec<T>> {
        self.check(geom)?;
        let tf = self.apply(geom, f, cfg)?;
        Ok(probes.iter().map(|&t| tf.value(t)).collect())
    }
}

/// Operators on `G₁ × G₂` measured on tensor test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum ProductOperatorSpec<T> {
    Riesz {
        #[serde(with = "crate::scalar::extended")]
        alpha1: T,
        #[serde(with = "crate::scalar::extended")]
        alpha2: T,
    },
    RieszPiece {
        #[serde(with = "crate::scalar::extended")]
        alpha1: T,
        #[serde(with = "crate::scalar::extended")]
        alpha2: T,
        piece: RieszPiece,
    },
    Hardy {
        #[serde(with = "crate::scalar::extended")]
        a: T,
        #[serde(with = "crate::scalar::extended")]
        b: T,
        variant: HardyVariant,
    },
}

impl<T: Real> ProductOperatorSpec<T> {
    pub fn label(&self) -> String {
        match self {
            ProductOperatorSpec::Riesz { alpha1, alpha2 } => format!("I_({alpha1},{alpha2})"),
            ProductOperatorSpec::RieszPiece { alpha1, alpha2, piece } => format!("{piece:?}_({alpha1},{alpha2})"),
            ProductOperatorSpec::Hardy { a, b, variant } => format!("H[{variant:?}]^({a},{b})"),
        }
    }

    fn axis(
        &self,
        geom: &GroupGeometry<T>,
        first: bool,
        f: &RadialProfile<T>,
        cfg: &QuadratureConfig<T>,
    ) -> Result<Arc<dyn Radial<T>>> {
        let pick = |x: T, y: T| if first { x } else { y };
        Ok(match *self {
            ProductOperatorSpec::Riesz { alpha1, alpha2 } => Arc::new(riesz_full(geom, pick(alpha1, alpha2), f, cfg)?),
            ProductOperatorSpec::RieszPiece { alpha1, alpha2, piece } => {
                let (near1, near2) = match piece {
                    RieszPiece::JJ => (true, true),
                    RieszPiece::JS => (true, false),
                    RieszPiece::SJ => (false, true),
                    RieszPiece::SS => (false, false),
                };
                let near = if first { near1 } else { near2 };
                let part = if near { RieszPart::Near } else { RieszPart::Far };
                Arc::new(riesz_part(geom, pick(alpha1, alpha2), f, part, cfg)?)
            }
            ProductOperatorSpec::Hardy { a, b, variant } => {
                let (r1, r2) = variant.regions();
                let (d, region) = if first { (a, r1) } else { (b, r2) };
                match region {
                    Region::Ball => Arc::new(hardy(geom, d, f, cfg)?),
                    Region::Complement => Arc::new(hardy_tail(geom, d, f, cfg)?),
                }
            }
        })
    }

    /// `Tf` at the probe pairs `(t, τ)`.
    pub fn evaluate(
        &self,
        geom: &ProductGeometry<T>,
        f: &BiDecreasingProfile<T>,
        probes: &[(T, T)],
        cfg: &QuadratureConfig<T>,
    ) -> Result<Vec<T>> {
        self.check(geom)?;
        let at = |v: &dyn Fn(T, T) -> T| probes.iter().map(|&(t, tau)| v(t, tau)).collect();
        Ok(match *self {
            ProductOperatorSpec::Riesz { alpha1, alpha2 } => {
                let pieces: Vec<_> = RieszPiece::ALL
                    .iter()
                    .map(|&k| product_riesz_pieces(geom, alpha1, alpha2, k, f, cfg))
                    .collect::<Result<_>>()?;
                at(&|t, tau| pieces.iter().map(|p| p.value(t, tau)).fold(T::zero(), |a, b| a + b))
            }
            ProductOperatorSpec::RieszPiece { alpha1, alpha2, piece } => {
                let p = product_riesz_pieces(geom, alpha1, alpha2, piece, f, cfg)?;
                at(&|t, tau| p.value(t, tau))
            }
            ProductOperatorSpec::Hardy { a, b, variant } => {
                let h = product_hardy(geom, a, b, variant, f.surface(), cfg)?;
                at(&|t, tau| h.value(t, tau))
            }
        })
    }

    fn check(&self, geom: &ProductGeometry<T>) -> Result<()> {
        match *self {
            ProductOperatorSpec::Riesz { alpha1, alpha2 } | ProductOperatorSpec::RieszPiece { alpha1, alpha2, .. } => {
                geom.g1.require_euclidean()?;
                geom.g2.require_euclidean()?;
                geom.g1.check_order(alpha1)?;
                geom.g2.check_order(alpha2)
            }
            ProductOperatorSpec::Hardy { a, b, .. } => {
                if !(a > T::zero() && b > T::zero()) || !(a.is_finite() && b.is_finite()) {
                    return invalid("dilation parameters must be positive");
                }
                Ok(())
            }
        }
    }
}

/// A family member left out of the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Skipped<T> {
    #[serde(with = "crate::scalar::extended")]
    pub parameter: T,
    pub reason: String,
}

/// `(parameter, ratio)` along one test family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FamilyTrace<T> {
    pub family: String,
    #[serde(with = "crate::conditions::scan_series")]
    pub points: Vec<[T; 2]>,
    /// Members whose ratio is infinite because `‖Tf‖` diverges.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divergent: Vec<Skipped<T>>,
    /// Members with `‖f‖_{L^p(w)}` zero or infinite.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Skipped<T>>,
    /// Largest ratio growth over a three-decade window at either end.
    #[serde(with = "crate::scalar::extended")]
    pub growth: f64,
}

impl<T: Real> FamilyTrace<T> {
    /// `Some(false)` past [`UNBOUNDED_GROWTH`], `Some(true)` below
    /// [`BOUNDED_GROWTH`], `None` in between or with fewer than two usable
    /// members.
    pub fn bounded(&self) -> Option<bool> {
        if self.growth >= UNBOUNDED_GROWTH {
            Some(false)
        } else if self.growth <= BOUNDED_GROWTH {
            Some(true)
        } else {
            None
        }
    }
}

/// Largest growth `R(end)/R(end ∓ 3 decades)`; infinite ratios give `∞`,
/// too few positive points give `NaN`.
pub fn decade_growth<T: Real>(points: &[[T; 2]]) -> f64 {
    if points.iter().any(|p| p[1].is_infinite()) {
        return f64::INFINITY;
    }
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p[1] > T::zero()).map(|p| (p[0].as_f64().log10(), p[1].as_f64())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    // nearest member at least three decades in from each end, else the other end
    let inner_hi = pts.iter().rev().find(|p| p.0 <= last.0 - 3.0).copied().unwrap_or(first);
    let inner_lo = pts.iter().find(|p| p.0 >= first.0 + 3.0).copied().unwrap_or(last);
    (last.1 / inner_hi.1).max(first.1 / inner_lo.1)
}

/// Best ratio found with the raw evaluation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "profile", rename_all = "snake_case", bound = "T: Real")]
pub enum Witness<T: Real> {
    Radial(DecreasingProfile<T>),
    BiRadial(BiDecreasingProfile<T>),
}

/// Step-profile refinement started from the best family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AscentSummary<T> {
    #[serde(with = "crate::scalar::extended")]
    pub start: T,
    #[serde(with = "crate::scalar::extended")]
    pub end: T,
    pub evaluations: usize,
    pub accepted: usize,
}

/// Empirical estimate of `‖T‖_{L^p_dec(w) → L^q(v)}` from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RatioReport<T: Real> {
    pub operator: String,
    #[serde(with = "crate::scalar::extended")]
    pub best_ratio: T,
    pub witness: Witness<T>,
    pub family_trace: Vec<FamilyTrace<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ascent: Option<AscentSummary<T>>,
    pub evaluations: usize,
}

impl<T: Real> RatioReport<T> {
    /// Unbounded if any trace is, bounded if all traces are.
    pub fn bounded(&self) -> Option<bool> {
        let verdicts: Vec<Option<bool>> = self.family_trace.iter().map(|t| t.bounded()).collect();
        if verdicts.contains(&Some(false)) {
            Some(false)
        } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Some(true)) {
            Some(true)
        } else {
            None
        }
    }

    /// Largest growth over all traces.
    pub fn growth(&self) -> f64 {
        self.family_trace.iter().map(|t| t.growth).filter(|g| !g.is_nan()).fold(f64::NAN, f64::max)
    }
}

/// `(∫_G w u^e)^{1/e}`, or the divergence.
pub(crate) fn weighted_norm<T: Real>(
    geom: &GroupGeometry<T>,
    w: &RadialWeight<T>,
    u: Arc<dyn Radial<T>>,
    e: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let mut breaks = w.breakpoints();
    breaks.extend(u.breakpoints());
    let ww = w.clone();
    let table = polar_table(
        geom,
        move |s| {
            let us = u.value(s);
            if us.is_zero() {
                T::zero()
            } else {
                mul0(ww.value(s), pow_ext(us, e))
            }
        },
        &breaks,
        cfg,
    );
    Ok(pow_ext(finite_total(&table)?, T::one() / e))
}

enum Outcome<T> {
    Ratio(T),
    Divergent(String),
    Skip(String),
}

fn classify<T: Real>(num: Result<T>, den: T) -> Result<Outcome<T>> {
    match num {
        Ok(n) if n.is_finite() => Ok(Outcome::Ratio(n / den)),
        Ok(_) => Ok(Outcome::Divergent("‖Tf‖_{L^q(v)} is infinite".into())),
        Err(e @ Error::Divergent { .. }) => Ok(Outcome::Divergent(format!("‖Tf‖_{{L^q(v)}} diverges: {e}"))),
        Err(e) => Err(e),
    }
}

struct Single<'a, T: Real> {
    geom: &'a GroupGeometry<T>,
    pair: ExponentPair<T>,
    op: OperatorSpec<T>,
    w: &'a RadialWeight<T>,
    v: &'a RadialWeight<T>,
    cfg: &'a QuadratureConfig<T>,
}

impl<T: Real> Single<'_, T> {
    fn eval(&self, f: &RadialProfile<T>) -> Result<Outcome<T>> {
        let den = match weighted_norm(self.geom, self.w, Arc::new(f.clone()), self.pair.p(), self.cfg) {
            Ok(d) if d > T::zero() && d.is_finite() => d,
            Ok(d) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} = {d}"))),
            Err(e @ Error::Divergent { .. }) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} diverges: {e}"))),
            Err(e) => return Err(e),
        };
        let num = match self.op.apply(self.geom, f, self.cfg) {
            Ok(tf) => weighted_norm(self.geom, self.v, tf, self.pair.q(), self.cfg),
            Err(e) => Err(e),
        };
        classify(num, den)
    }
}

struct Best<T: Real> {
    ratio: T,
    witness: Option<Witness<T>>,
}

impl<T: Real> Best<T> {
    fn offer(&mut self, r: T, w: impl FnOnce() -> Option<Witness<T>>) {
        if self.witness.is_none() || r > self.ratio {
            if let Some(w) = w() {
                self.ratio = r;
                self.witness = Some(w);
            }
        }
    }
}

fn trace_of<T: Real>(name: String, params: &[T], outcomes: Vec<Outcome<T>>, best: &mut Best<T>, mk: &dyn Fn(T) -> Option<Witness<T>>) -> FamilyTrace<T> {
    let mut trace = FamilyTrace { family: name, points: Vec::new(), divergent: Vec::new(), skipped: Vec::new(), growth: f64::NAN };
    for (&s, o) in params.iter().zip(outcomes) {
        match o {
            Outcome::Ratio(r) => {
                trace.points.push([s, r]);
                best.offer(r, || mk(s));
            }
            Outcome::Divergent(reason) => {
                trace.points.push([s, T::infinity()]);
                trace.divergent.push(Skipped { parameter: s, reason });
                best.offer(T::infinity(), || mk(s));
            }
            Outcome::Skip(reason) => trace.skipped.push(Skipped { parameter: s, reason }),
        }
    }
    trace.growth = decade_growth(&trace.points);
    trace
}

fn check_families<T: Real>(families: &[TestFamily<T>]) -> Result<()> {
    if families.is_empty() {
        return invalid("at least one test family is needed");
    }
    families.iter().try_for_each(|f| f.validate())
}

/// Measures `‖Tf‖_{L^q(v)} / ‖f‖_{L^p(w)}` along each family, then refines
/// the best member by coordinate ascent over decreasing step profiles for
/// the remaining `budget`.
///
/// Members with `‖f‖_{L^p(w)} ∈ {0, ∞}` are skipped; members with
/// `‖Tf‖_{L^q(v)} = ∞` enter the trace with ratio `∞`.
#[allow(clippy::too_many_arguments)]
pub fn ratio_maximize<T: Real>(
    geom: &GroupGeometry<T>,
    pair: ExponentPair<T>,
    op: OperatorSpec<T>,
    w: &RadialWeight<T>,
    v: &RadialWeight<T>,
    families: &[TestFamily<T>],
    budget: usize,
    seed: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RatioReport<T>> {
    op.check(geom)?;
    check_families(families)?;
    if w.geometry() != geom || v.geometry() != geom {
        return invalid("weights live on a different geometry");
    }
    let ctx = Single { geom, pair, op, w, v, cfg };
    let mut best = Best { ratio: T::zero(), witness: None };
    let mut traces = Vec::with_capacity(families.len());
    let mut evaluations = 0;
    let mut best_member: Option<(T, RadialProfile<T>)> = None;
    for fam in families {
        let params = fam.parameters();
        let outcomes = params.par_iter().map(|&s| ctx.eval(&fam.member(s))).collect::<Result<Vec<_>>>()?;
        evaluations += params.len();
        for (&s, o) in params.iter().zip(&outcomes) {
            if let Outcome::Ratio(r) = o {
                if best_member.as_ref().is_none_or(|(b, _)| *r > *b) {
                    best_member = Some((*r, fam.member(s)));
                }
            }
        }
        let mk = |s: T| DecreasingProfile::new(fam.member(s)).ok().map(Witness::Radial);
        traces.push(trace_of(fam.name().to_string(), &params, outcomes, &mut best, &mk));
    }
    let mut ascent = None;
    let remaining = budget.saturating_sub(evaluations);
    if remaining > 0 && best.ratio.is_finite() {
        if let Some((r0, f0)) = best_member {
            let (summary, h) = ascend(&ctx, &f0, r0, remaining, seed)?;
            evaluations += summary.evaluations;
            if summary.end > best.ratio {
                best.ratio = summary.end;
                best.witness = Some(Witness::Radial(h));
            }
            ascent = Some(summary);
        }
    }
    let witness = best.witness.unwrap_or_else(|| Witness::Radial(DecreasingProfile::indicator(T::one())));
    Ok(RatioReport { operator: op.label(), best_ratio: best.ratio, witness, family_trace: traces, ascent, evaluations })
}

/// Cells per decade and half-width in decades of the ascent grid.
const ASCENT_CELLS: i32 = 4;
const ASCENT_DECADES: i32 = 3;

/// Radius below which most of `f`'s `L¹` mass sits, used to centre the grid.
fn centre<T: Real>(f: &RadialProfile<T>) -> T {
    let b = f.breakpoints();
    b.into_iter().filter(|x| x.is_finite() && *x > T::zero()).fold(T::zero(), T::max).max(T::lit(1e-300))
}

fn ascend<T: Real>(
    ctx: &Single<'_, T>,
    start: &RadialProfile<T>,
    start_ratio: T,
    budget: usize,
    seed: u64,
) -> Result<(AscentSummary<T>, DecreasingProfile<T>)> {
    let c = centre(start);
    let edges: Vec<T> = (-ASCENT_CELLS * ASCENT_DECADES..=ASCENT_CELLS * ASCENT_DECADES)
        .map(|k| c * T::lit(10f64.powf(k as f64 / ASCENT_CELLS as f64)))
        .collect();
    // cell j is [e_{j-1}, e_j); sample the start profile at cell midpoints
    let mut h: Vec<T> = edges
        .iter()
        .enumerate()
        .map(|(j, &e)| {
            let a = if j == 0 { e / T::lit(2.0) } else { (edges[j - 1] * e).sqrt() };
            start.value(a).max(T::lit(1e-6) * start.value(edges[0] / T::lit(2.0)))
        })
        .collect();
    for j in 1..h.len() {
        h[j] = h[j].min(h[j - 1]);
    }
    let step = |h: &[T]| RadialProfile::Step { grid: edges.clone(), values: h.to_vec() };
    let mut evaluations = 1;
    let mut best = match ctx.eval(&step(&h))? {
        Outcome::Ratio(r) => r,
        _ => T::zero(),
    };
    let mut accepted = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = h.len();
    let spread = T::lit(4f64.ln());
    while evaluations < budget {
        let j = rng.gen_range(0..m);
        let tail = rng.gen_bool(0.5);
        let c = (spread * T::lit(rng.gen_range(-1.0..1.0))).exp();
        let mut trial = h.clone();
        let cap = if j == 0 { T::infinity() } else { trial[j - 1] / trial[j] };
        let c = c.min(cap);
        if tail {
            trial[j..].iter_mut().for_each(|x| *x = *x * c);
        } else {
            trial[j] = trial[j] * c;
            for i in j + 1..m {
                trial[i] = trial[i].min(trial[i - 1]);
            }
        }
        let top = trial[0];
        if !(top > T::zero()) || !top.is_finite() {
            continue;
        }
        trial.iter_mut().for_each(|x| *x = *x / top);
        evaluations += 1;
        if let Outcome::Ratio(r) = ctx.eval(&step(&trial))? {
            if r > best {
                best = r;
                h = trial;
                accepted += 1;
            }
        }
    }
    let witness = DecreasingProfile::new(step(&h))?;
    Ok((AscentSummary { start: start_ratio, end: best, evaluations, accepted }, witness))
}

struct Product<'a, T: Real> {
    geom: &'a ProductGeometry<T>,
    pair: ExponentPair<T>,
    op: ProductOperatorSpec<T>,
    w: &'a ProductWeight<T>,
    v: &'a ProductWeight<T>,
    cfg: &'a QuadratureConfig<T>,
}

/// `(∫∫ ρ (u₁ ⊗ u₂)^e)^{1/e}`.
fn tensor_norm<T: Real>(
    geom: &ProductGeometry<T>,
    rho: &ProductWeight<T>,
    u1: Arc<dyn Radial<T>>,
    u2: Arc<dyn Radial<T>>,
    e: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if let Some((r1, r2)) = rho.factors() {
        let a = weighted_norm(&geom.g1, r1, u1, e, cfg)?;
        if a.is_zero() {
            return Ok(a);
        }
        return Ok(mul0(a, weighted_norm(&geom.g2, r2, u2, e, cfg)?));
    }
    let (b1, b2) = (u1.breakpoints(), u2.breakpoints());
    let phi1 = Arc::new(move |t: T| pow_ext(u1.value(t), e));
    let phi2 = Arc::new(move |t: T| pow_ext(u2.value(t), e));
    let q = QuadrantTable::new(geom, &rho.density(), phi1, &b1, phi2, &b2, cfg);
    let total = q.integral(T::zero(), Region::Complement, T::zero(), Region::Complement);
    if !total.is_finite() {
        return Err(Error::Divergent { end: crate::error::End::Infinity, exponent: f64::NAN, partial: total.as_f64() });
    }
    Ok(pow_ext(total, T::one() / e))
}

/// Per-axis norms of every family member, for product weights.
struct Axes<T> {
    den: [Vec<Result<T>>; 2],
    num: [Vec<Result<T>>; 2],
}

fn factor_product<T: Real>(a: &Result<T>, b: &Result<T>) -> Result<T> {
    // 0 · ∞ = 0, as in the unfactored integral
    match a {
        Ok(x) if x.is_zero() => Ok(T::zero()),
        Ok(x) => Ok(mul0(*x, b.clone()?)),
        Err(e) => match b {
            Ok(y) if y.is_zero() => Ok(T::zero()),
            _ => Err(e.clone()),
        },
    }
}

impl<T: Real> Axes<T> {
    fn combine(&self, i: usize, j: usize) -> Result<Outcome<T>> {
        let den = match factor_product(&self.den[0][i], &self.den[1][j]) {
            Ok(d) if d > T::zero() && d.is_finite() => d,
            Ok(d) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} = {d}"))),
            Err(e @ Error::Divergent { .. }) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} diverges: {e}"))),
            Err(e) => return Err(e),
        };
        classify(factor_product(&self.num[0][i], &self.num[1][j]), den)
    }
}

impl<T: Real> Product<'_, T> {
    /// Norms factor when both weights are tensor products, so each axis is
    /// evaluated once per member instead of once per pair.
    fn factored(&self, members: &[RadialProfile<T>]) -> Result<Option<Axes<T>>> {
        let (Some((w1, w2)), Some((v1, v2))) = (self.w.factors(), self.v.factors()) else {
            return Ok(None);
        };
        let (p, q) = (self.pair.p(), self.pair.q());
        let axis = |g: &GroupGeometry<T>, first: bool, w: &RadialWeight<T>, v: &RadialWeight<T>| {
            let den: Vec<Result<T>> =
                members.par_iter().map(|f| weighted_norm(g, w, Arc::new(f.clone()), p, self.cfg)).collect();
            let num: Vec<Result<T>> = members
                .par_iter()
                .map(|f| self.op.axis(g, first, f, self.cfg).and_then(|u| weighted_norm(g, v, u, q, self.cfg)))
                .collect();
            (den, num)
        };
        let (d1, n1) = axis(&self.geom.g1, true, w1, v1);
        let (d2, n2) = axis(&self.geom.g2, false, w2, v2);
        // propagate hard errors, keep divergences for the combination step
        for r in d1.iter().chain(&n1).chain(&d2).chain(&n2) {
            if let Err(e) = r {
                if !matches!(e, Error::Divergent { .. }) {
                    return Err(e.clone());
                }
            }
        }
        Ok(Some(Axes { den: [d1, d2], num: [n1, n2] }))
    }

    fn eval(&self, f1: &RadialProfile<T>, f2: &RadialProfile<T>) -> Result<Outcome<T>> {
        let (p, q) = (self.pair.p(), self.pair.q());
        let den = match tensor_norm(self.geom, self.w, Arc::new(f1.clone()), Arc::new(f2.clone()), p, self.cfg) {
            Ok(d) if d > T::zero() && d.is_finite() => d,
            Ok(d) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} = {d}"))),
            Err(e @ Error::Divergent { .. }) => return Ok(Outcome::Skip(format!("‖f‖_{{L^p(w)}} diverges: {e}"))),
            Err(e) => return Err(e),
        };
        let num = (|| {
            let a = self.op.axis(&self.geom.g1, true, f1, self.cfg)?;
            let b = self.op.axis(&self.geom.g2, false, f2, self.cfg)?;
            tensor_norm(self.geom, self.v, a, b, q, self.cfg)
        })();
        classify(num, den)
    }
}

/// The product analogue of [`ratio_maximize`] on tensor members
/// `f_s ⊗ f_s` (diagonal) and `f_s ⊗ f_{s*}` with `s*` the mirror of `s`
/// in the parameter range (anti-diagonal).
pub fn ratio_maximize_product<T: Real>(
    geom: &ProductGeometry<T>,
    pair: ExponentPair<T>,
    op: ProductOperatorSpec<T>,
    w: &ProductWeight<T>,
    v: &ProductWeight<T>,
    families: &[TestFamily<T>],
    cfg: &QuadratureConfig<T>,
) -> Result<RatioReport<T>> {
    op.check(geom)?;
    check_families(families)?;
    if &w.geometry() != geom || &v.geometry() != geom {
        return invalid("weights live on a different product geometry");
    }
    let ctx = Product { geom, pair, op, w, v, cfg };
    let mut best = Best { ratio: T::zero(), witness: None };
    let mut traces = Vec::new();
    let mut evaluations = 0;
    for fam in families {
        let params = fam.parameters();
        let n = params.len();
        let members: Vec<RadialProfile<T>> = params.iter().map(|&s| fam.member(s)).collect();
        let factored = ctx.factored(&members)?;
        for (suffix, anti) in [("diagonal", false), ("anti_diagonal", true)] {
            // the mirror of params[i] in the log-symmetric grid
            let other = |i: usize| if anti { n - 1 - i } else { i };
            let outcomes = match &factored {
                Some(axes) => (0..n).map(|i| axes.combine(i, other(i))).collect::<Result<Vec<_>>>()?,
                None => (0..n)
                    .into_par_iter()
                    .map(|i| ctx.eval(&members[i], &members[other(i)]))
                    .collect::<Result<Vec<_>>>()?,
            };
            evaluations += n;
            let index = |s: T| params.iter().position(|&x| x == s).expect("trace parameter");
            let mk = |s: T| {
                let i = index(s);
                let b = BiRadial::tensor(members[i].clone(), members[other(i)].clone());
                BiDecreasingProfile::new(b).ok().map(Witness::BiRadial)
            };
            traces.push(trace_of(format!("{}/{suffix}", fam.name()), &params, outcomes, &mut best, &mk));
        }
    }
    let witness = best.witness.unwrap_or_else(|| {
        let one = RadialProfile::indicator(T::one());
        Witness::BiRadial(BiDecreasingProfile::new(BiRadial::tensor(one.clone(), one)).expect("indicator tensor"))
    });
    Ok(RatioReport { operator: op.label(), best_ratio: best.ratio, witness, family_trace: traces, ascent: None, evaluations })
}
