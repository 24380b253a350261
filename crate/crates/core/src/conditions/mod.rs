//! Supremum-type weight conditions and doubling tests.
//!
//! Every functional is evaluated on a logarithmic scan grid (kinks of the
//! inputs included), refined around the best point, and classified by the
//! growth of the scanned function over the last three decades at each end.

mod doubling;
mod product;
pub(crate) mod scan;
mod single;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{Finiteness, QuadratureConfig};
use crate::scalar::Real;

pub use doubling::{doubling_check, doubling_check_section, Axis, DoublingClass, DoublingReport, Membership};
pub use product::{a_conditions, double_hardy_cone_conditions, product_hardy_conditions, trace_condition_b};
pub(crate) use single::require_infinite_mass;
pub use single::{hardy_condition, hardy_cone_conditions, s_alpha_conditions, thm31_conditions, HardySide, SAlphaForm};

/// Exponents `1 < p ≤ q < ∞` with their conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairRepr<T>", into = "PairRepr<T>", bound = "T: Real")]
pub struct ExponentPair<T> {
    p: T,
    q: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct PairRepr<T> {
    #[serde(with = "crate::scalar::extended")]
    p: T,
    #[serde(with = "crate::scalar::extended")]
    q: T,
    #[serde(default, skip_deserializing, with = "crate::scalar::extended")]
    p_prime: T,
    #[serde(default, skip_deserializing, with = "crate::scalar::extended")]
    q_prime: T,
}

impl<T: Real> TryFrom<PairRepr<T>> for ExponentPair<T> {
    type Error = crate::error::Error;
    fn try_from(r: PairRepr<T>) -> Result<Self> {
        ExponentPair::new(r.p, r.q)
    }
}

impl<T: Real> From<ExponentPair<T>> for PairRepr<T> {
    fn from(e: ExponentPair<T>) -> Self {
        PairRepr { p: e.p, q: e.q, p_prime: e.p_prime(), q_prime: e.q_prime() }
    }
}

impl<T: Real> ExponentPair<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return invalid(format!("p must lie in (1, ∞), got {p}"));
        }
        if !(q >= p) || !q.is_finite() {
            return invalid(format!("q must lie in [p, ∞), got q={q} with p={p}"));
        }
        Ok(ExponentPair { p, q })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn p_prime(&self) -> T {
        self.p / (self.p - T::one())
    }

    pub fn q_prime(&self) -> T {
        self.q / (self.q - T::one())
    }
}

/// Outcome of a doubling-hypothesis check.
#[derive(Debug, Clone)]
pub(crate) struct Hypothesis {
    pub verified: bool,
    pub note: String,
}

/// Where a scanned supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Real")]
pub enum Argmax<T> {
    Radius(#[serde(with = "crate::scalar::extended")] T),
    Pair(#[serde(with = "crate::scalar::extended")] T, #[serde(with = "crate::scalar::extended")] T),
}

impl<T: Real> std::fmt::Display for Argmax<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Argmax::Radius(t) => write!(f, "{:e}", t.as_f64()),
            Argmax::Pair(a, b) => write!(f, "{:e};{:e}", a.as_f64(), b.as_f64()),
        }
    }
}

/// Growth of the scanned functional near both ends of the scan range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostics {
    /// Slope of `log₁₀` of the functional per decade as `t → 0`, measured
    /// towards the origin.
    #[serde(with = "crate::scalar::extended")]
    pub growth_at_zero: f64,
    #[serde(with = "crate::scalar::extended")]
    pub growth_at_infinity: f64,
    /// Largest value seen on the grid after refinement.
    #[serde(with = "crate::scalar::extended")]
    pub scanned_sup: f64,
    /// Set when the functional is infinite: what blows up and where.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
}

/// Result of one supremum functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ConditionReport<T> {
    pub id: String,
    #[serde(with = "crate::scalar::extended")]
    pub value: T,
    pub argmax: Argmax<T>,
    pub finite: Finiteness,
    pub tail_diagnostics: TailDiagnostics,
    /// Hypothesis branch or other context recorded by the evaluator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Whether the theorem's doubling hypothesis was confirmed; `None` when
    /// the functional has no such hypothesis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_verified: Option<bool>,
    /// `(t, value)` on the scan grid; one-variable functionals only.
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "scan_series")]
    pub scan: Vec<[T; 2]>,
}

impl<T: Real> ConditionReport<T> {
    fn with_hypothesis(mut self, h: &Hypothesis) -> Self {
        self.note = Some(h.note.clone());
        self.hypothesis_verified = Some(h.verified);
        self
    }
}

pub(crate) mod scan_series {
    use crate::scalar::{extended, Real};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(bound = "T: Real")]
    struct Point<T>(#[serde(with = "extended")] T, #[serde(with = "extended")] T);

    pub fn serialize<T: Real, S: Serializer>(v: &[[T; 2]], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| Point(p[0], p[1])))
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Vec<[T; 2]>, D::Error> {
        let v: Vec<Point<T>> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|p| [p.0, p.1]).collect())
    }
}

/// Scan range, grid sizes and the quadrature used for condition integrals.
#[derive(Debug, Clone)]
pub struct ScanConfig<T> {
    pub t_min: T,
    pub t_max: T,
    /// Grid points for one-variable suprema.
    pub points: usize,
    /// Grid points per axis for two-variable suprema.
    pub points_2d: usize,
    pub refine: bool,
    pub quadrature: QuadratureConfig<T>,
}

impl<T: Real> Default for ScanConfig<T> {
    fn default() -> Self {
        ScanConfig {
            t_min: T::lit(1e-6),
            t_max: T::lit(1e6),
            points: 400,
            points_2d: 120,
            refine: true,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl<T: Real> ScanConfig<T> {
    pub fn with_range(mut self, t_min: T, t_max: T) -> Result<Self> {
        if !(t_min > T::zero()) || !(t_max > t_min * T::lit(1e3)) || !t_max.is_finite() {
            return invalid(format!("scan range needs 0 < t_min and t_max ≥ 1000 t_min, got [{t_min}, {t_max}]"));
        }
        self.t_min = t_min;
        self.t_max = t_max;
        Ok(self)
    }

    /// Sets both grids from a one-variable density in points per decade;
    /// the two-variable grid keeps the default 120:400 proportion.
    pub fn with_density(mut self, per_decade: f64) -> Result<Self> {
        if !(per_decade >= 1.0) || !per_decade.is_finite() {
            return invalid(format!("grid density must be at least one point per decade, got {per_decade}"));
        }
        let decades = (self.t_max / self.t_min).log10().as_f64();
        self.points = (per_decade * decades).ceil() as usize + 1;
        self.points_2d = ((self.points as f64) * 0.3).ceil().max(8.0) as usize;
        Ok(self)
    }

    pub fn with_quadrature(mut self, q: QuadratureConfig<T>) -> Self {
        self.quadrature = q;
        self
    }
}
