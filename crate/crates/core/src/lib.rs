//! Numerical verification of two-weight inequalities for Riesz potentials
//! and Hardy-type operators restricted to radially decreasing functions on
//! homogeneous groups.
//!
//! A group enters only through its homogeneous dimension `Q`, the measure
//! of the unit sphere `σ(S)` and the quasi-triangle constant `c₀`
//! ([`geometry`]). Radial data are one-variable profiles ([`radial`]), the
//! operators reduce to one-dimensional singular integrals ([`operators`]),
//! and the characterizing weight functionals are evaluated as suprema over
//! a log grid with divergence diagnostics ([`conditions`]). [`duality`]
//! provides the level-function dual norm and the discretization tools used
//! in the proofs; [`verify`] measures operator norms directly and compares
//! them with the conditions.
//!
//! Everything is generic over [`scalar::Real`]; the `*F64` aliases below fix
//! the scalar to `f64`.
//!
//! ```
//! use rieszcone::{GroupGeometryF64, QuadratureConfigF64, RadialProfileF64};
//! use rieszcone::operators::riesz_full;
//!
//! let line = GroupGeometryF64::euclidean(1).unwrap();
//! let chi = RadialProfileF64::indicator(1.0);
//! let i = riesz_full(&line, 0.5, &chi, &QuadratureConfigF64::default()).unwrap();
//! // ∫_{-1}^{1} |2 − y|^{-1/2} dy
//! assert!((i.value(2.0) - (2.0 * 3f64.sqrt() - 2.0)).abs() < 1e-12);
//! ```

pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod scalar;
pub mod radial;
pub mod operators;
pub mod conditions;
pub mod duality;
pub mod verify;

pub use error::{Error, Result};

pub type GroupGeometryF64 = geometry::GroupGeometry<f64>;
pub type ProductGeometryF64 = geometry::ProductGeometry<f64>;
pub type QuadratureConfigF64 = quadrature::QuadratureConfig<f64>;
pub type RadialProfileF64 = radial::RadialProfile<f64>;
pub type DecreasingProfileF64 = radial::DecreasingProfile<f64>;
pub type BiRadialF64 = radial::BiRadial<f64>;
pub type RadialWeightF64 = radial::RadialWeight<f64>;
pub type ProductWeightF64 = radial::ProductWeight<f64>;
pub type ExponentPairF64 = conditions::ExponentPair<f64>;
pub type ScanConfigF64 = conditions::ScanConfig<f64>;
pub type ConditionReportF64 = conditions::ConditionReport<f64>;
pub type DualityRhsF64 = duality::DualityRhs<f64>;
pub type DualityReportF64 = duality::DualityReport<f64>;
pub type RatioReportF64 = verify::RatioReport<f64>;
pub type TheoremScenarioF64 = verify::TheoremScenario<f64>;
pub type VerdictF64 = verify::Verdict<f64>;
