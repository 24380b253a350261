//! Empirical side of the characterizations: operator ratios along named
//! test families, verdicts comparing them with the weight conditions, and
//! brute-force reference values.
//!
//! Unboundedness is a proxy: a trace whose ratio grows by at least
//! [`UNBOUNDED_GROWTH`] over three decades of the family parameter.

mod families;
mod oracle;
mod ratio;
mod sweep;

pub use families::TestFamily;
pub use oracle::{brute_force_oracle, brute_force_oracle_product, kernel_estimate_integral};
pub use ratio::{
    decade_growth, ratio_maximize, ratio_maximize_product, AscentSummary, FamilyTrace, OperatorSpec, ProductOperatorSpec,
    RatioReport, Skipped, Witness, BOUNDED_GROWTH, UNBOUNDED_GROWTH,
};
pub use sweep::{
    consistency_sweep, theorem_consistency_sweep, ConditionFlag, Direction, SweepSettings, Theorem, TheoremScenario, Verdict,
};
