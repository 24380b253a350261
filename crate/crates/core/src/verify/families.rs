use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::GroupGeometry;
use crate::radial::{log_grid, RadialProfile};
use crate::scalar::Real;

/// A named one-parameter family of radially decreasing test functions.
///
/// Every member is sampled at `points` log-spaced parameter values in
/// `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum TestFamily<T> {
    /// `χ_{B(e,s)}`, parameter `s`.
    Indicator {
        #[serde(with = "crate::scalar::extended")]
        lo: T,
        #[serde(with = "crate::scalar::extended")]
        hi: T,
        points: usize,
    },
    /// `min(t^{-γ}, h) χ_{(0,R)}`, parameter the cap `h`.
    TruncatedPower {
        #[serde(with = "crate::scalar::extended")]
        gamma: T,
        #[serde(with = "crate::scalar::extended")]
        radius: T,
        #[serde(with = "crate::scalar::extended")]
        lo: T,
        #[serde(with = "crate::scalar::extended")]
        hi: T,
        points: usize,
    },
    /// `χ_{B(e,s)} + χ_{B(e,ρs)}`, parameter `s`.
    TwoStep {
        #[serde(with = "crate::scalar::extended")]
        ratio: T,
        #[serde(with = "crate::scalar::extended")]
        lo: T,
        #[serde(with = "crate::scalar::extended")]
        hi: T,
        points: usize,
    },
    /// `Σ_{j<m} d^j χ_{B(e, ρ^j s)}`, parameter `s`.
    GeometricSteps {
        steps: usize,
        #[serde(with = "crate::scalar::extended")]
        ratio: T,
        #[serde(with = "crate::scalar::extended")]
        decay: T,
        #[serde(with = "crate::scalar::extended")]
        lo: T,
        #[serde(with = "crate::scalar::extended")]
        hi: T,
        points: usize,
    },
}

impl<T: Real> TestFamily<T> {
    /// Indicators over `[10⁻³, 10³]` and truncated powers `γ = Q/(2p)`
    /// with caps in `[1, 10⁶]`, 31 members each.
    pub fn standard(geom: &GroupGeometry<T>, p: T) -> Vec<Self> {
        vec![
            TestFamily::Indicator { lo: T::lit(1e-3), hi: T::lit(1e3), points: 31 },
            TestFamily::TruncatedPower {
                gamma: geom.q / (T::lit(2.0) * p),
                radius: T::one(),
                lo: T::one(),
                hi: T::lit(1e6),
                points: 31,
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::Indicator { .. } => "indicator",
            TestFamily::TruncatedPower { .. } => "truncated_power",
            TestFamily::TwoStep { .. } => "two_step",
            TestFamily::GeometricSteps { .. } => "geometric_steps",
        }
    }

    fn range(&self) -> (T, T, usize) {
        match *self {
            TestFamily::Indicator { lo, hi, points }
            | TestFamily::TruncatedPower { lo, hi, points, .. }
            | TestFamily::TwoStep { lo, hi, points, .. }
            | TestFamily::GeometricSteps { lo, hi, points, .. } => (lo, hi, points),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi, points) = self.range();
        if !(lo > T::zero()) || !(hi > lo) || !hi.is_finite() {
            return invalid(format!("{}: parameter range needs 0 < lo < hi < ∞", self.name()));
        }
        if points < 2 {
            return invalid(format!("{}: need at least two members", self.name()));
        }
        match *self {
            TestFamily::TruncatedPower { gamma, radius, .. } => {
                if !(gamma > T::zero()) || !(radius > T::zero()) || !gamma.is_finite() {
                    return invalid("truncated_power: need γ > 0 and R > 0");
                }
            }
            TestFamily::TwoStep { ratio, .. } => {
                if !(ratio > T::one()) || !ratio.is_finite() {
                    return invalid("two_step: ratio must exceed 1");
                }
            }
            TestFamily::GeometricSteps { steps, ratio, decay, .. } => {
                if steps == 0 || !(ratio > T::one()) || !(decay > T::zero() && decay <= T::one()) {
                    return invalid("geometric_steps: need steps ≥ 1, ratio > 1, 0 < decay ≤ 1");
                }
            }
            TestFamily::Indicator { .. } => {}
        }
        Ok(())
    }

    pub fn parameters(&self) -> Vec<T> {
        let (lo, hi, points) = self.range();
        log_grid(lo, hi, points)
    }

    /// The member at parameter `s`.
    pub fn member(&self, s: T) -> RadialProfile<T> {
        match *self {
            TestFamily::Indicator { .. } => RadialProfile::indicator(s),
            TestFamily::TruncatedPower { gamma, radius, .. } => {
                RadialProfile::TruncatedPower { coeff: T::one(), exponent: gamma, height: s, radius }
            }
            TestFamily::TwoStep { ratio, .. } => RadialProfile::Step { grid: vec![s, ratio * s], values: vec![T::lit(2.0), T::one()] },
            TestFamily::GeometricSteps { steps, ratio, decay, .. } => {
                let mut grid = Vec::with_capacity(steps);
                let mut values = Vec::with_capacity(steps);
                let (mut r, mut d) = (s, T::one());
                for _ in 0..steps {
                    grid.push(r);
                    values.push(d);
                    r = r * ratio;
                    d = d * decay;
                }
                // cell j carries Σ_{i ≥ j} d^i
                for j in (0..steps.saturating_sub(1)).rev() {
                    let next = values[j + 1];
                    values[j] += next;
                }
                RadialProfile::Step { grid, values }
            }
        }
    }
}
