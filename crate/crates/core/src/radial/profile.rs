use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Anything that is a function of the radius alone.
pub trait Radial<T>: Send + Sync {
    fn value(&self, t: T) -> T;

    /// Radii where the function has a jump or a kink.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T, R: Radial<T> + ?Sized> Radial<T> for std::sync::Arc<R> {
    fn value(&self, t: T) -> T {
        (**self).value(t)
    }
    fn breakpoints(&self) -> Vec<T> {
        (**self).breakpoints()
    }
}

fn one<T: Real>() -> T {
    T::one()
}

fn infinity<T: Real>() -> T {
    T::infinity()
}

/// Nonnegative function of the radius `t > 0`.
///
/// Step profiles take `values[i]` on `[grid[i-1], grid[i])` with
/// `grid[-1] = 0`, and vanish from the last grid point on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum RadialProfile<T> {
    /// `coeff · t^exponent` on `[lo, hi)`, zero elsewhere.
    Power {
        #[serde(with = "crate::scalar::extended", default = "one")]
        coeff: T,
        #[serde(with = "crate::scalar::extended")]
        exponent: T,
        #[serde(with = "crate::scalar::extended", default)]
        lo: T,
        #[serde(with = "crate::scalar::extended", default = "infinity")]
        hi: T,
    },
    /// `coeff · min(t^{-exponent}, height)` on `(0, radius)`.
    TruncatedPower {
        #[serde(with = "crate::scalar::extended", default = "one")]
        coeff: T,
        #[serde(with = "crate::scalar::extended")]
        exponent: T,
        #[serde(with = "crate::scalar::extended", default = "infinity")]
        height: T,
        #[serde(with = "crate::scalar::extended", default = "infinity")]
        radius: T,
    },
    /// `coeff · (shift + t)^exponent`.
    ShiftedPower {
        #[serde(with = "crate::scalar::extended", default = "one")]
        coeff: T,
        #[serde(with = "crate::scalar::extended")]
        shift: T,
        #[serde(with = "crate::scalar::extended")]
        exponent: T,
    },
    /// `coeff · e^{rate · t}`.
    Exponential {
        #[serde(with = "crate::scalar::extended", default = "one")]
        coeff: T,
        #[serde(with = "crate::scalar::extended")]
        rate: T,
    },
    Step {
        #[serde(with = "crate::scalar::extended::vec")]
        grid: Vec<T>,
        #[serde(with = "crate::scalar::extended::vec")]
        values: Vec<T>,
    },
}

impl<T: Real> RadialProfile<T> {
    pub fn constant(c: T) -> Self {
        RadialProfile::Power { coeff: c, exponent: T::zero(), lo: T::zero(), hi: T::infinity() }
    }

    pub fn power(exponent: T) -> Self {
        RadialProfile::Power { coeff: T::one(), exponent, lo: T::zero(), hi: T::infinity() }
    }

    /// Indicator of `(0, radius)`.
    pub fn indicator(radius: T) -> Self {
        RadialProfile::Power { coeff: T::one(), exponent: T::zero(), lo: T::zero(), hi: radius }
    }

    pub fn power_on(exponent: T, lo: T, hi: T) -> Self {
        RadialProfile::Power { coeff: T::one(), exponent, lo, hi }
    }

    pub fn step(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        let p = RadialProfile::Step { grid, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |x: T, what: &str| {
            if x >= T::zero() && !x.is_nan() {
                Ok(())
            } else {
                invalid(format!("{what} must be nonnegative, got {x}"))
            }
        };
        match self {
            RadialProfile::Power { coeff, exponent, lo, hi } => {
                nonneg(*coeff, "coeff")?;
                if !exponent.is_finite() {
                    return invalid("power exponent must be finite");
                }
                nonneg(*lo, "lo")?;
                if !(hi > lo) {
                    return invalid(format!("power support [{lo}, {hi}) is empty"));
                }
            }
            RadialProfile::TruncatedPower { coeff, exponent, height, radius } => {
                nonneg(*coeff, "coeff")?;
                if !exponent.is_finite() {
                    return invalid("truncated power exponent must be finite");
                }
                if !(*height > T::zero()) || !(*radius > T::zero()) {
                    return invalid("truncation height and radius must be positive");
                }
            }
            RadialProfile::ShiftedPower { coeff, shift, exponent } => {
                nonneg(*coeff, "coeff")?;
                if !(*shift > T::zero()) || !shift.is_finite() || !exponent.is_finite() {
                    return invalid("shifted power needs a positive shift and finite exponent");
                }
            }
            RadialProfile::Exponential { coeff, rate } => {
                nonneg(*coeff, "coeff")?;
                if !rate.is_finite() {
                    return invalid("exponential rate must be finite");
                }
            }
            RadialProfile::Step { grid, values } => {
                if grid.is_empty() || grid.len() != values.len() {
                    return invalid(format!(
                        "step profile needs matching nonempty grid and values, got {} and {}",
                        grid.len(),
                        values.len()
                    ));
                }
                if !(grid[0] > T::zero()) || !grid.iter().all(|g| g.is_finite()) {
                    return invalid("step grid must be positive and finite");
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return invalid("step grid must be strictly increasing");
                }
                for v in values {
                    nonneg(*v, "step value")?;
                    if !v.is_finite() {
                        return invalid("step values must be finite");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: T) -> T {
        match self {
            RadialProfile::Power { coeff, exponent, lo, hi } => {
                if t >= *lo && t < *hi {
                    if exponent.is_zero() {
                        *coeff
                    } else {
                        *coeff * t.powf(*exponent)
                    }
                } else {
                    T::zero()
                }
            }
            RadialProfile::TruncatedPower { coeff, exponent, height, radius } => {
                if t < *radius {
                    *coeff * t.powf(-*exponent).min(*height)
                } else {
                    T::zero()
                }
            }
            RadialProfile::ShiftedPower { coeff, shift, exponent } => *coeff * (*shift + t).powf(*exponent),
            RadialProfile::Exponential { coeff, rate } => *coeff * (*rate * t).exp(),
            RadialProfile::Step { grid, values } => {
                let k = grid.partition_point(|g| *g <= t);
                values.get(k).copied().unwrap_or_else(T::zero)
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<T> {
        let positive_finite = |x: T| x > T::zero() && x.is_finite();
        let mut out = Vec::new();
        match self {
            RadialProfile::Power { lo, hi, .. } => {
                out.extend([*lo, *hi].into_iter().filter(|x| positive_finite(*x)));
            }
            RadialProfile::TruncatedPower { exponent, height, radius, .. } => {
                if !exponent.is_zero() && height.is_finite() {
                    let kink = height.powf(-T::one() / *exponent);
                    if positive_finite(kink) && kink < *radius {
                        out.push(kink);
                    }
                }
                if positive_finite(*radius) {
                    out.push(*radius);
                }
            }
            RadialProfile::ShiftedPower { shift, .. } => out.push(*shift),
            RadialProfile::Exponential { .. } => {}
            RadialProfile::Step { grid, .. } => out.extend(grid.iter().copied()),
        }
        out
    }

    /// `(c, v)` with the profile equal to `v` on `(0, c)`, for the
    /// parametric families that start flat.
    pub(crate) fn constant_head(&self) -> Option<(T, T)> {
        match *self {
            RadialProfile::TruncatedPower { coeff, exponent, height, radius } if exponent > T::zero() && height.is_finite() => {
                let c = height.powf(-T::one() / exponent).min(radius);
                (c > T::zero()).then_some((c, coeff * height))
            }
            RadialProfile::Power { coeff, exponent, lo, hi } if exponent.is_zero() && lo.is_zero() && hi.is_finite() => {
                Some((hi, coeff))
            }
            _ => None,
        }
    }

    /// `λ · self`.
    pub fn scaled(&self, lambda: T) -> Self {
        let mut p = self.clone();
        match &mut p {
            RadialProfile::Power { coeff, .. }
            | RadialProfile::TruncatedPower { coeff, .. }
            | RadialProfile::ShiftedPower { coeff, .. }
            | RadialProfile::Exponential { coeff, .. } => *coeff *= lambda,
            RadialProfile::Step { values, .. } => values.iter_mut().for_each(|v| *v *= lambda),
        }
        p
    }

    /// Whether the profile is constant between consecutive breakpoints.
    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            RadialProfile::Power { exponent, .. } => exponent.is_zero(),
            RadialProfile::TruncatedPower { exponent, .. } => exponent.is_zero(),
            RadialProfile::Exponential { rate, .. } => rate.is_zero(),
            RadialProfile::ShiftedPower { exponent, .. } => exponent.is_zero(),
            RadialProfile::Step { .. } => true,
        }
    }

    /// Whether the profile vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            RadialProfile::Power { coeff, .. }
            | RadialProfile::TruncatedPower { coeff, .. }
            | RadialProfile::ShiftedPower { coeff, .. }
            | RadialProfile::Exponential { coeff, .. } => coeff.is_zero(),
            RadialProfile::Step { values, .. } => values.iter().all(|v| v.is_zero()),
        }
    }

    /// Structural monotonicity plus a 512-point probe on `[1e-6, 1e6]`.
    pub fn is_nonincreasing(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let structural = match self {
            RadialProfile::Power { exponent, lo, .. } => *exponent <= T::zero() && lo.is_zero(),
            RadialProfile::TruncatedPower { exponent, .. } => *exponent >= T::zero(),
            RadialProfile::ShiftedPower { exponent, .. } => *exponent <= T::zero(),
            RadialProfile::Exponential { rate, .. } => *rate <= T::zero(),
            RadialProfile::Step { values, .. } => return values.windows(2).all(|w| w[1] <= w[0]),
        };
        if !structural {
            return false;
        }
        let mut probes: Vec<T> = (0..512).map(|i| T::lit(10f64.powf(-6.0 + 12.0 * i as f64 / 511.0))).collect();
        for b in self.breakpoints() {
            probes.push(b);
            probes.push(b * (T::one() - T::epsilon().sqrt()));
        }
        probes.sort_by(|a, b| a.partial_cmp(b).expect("finite probes"));
        probes.windows(2).all(|w| self.value(w[1]) <= self.value(w[0]))
    }
}

impl<T: Real> Radial<T> for RadialProfile<T> {
    fn value(&self, t: T) -> T {
        RadialProfile::value(self, t)
    }
    fn breakpoints(&self) -> Vec<T> {
        RadialProfile::breakpoints(self)
    }
}

/// Member of the cone of nonincreasing nonnegative profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialProfile<T>", into = "RadialProfile<T>", bound = "T: Real")]
pub struct DecreasingProfile<T: Real>(RadialProfile<T>);

impl<T: Real> DecreasingProfile<T> {
    pub fn new(p: RadialProfile<T>) -> Result<Self> {
        p.validate()?;
        if !p.is_nonincreasing() {
            return invalid("profile is not nonincreasing");
        }
        Ok(DecreasingProfile(p))
    }

    pub fn indicator(radius: T) -> Self {
        DecreasingProfile(RadialProfile::indicator(radius))
    }

    pub fn profile(&self) -> &RadialProfile<T> {
        &self.0
    }

    pub fn into_profile(self) -> RadialProfile<T> {
        self.0
    }

    pub fn value(&self, t: T) -> T {
        self.0.value(t)
    }

    pub fn scaled(&self, lambda: T) -> Self {
        assert!(lambda >= T::zero(), "scaling must keep the profile nonnegative");
        DecreasingProfile(self.0.scaled(lambda))
    }
}

impl<T: Real> TryFrom<RadialProfile<T>> for DecreasingProfile<T> {
    type Error = crate::error::Error;
    fn try_from(p: RadialProfile<T>) -> Result<Self> {
        DecreasingProfile::new(p)
    }
}

impl<T: Real> From<DecreasingProfile<T>> for RadialProfile<T> {
    fn from(d: DecreasingProfile<T>) -> Self {
        d.0
    }
}

impl<T: Real> Radial<T> for DecreasingProfile<T> {
    fn value(&self, t: T) -> T {
        self.0.value(t)
    }
    fn breakpoints(&self) -> Vec<T> {
        self.0.breakpoints()
    }
}
