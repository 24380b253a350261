use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{End, Error, Result};
use crate::geometry::{GroupGeometry, ProductGeometry};
use crate::quadrature::{CumulativeTable, FitStatus, Finiteness, QuadratureConfig};
use crate::scalar::Real;

use super::bi::BiRadial;
use super::RadialProfile;

/// Running integral `t ↦ σ ∫_0^t f(s) s^{Q-1} ds` of a radial function.
pub fn polar_table<T: Real, F>(geom: &GroupGeometry<T>, f: F, breaks: &[T], cfg: &QuadratureConfig<T>) -> CumulativeTable<T>
where
    F: Fn(T) -> T + Send + Sync + 'static,
{
    let sigma = geom.sigma_s;
    let qm1 = geom.q - T::one();
    CumulativeTable::from_fn(
        move |t: T| {
            let v = f(t);
            if v.is_zero() {
                T::zero()
            } else {
                sigma * v * t.powf(qm1)
            }
        },
        breaks,
        cfg,
    )
}

/// Diagnostics for the total mass of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub verdict: Finiteness,
    /// Fitted exponent of `w(t) t^{Q-1}` as `t → ∞`.
    #[serde(with = "crate::scalar::extended")]
    pub tail_exponent: f64,
    #[serde(with = "crate::scalar::extended")]
    pub total: f64,
}

struct Inner<T: Real> {
    geometry: GroupGeometry<T>,
    profile: RadialProfile<T>,
    table: CumulativeTable<T>,
    strictly_positive: bool,
    cfg: QuadratureConfig<T>,
}

/// Radial weight with its cumulative `W(t) = ∫_{B(e,t)} w`, built eagerly.
///
/// Nonnegative profiles are accepted. Conditions that need `W^{-p'}` or
/// `w^{1-p'}` call [`RadialWeight::require_positive`].
#[derive(Clone)]
pub struct RadialWeight<T: Real> {
    inner: Arc<Inner<T>>,
}

impl<T: Real> std::fmt::Debug for RadialWeight<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialWeight")
            .field("geometry", &self.inner.geometry)
            .field("profile", &self.inner.profile)
            .finish()
    }
}

impl<T: Real> RadialWeight<T> {
    pub fn new(geometry: GroupGeometry<T>, profile: RadialProfile<T>, cfg: &QuadratureConfig<T>) -> Result<Self> {
        geometry.validate()?;
        profile.validate()?;
        let breaks = profile.breakpoints();
        let p = profile.clone();
        let table = polar_table(&geometry, move |t| p.value(t), &breaks, cfg);
        let strictly_positive = positive_on_probes(&profile);
        Ok(RadialWeight {
            inner: Arc::new(Inner { geometry, profile, table, strictly_positive, cfg: cfg.clone() }),
        })
    }

    pub fn geometry(&self) -> &GroupGeometry<T> {
        &self.inner.geometry
    }

    pub fn profile(&self) -> &RadialProfile<T> {
        &self.inner.profile
    }

    pub fn config(&self) -> &QuadratureConfig<T> {
        &self.inner.cfg
    }

    pub fn value(&self, t: T) -> T {
        self.inner.profile.value(t)
    }

    pub fn breakpoints(&self) -> Vec<T> {
        self.inner.profile.breakpoints()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.inner.strictly_positive
    }

    pub fn require_positive(&self, role: &str) -> Result<()> {
        if self.inner.strictly_positive {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("weight {role} must be positive at every probe radius")))
        }
    }

    /// `W(t)`; errors when `w(s) s^{Q-1}` is not integrable at the origin.
    pub fn cumulative(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {t}")));
        }
        let head = self.inner.table.head();
        if head.is_divergent() {
            return Err(Error::Divergent { end: End::Origin, exponent: head.exponent.as_f64(), partial: f64::INFINITY });
        }
        Ok(self.inner.table.below(t))
    }

    /// `W(t)` with divergence mapped to `∞`.
    pub fn cumulative_ext(&self, t: T) -> T {
        self.inner.table.below(t)
    }

    /// `∫_{G∖B(e,t)} w`.
    pub fn tail_mass(&self, t: T) -> T {
        self.inner.table.above(t)
    }

    pub fn table(&self) -> &CumulativeTable<T> {
        &self.inner.table
    }

    pub fn total_mass(&self) -> T {
        self.inner.table.total()
    }

    /// Tail power fit of `w(t) t^{Q-1}`: infinite iff the exponent is `≥ -1`.
    pub fn total_mass_is_infinite(&self) -> MassReport {
        let tail = self.inner.table.tail();
        let verdict = match tail.status {
            FitStatus::Divergent => Finiteness::Infinite,
            FitStatus::Converged | FitStatus::Vanishing => {
                if self.inner.table.head().is_divergent() {
                    Finiteness::Infinite
                } else {
                    Finiteness::Finite
                }
            }
            FitStatus::Indeterminate => Finiteness::Indeterminate,
        };
        MassReport { verdict, tail_exponent: tail.exponent.as_f64(), total: self.total_mass().as_f64() }
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Self::new(self.inner.geometry, self.inner.profile.scaled(lambda), &self.inner.cfg)
    }
}

fn positive_on_probes<T: Real>(p: &RadialProfile<T>) -> bool {
    let mut probes: Vec<T> = (0..512).map(|i| T::lit(10f64.powf(-6.0 + 12.0 * i as f64 / 511.0))).collect();
    let breaks = p.breakpoints();
    for w in breaks.windows(2) {
        probes.push((w[0] * w[1]).sqrt());
    }
    if let Some(&b) = breaks.first() {
        probes.push(b / T::lit(2.0));
    }
    if let Some(&b) = breaks.last() {
        probes.push(b * T::lit(2.0));
    }
    probes.into_iter().all(|t| p.value(t) > T::zero())
}

/// Weight on `G₁ × G₂`: a product `w₁ ⊗ w₂` or a general bi-radial density.
#[derive(Clone, Debug)]
pub enum ProductWeight<T: Real> {
    Product(RadialWeight<T>, RadialWeight<T>),
    General { geometry: ProductGeometry<T>, density: BiRadial<T> },
}

impl<T: Real> ProductWeight<T> {
    pub fn product(w1: RadialWeight<T>, w2: RadialWeight<T>) -> Self {
        ProductWeight::Product(w1, w2)
    }

    pub fn general(geometry: ProductGeometry<T>, density: BiRadial<T>) -> Result<Self> {
        density.validate()?;
        Ok(ProductWeight::General { geometry, density })
    }

    pub fn geometry(&self) -> ProductGeometry<T> {
        match self {
            ProductWeight::Product(a, b) => ProductGeometry { g1: *a.geometry(), g2: *b.geometry() },
            ProductWeight::General { geometry, .. } => *geometry,
        }
    }

    pub fn factors(&self) -> Option<(&RadialWeight<T>, &RadialWeight<T>)> {
        match self {
            ProductWeight::Product(a, b) => Some((a, b)),
            ProductWeight::General { .. } => None,
        }
    }

    pub fn value(&self, t: T, tau: T) -> T {
        match self {
            ProductWeight::Product(a, b) => a.value(t) * b.value(tau),
            ProductWeight::General { density, .. } => density.value(t, tau),
        }
    }

    /// The density as a bi-radial function.
    pub fn density(&self) -> BiRadial<T> {
        match self {
            ProductWeight::Product(a, b) => BiRadial::separable(vec![(T::one(), a.profile().clone(), b.profile().clone())]),
            ProductWeight::General { density, .. } => density.clone(),
        }
    }

    /// `W(t, τ)`; factorizes exactly for product weights.
    pub fn cumulative(&self, t: T, tau: T, cfg: &QuadratureConfig<T>) -> T {
        match self {
            ProductWeight::Product(a, b) => crate::scalar::mul0(a.cumulative_ext(t), b.cumulative_ext(tau)),
            ProductWeight::General { geometry, density } => {
                let q = super::bi::QuadrantTable::new(geometry, density, unit(), &[], unit(), &[], cfg);
                q.integral(t, super::bi::Region::Ball, tau, super::bi::Region::Ball)
            }
        }
    }

    pub fn scaled(&self, lambda: T) -> Result<Self> {
        Ok(match self {
            ProductWeight::Product(a, b) => ProductWeight::Product(a.scaled(lambda)?, b.clone()),
            ProductWeight::General { geometry, density } => {
                ProductWeight::General { geometry: *geometry, density: density.scaled(lambda) }
            }
        })
    }

    pub fn swapped(&self) -> Self {
        match self {
            ProductWeight::Product(a, b) => ProductWeight::Product(b.clone(), a.clone()),
            ProductWeight::General { geometry, density } => {
                ProductWeight::General { geometry: geometry.swapped(), density: density.swapped() }
            }
        }
    }
}

pub(crate) fn unit<T: Real>() -> Arc<dyn Fn(T) -> T + Send + Sync> {
    Arc::new(|_t: T| T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn cumulative_examples() {
        let r1 = GroupGeometry::euclidean(1).unwrap();
        let w = RadialWeight::new(r1, RadialProfile::constant(1.0), &cfg()).unwrap();
        assert!((w.cumulative(3.0).unwrap() - 6.0).abs() < 1e-12);
        let g4 = GroupGeometry::new(4.0, 4.0, 1.0).unwrap();
        let w = RadialWeight::new(g4, RadialProfile::power(-2.0), &cfg()).unwrap();
        assert!((w.cumulative(2.0).unwrap() - 8.0).abs() < 1e-11);
        let r2 = GroupGeometry::euclidean(2).unwrap();
        let w = RadialWeight::new(r2, RadialProfile::power(-3.0), &cfg()).unwrap();
        assert!(matches!(w.cumulative(1.0), Err(Error::Divergent { end: End::Origin, .. })));
    }

    #[test]
    fn total_mass_examples() {
        let r1 = GroupGeometry::euclidean(1).unwrap();
        let r2 = GroupGeometry::euclidean(2).unwrap();
        let ones = RadialWeight::new(r1, RadialProfile::constant(1.0), &cfg()).unwrap();
        assert_eq!(ones.total_mass_is_infinite().verdict, Finiteness::Infinite);
        let shifted = RadialProfile::ShiftedPower { coeff: 1.0, shift: 1.0, exponent: -3.0 };
        let w = RadialWeight::new(r1, shifted, &cfg()).unwrap();
        let m = w.total_mass_is_infinite();
        assert_eq!(m.verdict, Finiteness::Finite);
        assert!((m.total - 1.0).abs() < 1e-10, "{}", m.total);
        let w = RadialWeight::new(r2, RadialProfile::power(-2.0), &cfg()).unwrap();
        assert_eq!(w.total_mass_is_infinite().verdict, Finiteness::Infinite);
    }

    #[test]
    fn positivity_flag() {
        let r1 = GroupGeometry::euclidean(1).unwrap();
        let w = RadialWeight::new(r1, RadialProfile::indicator(1.0), &cfg()).unwrap();
        assert!(!w.is_strictly_positive());
        assert!(w.require_positive("w").is_err());
        let w = RadialWeight::new(r1, RadialProfile::power(0.5), &cfg()).unwrap();
        assert!(w.is_strictly_positive());
    }

    #[test]
    fn product_cumulative_factorizes() {
        let r1 = GroupGeometry::euclidean(1).unwrap();
        let r2 = GroupGeometry::euclidean(2).unwrap();
        let w1 = RadialWeight::new(r1, RadialProfile::power(0.5), &cfg()).unwrap();
        let w2 = RadialWeight::new(r2, RadialProfile::Exponential { coeff: 1.0, rate: -1.0 }, &cfg()).unwrap();
        let w = ProductWeight::product(w1.clone(), w2.clone());
        let (t, tau) = (1.7, 0.3);
        assert_eq!(w.cumulative(t, tau, &cfg()), w1.cumulative(t).unwrap() * w2.cumulative(tau).unwrap());
        let general = ProductWeight::general(w.geometry(), w.density()).unwrap();
        let g = general.cumulative(t, tau, &cfg());
        assert!((g / w.cumulative(t, tau, &cfg()) - 1.0).abs() < 1e-12);
    }
}
