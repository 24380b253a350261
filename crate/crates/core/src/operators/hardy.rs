use crate::error::{End, Error, Result};
use crate::geometry::GroupGeometry;
use crate::quadrature::{CumulativeTable, QuadratureConfig};
use crate::radial::{polar_table, Radial};
use crate::scalar::Real;

/// Output of [`hardy`], [`hardy_tail`] or [`weighted_hardy_h_alpha`].
#[derive(Clone, Debug)]
pub struct HardyProfile<T: Real> {
    table: CumulativeTable<T>,
    a: T,
    tail: bool,
    /// `t^{weight}` prefactor.
    weight: T,
    breaks: Vec<T>,
}

impl<T: Real> HardyProfile<T> {
    pub fn value(&self, t: T) -> T {
        let at = self.a * t;
        let v = if self.tail { self.table.above(at) } else { self.table.below(at) };
        if self.weight.is_zero() || v.is_zero() {
            v
        } else {
            v * t.powf(self.weight)
        }
    }

    /// The running integral of `σ f(s) s^{Q-1}` behind this operator.
    pub fn table(&self) -> &CumulativeTable<T> {
        &self.table
    }
}

impl<T: Real> Radial<T> for HardyProfile<T> {
    fn value(&self, t: T) -> T {
        HardyProfile::value(self, t)
    }
    fn breakpoints(&self) -> Vec<T> {
        self.breaks.clone()
    }
}

fn build<T: Real, R: Radial<T> + Clone + 'static>(
    geom: &GroupGeometry<T>,
    a: T,
    f: &R,
    cfg: &QuadratureConfig<T>,
) -> Result<(CumulativeTable<T>, Vec<T>)> {
    geom.validate()?;
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation parameter must be positive, got {a}")));
    }
    let breaks = f.breakpoints();
    let g = f.clone();
    let table = polar_table(geom, move |t| g.value(t), &breaks, cfg);
    let out_breaks = breaks.iter().map(|b| *b / a).collect();
    Ok((table, out_breaks))
}

/// `(H^a f)(t) = ∫_{B(e, a t)} f`.
pub fn hardy<T: Real, R: Radial<T> + Clone + 'static>(
    geom: &GroupGeometry<T>,
    a: T,
    f: &R,
    cfg: &QuadratureConfig<T>,
) -> Result<HardyProfile<T>> {
    let (table, breaks) = build(geom, a, f, cfg)?;
    let head = table.head();
    if head.is_divergent() {
        return Err(Error::Divergent { end: End::Origin, exponent: head.exponent.as_f64(), partial: f64::INFINITY });
    }
    Ok(HardyProfile { table, a, tail: false, weight: T::zero(), breaks })
}

/// `(H̃^a f)(t) = ∫_{G∖B(e, a t)} f`.
pub fn hardy_tail<T: Real, R: Radial<T> + Clone + 'static>(
    geom: &GroupGeometry<T>,
    a: T,
    f: &R,
    cfg: &QuadratureConfig<T>,
) -> Result<HardyProfile<T>> {
    let (table, breaks) = build(geom, a, f, cfg)?;
    let tail = table.tail();
    if tail.is_divergent() {
        return Err(Error::Divergent { end: End::Infinity, exponent: tail.exponent.as_f64(), partial: f64::INFINITY });
    }
    Ok(HardyProfile { table, a, tail: true, weight: T::zero(), breaks })
}

/// `(H_α f)(t) = t^{α−Q} (H f)(t)`.
pub fn weighted_hardy_h_alpha<T: Real, R: Radial<T> + Clone + 'static>(
    geom: &GroupGeometry<T>,
    alpha: T,
    f: &R,
    cfg: &QuadratureConfig<T>,
) -> Result<HardyProfile<T>> {
    geom.check_order(alpha)?;
    let mut h = hardy(geom, T::one(), f, cfg)?;
    h.weight = alpha - geom.q;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialProfile;

    fn setup() -> (GroupGeometry<f64>, QuadratureConfig<f64>) {
        (GroupGeometry::euclidean(1).unwrap(), QuadratureConfig::default())
    }

    #[test]
    fn hardy_examples() {
        let (r1, cfg) = setup();
        let ind = RadialProfile::indicator(1.0);
        let h = hardy(&r1, 1.0, &ind, &cfg).unwrap();
        let h2 = hardy(&r1, 2.0, &ind, &cfg).unwrap();
        for &t in &[0.1, 0.5, 0.9, 1.0, 3.0] {
            assert!((h.value(t) - 2.0 * t.min(1.0)).abs() < 1e-13);
            assert!((h2.value(t) - 2.0 * (2.0 * t).min(1.0)).abs() < 1e-13);
        }
        let r2 = GroupGeometry::euclidean(2).unwrap();
        let h = hardy(&r2, 1.0, &RadialProfile::power(-1.0), &cfg).unwrap();
        for &t in &[1e-3, 0.7, 40.0] {
            let exact = 2.0 * std::f64::consts::PI * t;
            assert!((h.value(t) / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hardy_tail_examples() {
        let (r1, cfg) = setup();
        let f = RadialProfile::power_on(-2.0, 1.0, f64::INFINITY);
        let h = hardy_tail(&r1, 1.0, &f, &cfg).unwrap();
        for &t in &[0.2, 1.0, 2.0, 1e3] {
            assert!((h.value(t) - 2.0 / t.max(1.0)).abs() < 1e-11, "t={t}");
        }
        let h = hardy_tail(&r1, 1.0, &RadialProfile::indicator(1.0), &cfg).unwrap();
        assert!((h.value(0.25) - 1.5).abs() < 1e-13);
        assert_eq!(h.value(2.0), 0.0);
        let zero = hardy_tail(&r1, 1.0, &RadialProfile::constant(0.0), &cfg).unwrap();
        assert_eq!(zero.value(1.0), 0.0);
        assert!(hardy_tail(&r1, 1.0, &RadialProfile::constant(1.0), &cfg).is_err());
    }

    #[test]
    fn weighted_hardy_examples() {
        let (r1, cfg) = setup();
        let h = weighted_hardy_h_alpha(&r1, 0.5, &RadialProfile::indicator(1.0), &cfg).unwrap();
        assert!((h.value(4.0) - 1.0).abs() < 1e-13);
        assert!(h.value(1e-8) < 1e-3);
        assert!(weighted_hardy_h_alpha(&r1, 1.0, &RadialProfile::indicator(1.0), &cfg).is_err());
    }
}
