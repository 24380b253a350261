use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProductGeometry;
use crate::quadrature::QuadratureConfig;
use crate::radial::{unit, BiDecreasingProfile, BiRadial, QuadrantTable, RadialProfile, Region};
use crate::scalar::{mul0, Real};

use super::riesz::{riesz_part, RieszPart, RieszProfile};

/// The four double Hardy operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyVariant {
    /// `H^{a,b}`: balls in both variables.
    NearNear,
    /// `H̃^{a,b}`: complements in both variables.
    FarFar,
    /// `H₁^{a,b}`: ball in the first variable, complement in the second.
    NearFar,
    /// `H₂^{a,b}`: complement in the first variable, ball in the second.
    FarNear,
}

impl HardyVariant {
    pub fn regions(self) -> (Region, Region) {
        match self {
            HardyVariant::NearNear => (Region::Ball, Region::Ball),
            HardyVariant::FarFar => (Region::Complement, Region::Complement),
            HardyVariant::NearFar => (Region::Ball, Region::Complement),
            HardyVariant::FarNear => (Region::Complement, Region::Ball),
        }
    }
}

/// Output of [`product_hardy`].
pub struct ProductHardyProfile<T: Real> {
    table: QuadrantTable<T>,
    a: T,
    b: T,
    regions: (Region, Region),
}

impl<T: Real> ProductHardyProfile<T> {
    pub fn value(&self, t: T, tau: T) -> T {
        self.table.integral(self.a * t, self.regions.0, self.b * tau, self.regions.1)
    }
}

/// Double Hardy operator on `G₁ × G₂` with dilations `a`, `b`.
pub fn product_hardy<T: Real>(
    geom: &ProductGeometry<T>,
    a: T,
    b: T,
    variant: HardyVariant,
    f: &BiRadial<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<ProductHardyProfile<T>> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::InvalidArgument("dilation parameters must be positive".into()));
    }
    f.validate()?;
    let table = QuadrantTable::new(geom, f, unit(), &[], unit(), &[], cfg);
    Ok(ProductHardyProfile { table, a, b, regions: variant.regions() })
}

/// The four pieces of `I_{α₁,α₂} = J J + J S + S J + S S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RieszPiece {
    JJ,
    JS,
    SJ,
    SS,
}

impl RieszPiece {
    pub const ALL: [RieszPiece; 4] = [RieszPiece::JJ, RieszPiece::JS, RieszPiece::SJ, RieszPiece::SS];

    fn parts(self) -> (RieszPart, RieszPart) {
        match self {
            RieszPiece::JJ => (RieszPart::Near, RieszPart::Near),
            RieszPiece::JS => (RieszPart::Near, RieszPart::Far),
            RieszPiece::SJ => (RieszPart::Far, RieszPart::Near),
            RieszPiece::SS => (RieszPart::Far, RieszPart::Far),
        }
    }
}

/// Output of [`product_riesz_pieces`]: `Σ cₖ P₁ₖ(t) P₂ₖ(τ)`.
pub struct ProductRieszProfile<T: Real> {
    terms: Vec<(T, RieszProfile<T>, RieszProfile<T>)>,
}

impl<T: Real> ProductRieszProfile<T> {
    pub fn value(&self, t: T, tau: T) -> T {
        self.terms
            .iter()
            .map(|(c, p1, p2)| {
                let x = p1.value(t);
                if x.is_zero() {
                    return T::zero();
                }
                mul0(*c, mul0(x, p2.value(tau)))
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

/// One piece of the product Riesz potential, computed per axis with exact
/// Euclidean kernel averages. Grid surfaces are expanded into shell
/// indicators.
pub fn product_riesz_pieces<T: Real>(
    geom: &ProductGeometry<T>,
    alpha1: T,
    alpha2: T,
    piece: RieszPiece,
    f: &BiDecreasingProfile<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<ProductRieszProfile<T>> {
    let (p1, p2) = piece.parts();
    let mut terms = Vec::new();
    match f.surface() {
        BiRadial::Separable { terms: sep } => {
            for k in sep {
                if k.coeff.is_zero() {
                    continue;
                }
                let a = riesz_part(&geom.g1, alpha1, &k.first, p1, cfg)?;
                let b = riesz_part(&geom.g2, alpha2, &k.second, p2, cfg)?;
                terms.push((k.coeff, a, b));
            }
        }
        BiRadial::Grid { t, tau, values } => {
            let shells = |g: &[T]| -> Vec<RadialProfile<T>> {
                let mut lo = T::zero();
                g.iter()
                    .map(|&hi| {
                        let s = RadialProfile::power_on(T::zero(), lo, hi);
                        lo = hi;
                        s
                    })
                    .collect()
            };
            let s1 = shells(t);
            let s2 = shells(tau);
            let a: Vec<_> = s1.iter().map(|s| riesz_part(&geom.g1, alpha1, s, p1, cfg)).collect::<Result<_>>()?;
            let b: Vec<_> = s2.iter().map(|s| riesz_part(&geom.g2, alpha2, s, p2, cfg)).collect::<Result<_>>()?;
            let n = tau.len();
            for i in 0..t.len() {
                for j in 0..n {
                    let v = values[i * n + j];
                    if !v.is_zero() {
                        terms.push((v, a[i].clone(), b[j].clone()));
                    }
                }
            }
        }
    }
    Ok(ProductRieszProfile { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GroupGeometry;

    fn setup() -> (ProductGeometry<f64>, QuadratureConfig<f64>) {
        let r1 = GroupGeometry::euclidean(1).unwrap();
        (ProductGeometry::new(r1, r1).unwrap(), QuadratureConfig::default())
    }

    #[test]
    fn product_hardy_examples() {
        let (g, cfg) = setup();
        let f = BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::indicator(1.0));
        let cases: [(HardyVariant, fn(f64, f64) -> f64); 3] = [
            (HardyVariant::NearNear, |t, s| 4.0 * t.min(1.0) * s.min(1.0)),
            (HardyVariant::FarFar, |t, s| 4.0 * (1.0 - t).max(0.0) * (1.0 - s).max(0.0)),
            (HardyVariant::NearFar, |t, s| 4.0 * t.min(1.0) * (1.0 - s).max(0.0)),
        ];
        for (variant, exact) in cases {
            let h = product_hardy(&g, 1.0, 1.0, variant, &f, &cfg).unwrap();
            for &(t, s) in &[(0.2, 0.3), (0.5, 2.0), (3.0, 0.9)] {
                assert!((h.value(t, s) - exact(t, s)).abs() < 1e-13, "{variant:?} {t} {s}");
            }
        }
    }

    #[test]
    fn riesz_pieces_sum_at_origin() {
        let (g, cfg) = setup();
        let f = BiDecreasingProfile::new(BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::indicator(1.0)))
            .unwrap();
        let x = 1e-12;
        let total: f64 = RieszPiece::ALL
            .iter()
            .map(|&p| product_riesz_pieces(&g, 0.5, 0.5, p, &f, &cfg).unwrap().value(x, x))
            .sum();
        assert!((total - 16.0).abs() < 1e-4, "{total}");
        let ss = product_riesz_pieces(&g, 0.5, 0.5, RieszPiece::SS, &f, &cfg).unwrap();
        assert_eq!(ss.value(0.6, 0.7), 0.0);
    }

    #[test]
    fn grid_surfaces_match_separable_form() {
        let (g, cfg) = setup();
        let sep = BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::indicator(2.0));
        let grid = BiRadial::sample(|t, s| sep.value(t, s), vec![0.5, 1.0], vec![1.0, 2.0]).unwrap();
        let a = product_riesz_pieces(&g, 0.5, 0.25, RieszPiece::JS, &BiDecreasingProfile::new(sep).unwrap(), &cfg).unwrap();
        let b = product_riesz_pieces(&g, 0.5, 0.25, RieszPiece::JS, &BiDecreasingProfile::new(grid).unwrap(), &cfg).unwrap();
        for &(t, s) in &[(0.3, 0.4), (0.8, 0.2)] {
            assert!((a.value(t, s) / b.value(t, s) - 1.0).abs() < 1e-11);
        }
    }
}
