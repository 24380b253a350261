use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::ProductGeometry;
use crate::quadrature::{CumulativeTable, QuadratureConfig};
use crate::scalar::{mul0, Real};

use super::weight::polar_table;
use super::RadialProfile;

/// Function of the two radii `(t, τ)` on `G₁ × G₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum BiRadial<T> {
    /// `Σ cₖ fₖ(t) gₖ(τ)`.
    Separable { terms: Vec<SeparableTerm<T>> },
    /// Tensor step surface: `values[i * tau.len() + j]` on the cell
    /// `[t_{i-1}, t_i) × [τ_{j-1}, τ_j)`, zero outside the last grid lines.
    Grid {
        #[serde(with = "crate::scalar::extended::vec")]
        t: Vec<T>,
        #[serde(with = "crate::scalar::extended::vec")]
        tau: Vec<T>,
        #[serde(with = "crate::scalar::extended::vec")]
        values: Vec<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct SeparableTerm<T> {
    #[serde(with = "crate::scalar::extended")]
    pub coeff: T,
    pub first: RadialProfile<T>,
    pub second: RadialProfile<T>,
}

/// Strictly increasing log-spaced grid of `m` points.
pub fn log_grid<T: Real>(lo: T, hi: T, m: usize) -> Vec<T> {
    assert!(m >= 2 && lo > T::zero() && hi > lo, "log grid needs 0 < lo < hi and two points");
    let (a, b) = (lo.ln(), hi.ln());
    (0..m)
        .map(|i| (a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(m - 1)).exp())
        .collect()
}

/// Representative point of the step cell ending at `grid[i]`.
pub(crate) fn cell_center<T: Real>(grid: &[T], i: usize) -> T {
    if i == 0 {
        grid[0] / T::lit(2.0)
    } else {
        (grid[i - 1] * grid[i]).sqrt()
    }
}

impl<T: Real> BiRadial<T> {
    pub fn separable(terms: Vec<(T, RadialProfile<T>, RadialProfile<T>)>) -> Self {
        BiRadial::Separable {
            terms: terms.into_iter().map(|(coeff, first, second)| SeparableTerm { coeff, first, second }).collect(),
        }
    }

    pub fn tensor(f: RadialProfile<T>, g: RadialProfile<T>) -> Self {
        Self::separable(vec![(T::one(), f, g)])
    }

    /// Samples `f` at cell centres of the tensor grid.
    pub fn sample<F: Fn(T, T) -> T>(f: F, t: Vec<T>, tau: Vec<T>) -> Result<Self> {
        let mut values = Vec::with_capacity(t.len() * tau.len());
        for i in 0..t.len() {
            let x = cell_center(&t, i);
            for j in 0..tau.len() {
                values.push(f(x, cell_center(&tau, j)));
            }
        }
        let b = BiRadial::Grid { t, tau, values };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BiRadial::Separable { terms } => {
                for term in terms {
                    if !(term.coeff >= T::zero()) {
                        return invalid("separable coefficients must be nonnegative");
                    }
                    term.first.validate()?;
                    term.second.validate()?;
                }
            }
            BiRadial::Grid { t, tau, values } => {
                for g in [t, tau] {
                    if g.is_empty() || !(g[0] > T::zero()) || g.windows(2).any(|w| !(w[1] > w[0])) {
                        return invalid("bi-radial grids must be positive and strictly increasing");
                    }
                }
                if values.len() != t.len() * tau.len() {
                    return invalid("bi-radial grid values do not match the grid shape");
                }
                if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
                    return invalid("bi-radial grid values must be finite and nonnegative");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: T, tau: T) -> T {
        match self {
            BiRadial::Separable { terms } => terms
                .iter()
                .map(|k| mul0(k.coeff, mul0(k.first.value(t), k.second.value(tau))))
                .fold(T::zero(), |a, b| a + b),
            BiRadial::Grid { t: tg, tau: sg, values } => {
                let i = tg.partition_point(|g| *g <= t);
                let j = sg.partition_point(|g| *g <= tau);
                if i >= tg.len() || j >= sg.len() {
                    T::zero()
                } else {
                    values[i * sg.len() + j]
                }
            }
        }
    }

    pub fn breakpoints(&self) -> (Vec<T>, Vec<T>) {
        match self {
            BiRadial::Separable { terms } => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for k in terms {
                    a.extend(k.first.breakpoints());
                    b.extend(k.second.breakpoints());
                }
                (a, b)
            }
            BiRadial::Grid { t, tau, .. } => (t.clone(), tau.clone()),
        }
    }

    pub fn scaled(&self, lambda: T) -> Self {
        match self {
            BiRadial::Separable { terms } => BiRadial::Separable {
                terms: terms
                    .iter()
                    .map(|k| SeparableTerm { coeff: k.coeff * lambda, first: k.first.clone(), second: k.second.clone() })
                    .collect(),
            },
            BiRadial::Grid { t, tau, values } => {
                BiRadial::Grid { t: t.clone(), tau: tau.clone(), values: values.iter().map(|v| *v * lambda).collect() }
            }
        }
    }

    pub fn swapped(&self) -> Self {
        match self {
            BiRadial::Separable { terms } => BiRadial::Separable {
                terms: terms
                    .iter()
                    .map(|k| SeparableTerm { coeff: k.coeff, first: k.second.clone(), second: k.first.clone() })
                    .collect(),
            },
            BiRadial::Grid { t, tau, values } => {
                let (m, n) = (t.len(), tau.len());
                let mut out = vec![T::zero(); m * n];
                for i in 0..m {
                    for j in 0..n {
                        out[j * m + i] = values[i * n + j];
                    }
                }
                BiRadial::Grid { t: tau.clone(), tau: t.clone(), values: out }
            }
        }
    }

    /// Pointwise `self^e` of a grid surface, with `0^(-e) = ∞`.
    pub fn powered(&self, e: T) -> Option<Self> {
        match self {
            BiRadial::Grid { t, tau, values } => Some(BiRadial::Grid {
                t: t.clone(),
                tau: tau.clone(),
                values: values.iter().map(|v| crate::scalar::pow_ext(*v, e)).collect(),
            }),
            BiRadial::Separable { .. } => None,
        }
    }

    /// Nonincreasing in each radius with the other fixed.
    pub fn is_bi_decreasing(&self) -> bool {
        match self {
            BiRadial::Separable { terms } => {
                terms.iter().all(|k| k.coeff.is_zero() || (k.first.is_nonincreasing() && k.second.is_nonincreasing()))
            }
            BiRadial::Grid { t, tau, values } => {
                let (m, n) = (t.len(), tau.len());
                let rows = (0..m).all(|i| (1..n).all(|j| values[i * n + j] <= values[i * n + j - 1]));
                let cols = (0..n).all(|j| (1..m).all(|i| values[i * n + j] <= values[(i - 1) * n + j]));
                rows && cols
            }
        }
    }
}

/// Element of the cone of bi-radial functions decreasing in each variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BiRadial<T>", into = "BiRadial<T>", bound = "T: Real")]
pub struct BiDecreasingProfile<T: Real>(BiRadial<T>);

impl<T: Real> BiDecreasingProfile<T> {
    pub fn new(b: BiRadial<T>) -> Result<Self> {
        b.validate()?;
        if !b.is_bi_decreasing() {
            return invalid("bi-radial profile is not nonincreasing in each variable");
        }
        Ok(BiDecreasingProfile(b))
    }

    pub fn surface(&self) -> &BiRadial<T> {
        &self.0
    }

    pub fn value(&self, t: T, tau: T) -> T {
        self.0.value(t, tau)
    }
}

impl<T: Real> TryFrom<BiRadial<T>> for BiDecreasingProfile<T> {
    type Error = crate::error::Error;
    fn try_from(b: BiRadial<T>) -> Result<Self> {
        BiDecreasingProfile::new(b)
    }
}

impl<T: Real> From<BiDecreasingProfile<T>> for BiRadial<T> {
    fn from(b: BiDecreasingProfile<T>) -> Self {
        b.0
    }
}

/// Which part of a group an integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `B(e, a)`.
    Ball,
    /// `G ∖ B(e, a)`.
    Complement,
}

fn query<T: Real>(table: &CumulativeTable<T>, a: T, region: Region) -> T {
    match region {
        Region::Ball => table.below(a),
        Region::Complement => table.above(a),
    }
}

type Factor<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

enum QuadrantKind<T: Real> {
    Separable(Vec<(T, CumulativeTable<T>, CumulativeTable<T>)>),
    Grid { t: Vec<T>, tau: Vec<T>, values: Vec<T>, first: CumulativeTable<T>, second: CumulativeTable<T> },
}

/// `(a₁, a₂) ↦ ∫∫_{E₁(a₁)×E₂(a₂)} v(x,y) φ₁(r₁(x)) φ₂(r₂(y)) dx dy` for
/// balls or complements `Eᵢ`.
pub struct QuadrantTable<T: Real> {
    kind: QuadrantKind<T>,
}

impl<T: Real> QuadrantTable<T> {
    pub fn new(
        geom: &ProductGeometry<T>,
        density: &BiRadial<T>,
        phi1: Factor<T>,
        breaks1: &[T],
        phi2: Factor<T>,
        breaks2: &[T],
        cfg: &QuadratureConfig<T>,
    ) -> Self {
        let kind = match density {
            BiRadial::Separable { terms } => QuadrantKind::Separable(
                terms
                    .iter()
                    .map(|k| {
                        let (f, p1) = (k.first.clone(), phi1.clone());
                        let mut b1 = k.first.breakpoints();
                        b1.extend_from_slice(breaks1);
                        let t1 = polar_table(&geom.g1, move |t| mul0(f.value(t), p1(t)), &b1, cfg);
                        let (g, p2) = (k.second.clone(), phi2.clone());
                        let mut b2 = k.second.breakpoints();
                        b2.extend_from_slice(breaks2);
                        let t2 = polar_table(&geom.g2, move |t| mul0(g.value(t), p2(t)), &b2, cfg);
                        (k.coeff, t1, t2)
                    })
                    .collect(),
            ),
            BiRadial::Grid { t, tau, values } => {
                let mut b1 = t.clone();
                b1.extend_from_slice(breaks1);
                let mut b2 = tau.clone();
                b2.extend_from_slice(breaks2);
                let p1 = phi1.clone();
                let p2 = phi2.clone();
                QuadrantKind::Grid {
                    t: t.clone(),
                    tau: tau.clone(),
                    values: values.clone(),
                    first: polar_table(&geom.g1, move |x| p1(x), &b1, cfg),
                    second: polar_table(&geom.g2, move |x| p2(x), &b2, cfg),
                }
            }
        };
        QuadrantTable { kind }
    }

    pub fn integral(&self, a1: T, r1: Region, a2: T, r2: Region) -> T {
        match &self.kind {
            QuadrantKind::Separable(terms) => terms
                .iter()
                .map(|(c, t1, t2)| mul0(*c, mul0(query(t1, a1, r1), query(t2, a2, r2))))
                .fold(T::zero(), |a, b| a + b),
            QuadrantKind::Grid { t, tau, values, first, second } => {
                let phi = cell_weights(first, t, a1, r1);
                let psi = cell_weights(second, tau, a2, r2);
                let n = tau.len();
                let mut acc = T::zero();
                for (i, &pi) in phi.iter().enumerate() {
                    if pi.is_zero() {
                        continue;
                    }
                    let mut row = T::zero();
                    for (j, &pj) in psi.iter().enumerate() {
                        row += mul0(values[i * n + j], pj);
                    }
                    acc += mul0(pi, row);
                }
                acc
            }
        }
    }
}

fn cell_weights<T: Real>(table: &CumulativeTable<T>, grid: &[T], a: T, region: Region) -> Vec<T> {
    let mut lo = T::zero();
    grid.iter()
        .map(|&hi| {
            let (x, y) = match region {
                Region::Ball => (lo, hi.min(a)),
                Region::Complement => (lo.max(a), hi),
            };
            lo = hi;
            if y > x {
                table.between(x, y)
            } else {
                T::zero()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GroupGeometry;
    use crate::radial::weight::unit;

    #[test]
    fn grid_and_separable_forms_agree_on_quadrants() {
        let r1 = GroupGeometry::<f64>::euclidean(1).unwrap();
        let geom = ProductGeometry::new(r1, r1).unwrap();
        let cfg = QuadratureConfig::default();
        let sep = BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::indicator(2.0));
        let grid = BiRadial::sample(|t, s| sep.value(t, s), vec![0.5, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let qs = QuadrantTable::new(&geom, &sep, unit(), &[], unit(), &[], &cfg);
        let qg = QuadrantTable::new(&geom, &grid, unit(), &[], unit(), &[], &cfg);
        for &(a1, a2) in &[(0.3, 0.7), (0.8, 2.5), (5.0, 5.0)] {
            for r1 in [Region::Ball, Region::Complement] {
                for r2 in [Region::Ball, Region::Complement] {
                    let x = qs.integral(a1, r1, a2, r2);
                    let y = qg.integral(a1, r1, a2, r2);
                    assert!((x - y).abs() < 1e-12, "{a1} {a2} {r1:?} {r2:?}: {x} vs {y}");
                }
            }
        }
        let exact = 2.0 * 0.3 * 2.0 * 0.7;
        assert!((qs.integral(0.3, Region::Ball, 0.7, Region::Ball) - exact).abs() < 1e-13);
    }

    #[test]
    fn swap_transposes_grids() {
        let b = BiRadial::sample(|t: f64, s: f64| t + 10.0 * s, vec![1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let s = b.swapped();
        for &(x, y) in &[(0.5, 2.5), (1.5, 0.2), (1.2, 1.7)] {
            assert_eq!(b.value(x, y), s.value(y, x));
        }
    }

    #[test]
    fn bi_decreasing_checks_each_axis() {
        let ok = BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::power(-0.5));
        assert!(BiDecreasingProfile::new(ok).is_ok());
        let bad = BiRadial::sample(|t: f64, s: f64| t / (1.0 + s), vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert!(BiDecreasingProfile::new(bad).is_err());
    }
}
