//! Homogeneous groups reduced to the three scalars `(Q, σ(S), c₀)`.

use serde::{Deserialize, Serialize};

use crate::error::{End, Error, Result};
use crate::quadrature::{FitStatus, QuadratureConfig};
use crate::scalar::Real;

/// A homogeneous group as seen by radial formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GroupGeometry<T> {
    /// Homogeneous dimension.
    #[serde(rename = "Q", with = "crate::scalar::extended")]
    pub q: T,
    /// Total σ-measure of the unit sphere.
    #[serde(rename = "sigmaS", with = "crate::scalar::extended")]
    pub sigma_s: T,
    /// Quasi-triangle constant of the homogeneous norm.
    #[serde(with = "crate::scalar::extended")]
    pub c0: T,
    /// Set for `ℝⁿ` with the Euclidean norm.
    pub euclidean_dim: Option<u32>,
}

impl<T: Real> GroupGeometry<T> {
    pub fn new(q: T, sigma_s: T, c0: T) -> Result<Self> {
        let g = GroupGeometry { q, sigma_s, c0, euclidean_dim: None };
        g.validate()?;
        Ok(g)
    }

    /// A group normalized so that `|B(e,1)| = 1`, i.e. `σ(S) = Q`.
    pub fn normalized(q: T, c0: T) -> Result<Self> {
        Self::new(q, q, c0)
    }

    /// `ℝⁿ` with `σ(S) = 2π^{n/2}/Γ(n/2)`.
    pub fn euclidean(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("euclidean dimension must be positive".into()));
        }
        let g = GroupGeometry {
            q: T::from_u32(n).expect("dimension fits scalar"),
            sigma_s: T::lit(sphere_area(n)),
            c0: T::one(),
            euclidean_dim: Some(n),
        };
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > T::zero()) || !self.q.is_finite() {
            return Err(Error::InvalidArgument(format!("Q must be positive, got {}", self.q)));
        }
        if !(self.sigma_s > T::zero()) || !self.sigma_s.is_finite() {
            return Err(Error::InvalidArgument(format!("sigmaS must be positive, got {}", self.sigma_s)));
        }
        if !(self.c0 >= T::one()) || !self.c0.is_finite() {
            return Err(Error::InvalidArgument(format!("c0 must be at least 1, got {}", self.c0)));
        }
        if let Some(n) = self.euclidean_dim {
            let nf = T::from_u32(n).expect("dimension fits scalar");
            let area = T::lit(sphere_area(n));
            let tol = T::epsilon().sqrt();
            if (self.q - nf).abs() > tol || (self.c0 - T::one()).abs() > tol || ((self.sigma_s - area) / area).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "euclidean_dim = {n} requires Q = {n}, c0 = 1, sigmaS = {area}"
                )));
            }
        }
        Ok(())
    }

    /// `|B(e,t)| = σ t^Q / Q`.
    pub fn ball_volume(&self, t: T) -> T {
        self.sigma_s * t.powf(self.q) / self.q
    }

    /// `σ ∫_lo^hi u(t) t^{Q-1} dt`; `lo` may be `0` and `hi` may be `∞`.
    pub fn polar_integral<F: Fn(T) -> T + ?Sized>(
        &self,
        u: &F,
        lo: T,
        hi: T,
        breaks: &[T],
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        if !(lo >= T::zero()) || !(hi >= lo) || lo.is_infinite() {
            return Err(Error::InvalidArgument(format!("invalid radius interval ({lo}, {hi})")));
        }
        let qm1 = self.q - T::one();
        let g = |t: T| {
            let v = u(t);
            if v.is_zero() {
                T::zero()
            } else {
                v * t.powf(qm1)
            }
        };
        let r = cfg.integrate_improper(&g, lo, hi, breaks);
        for (fit, end) in [(r.head, End::Origin), (r.tail, End::Infinity)] {
            if let Some(fit) = fit {
                if fit.status == FitStatus::Divergent {
                    return Err(Error::Divergent {
                        end,
                        exponent: fit.exponent.as_f64(),
                        partial: (self.sigma_s * r.body).as_f64(),
                    });
                }
            }
        }
        Ok(self.sigma_s * r.value)
    }

    /// Spherical average `k(R,s) = ∫_{S^{n-1}} |R e₁ − s ω|^{α−n} dσ(ω)` on `ℝⁿ`.
    pub fn euclidean_kernel_average(&self, radius: T, s: T, alpha: T) -> Result<T> {
        let n = self.require_euclidean()?;
        self.check_order(alpha)?;
        if !(radius >= T::zero()) || !(s >= T::zero()) {
            return Err(Error::InvalidArgument("radii must be nonnegative".into()));
        }
        Ok(kernel_average(n, self.sigma_s, radius, s, (radius - s).abs(), alpha, &QuadratureConfig::default()))
    }

    pub(crate) fn require_euclidean(&self) -> Result<u32> {
        match self.euclidean_dim {
            Some(n) if n <= 3 => Ok(n),
            Some(n) => Err(Error::Unsupported(format!("exact kernel averages need n <= 3, got n = {n}"))),
            None => Err(Error::Unsupported("exact Riesz kernels need a euclidean geometry".into())),
        }
    }

    pub(crate) fn check_order(&self, alpha: T) -> Result<()> {
        if !(alpha > T::zero() && alpha < self.q) {
            return Err(Error::InvalidArgument(format!("order alpha = {alpha} outside (0, Q = {})", self.q)));
        }
        Ok(())
    }
}

/// Product `G₁ × G₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProductGeometry<T> {
    pub g1: GroupGeometry<T>,
    pub g2: GroupGeometry<T>,
}

impl<T: Real> ProductGeometry<T> {
    pub fn new(g1: GroupGeometry<T>, g2: GroupGeometry<T>) -> Result<Self> {
        g1.validate()?;
        g2.validate()?;
        Ok(ProductGeometry { g1, g2 })
    }

    pub fn swapped(&self) -> Self {
        ProductGeometry { g1: self.g2, g2: self.g1 }
    }
}

/// `2π^{n/2}/Γ(n/2)` with `Γ` at half-integers in closed form.
pub fn sphere_area(n: u32) -> f64 {
    use std::f64::consts::PI;
    let half = f64::from(n) / 2.0;
    let gamma = if n % 2 == 0 {
        (1..n / 2).map(f64::from).product::<f64>()
    } else {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        let k = (n - 1) / 2;
        (0..k).map(|j| f64::from(j) + 0.5).product::<f64>() * PI.sqrt()
    };
    2.0 * PI.powf(half) / gamma
}

/// Kernel average with the distance `d = |R − s|` supplied by the caller so
/// that it keeps full relative precision near the diagonal.
pub(crate) fn kernel_average<T: Real>(n: u32, sigma: T, radius: T, s: T, d: T, alpha: T, cfg: &QuadratureConfig<T>) -> T {
    let nf = T::from_u32(n).expect("small dimension");
    let big = radius.max(s);
    if radius.is_zero() || s.is_zero() {
        return sigma * big.powf(alpha - nf);
    }
    let one = T::one();
    let two = T::lit(2.0);
    match n {
        1 => {
            let near = if d.is_zero() { T::infinity() } else { d.powf(alpha - one) };
            near + (radius + s).powf(alpha - one)
        }
        3 => {
            let beta = alpha - one;
            let sum = radius + s;
            let pi2 = two * T::PI();
            if d.is_zero() {
                return if beta > T::zero() { pi2 * sum.powf(beta) / (beta * radius * s) } else { T::infinity() };
            }
            // ((R+s)^β − d^β)/β without cancellation near β = 0
            let l = (sum / d).ln();
            let x = beta * l;
            let quotient = if x.abs() < T::lit(1e-8) { l * (one + x / two) } else { x.exp_m1() / beta };
            pi2 * d.powf(beta) * quotient / (radius * s)
        }
        2 => {
            let e = (alpha - two) / two;
            let rs4 = T::lit(4.0) * radius * s;
            if d.is_zero() && alpha <= one {
                return T::infinity();
            }
            let h = |theta: T| {
                let sh = (theta / two).sin();
                (d * d + rs4 * sh * sh).powf(e)
            };
            let scale = d / (radius * s).sqrt();
            if scale.is_zero() {
                let breaks: [T; 0] = [];
                return two * cfg.integrate_graded(&h, T::PI(), &breaks).value;
            }
            // analytic on [0, π] with complex zeros at |θ| ≈ scale, so doubling
            // panels from scale/2 keep each one well inside its Bernstein ellipse
            let rule = cfg.rule();
            let mut a = T::zero();
            let mut b = (scale / two).min(T::PI());
            let mut acc = T::zero();
            loop {
                acc += rule.integrate(&h, a, b);
                if b >= T::PI() {
                    break;
                }
                a = b;
                b = (b * two).min(T::PI());
            }
            two * acc
        }
        _ => unreachable!("kernel averages are restricted to n <= 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GroupGeometry<f64>;

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * pi).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * pi * pi).abs() < 1e-12);
    }

    #[test]
    fn polar_integral_examples() {
        let cfg = QuadratureConfig::default();
        let r1 = G::euclidean(1).unwrap();
        let v = r1.polar_integral(&|_t| 1.0, 0.0, 3.0, &[], &cfg).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
        let r2 = G::euclidean(2).unwrap();
        let v = r2.polar_integral(&|t: f64| (-t * t).exp(), 0.0, f64::INFINITY, &[], &cfg).unwrap();
        assert!((v / std::f64::consts::PI - 1.0).abs() < 1e-10, "{v}");
        let g4 = G::new(4.0, 2.5, 1.5).unwrap();
        let v = g4.polar_integral(&|_t| 1.0, 0.0, 1.7, &[], &cfg).unwrap();
        assert!((v / (2.5 * 1.7f64.powi(4) / 4.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_integral_reports_divergence() {
        let cfg = QuadratureConfig::default();
        let r2 = G::euclidean(2).unwrap();
        match r2.polar_integral(&|t: f64| t.powi(-3), 0.0, 1.0, &[], &cfg) {
            Err(Error::Divergent { end: End::Origin, .. }) => {}
            other => panic!("expected origin divergence, got {other:?}"),
        }
        match r2.polar_integral(&|_t| 1.0, 1.0, f64::INFINITY, &[], &cfg) {
            Err(Error::Divergent { end: End::Infinity, partial, .. }) => assert!(partial > 0.0),
            other => panic!("expected tail divergence, got {other:?}"),
        }
        assert!(r2.polar_integral(&|_t| 1.0, 2.0, 1.0, &[], &cfg).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(G::new(0.0, 1.0, 1.0).is_err());
        assert!(G::new(2.0, 1.0, 0.5).is_err());
        let mut g = G::euclidean(2).unwrap();
        g.sigma_s = 2.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn one_dimensional_kernel_closed_form() {
        let g = G::euclidean(1).unwrap();
        let k = g.euclidean_kernel_average(0.0, 4.0, 0.5).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        let k = g.euclidean_kernel_average(2.0, 1.0, 0.5).unwrap();
        assert!((k - (1.0 + 3f64.powf(-0.5))).abs() < 1e-15);
        assert!(g.euclidean_kernel_average(1.0, 1.0, 0.5).unwrap().is_infinite());
        assert!(g.euclidean_kernel_average(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn two_dimensional_kernel_matches_series() {
        // α = 1: k(R,s) = 2∫_0^π (R²+s²−2Rs cosθ)^{-1/2} dθ = 4 K(m)/(R+s), m = 4Rs/(R+s)²
        let g = G::euclidean(2).unwrap();
        let (r, s) = (1.0f64, 0.3f64);
        let m: f64 = 4.0 * r * s / ((r + s) * (r + s));
        // complete elliptic integral by the arithmetic-geometric mean
        let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
        for _ in 0..30 {
            let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
            a = an;
            b = bn;
        }
        let kk = std::f64::consts::PI / (2.0 * a);
        let exact = 4.0 * kk / (r + s);
        let got = g.euclidean_kernel_average(r, s, 1.0).unwrap();
        assert!((got / exact - 1.0).abs() < 1e-11, "{got} vs {exact}");
        assert!(g.euclidean_kernel_average(1.0, 1.0, 1.0).unwrap().is_infinite());
        let finite = g.euclidean_kernel_average(1.0, 1.0, 1.5).unwrap();
        assert!(finite.is_finite() && finite > 0.0);
    }

    #[test]
    fn three_dimensional_kernel_is_continuous_in_alpha() {
        let g = G::euclidean(3).unwrap();
        let at_one = g.euclidean_kernel_average(1.0, 2.0, 1.0).unwrap();
        let exact = 2.0 * std::f64::consts::PI * 3f64.ln() / 2.0;
        assert!((at_one / exact - 1.0).abs() < 1e-7);
        let near = g.euclidean_kernel_average(1.0, 2.0, 1.0 + 1e-9).unwrap();
        assert!((near / at_one - 1.0).abs() < 1e-8);
    }
}
