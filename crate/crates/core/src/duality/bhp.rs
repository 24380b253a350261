use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProductGeometry;
use crate::quadrature::QuadratureConfig;
use crate::radial::{polar_table, BiRadial, ProductWeight, QuadrantTable, Region};
use crate::scalar::{mul0, pow_ext, Real};

use super::{check_p, finite_total, level_integral};

/// The four summands `I₁`–`I₄` of the product duality right-hand side.
///
/// `I₂` integrates the `x`-marginal `‖g(t,·)‖_{L¹(G₂)}` against `w₁`, `I₃`
/// the `y`-marginal against `w₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BhpTerms<T> {
    #[serde(with = "crate::scalar::extended")]
    pub i1: T,
    #[serde(with = "crate::scalar::extended")]
    pub i2: T,
    #[serde(with = "crate::scalar::extended")]
    pub i3: T,
    #[serde(with = "crate::scalar::extended")]
    pub i4: T,
}

impl<T: Real> BhpTerms<T> {
    pub fn total(&self) -> T {
        self.i1 + self.i2 + self.i3 + self.i4
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.i1, self.i2, self.i3, self.i4]
    }
}

fn unit<T: Real>() -> Arc<dyn Fn(T) -> T + Send + Sync> {
    Arc::new(|_| T::one())
}

/// `I₁`–`I₄` for a product weight `w₁ ⊗ w₂` and a bi-radial `g ≥ 0`.
pub fn bhp_four_term_rhs<T: Real>(
    geom: &ProductGeometry<T>,
    p: T,
    w: &ProductWeight<T>,
    g: &BiRadial<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<BhpTerms<T>> {
    check_p(p)?;
    g.validate()?;
    if &w.geometry() != geom {
        return Err(Error::InvalidArgument("weight w lives on a different product geometry".into()));
    }
    let (w1, w2) = w
        .factors()
        .ok_or_else(|| Error::Precondition("w must be a product weight w₁(x) w₂(y)".into()))?;
    let p1 = p / (p - T::one());
    let (m1, m2) = (w1.total_mass(), w2.total_mass());
    let (b1, b2) = g.breakpoints();
    let quad = Arc::new(QuadrantTable::new(geom, g, unit(), &[], unit(), &[], cfg));
    let norm = || -> Result<T> {
        let v = quad.integral(T::zero(), Region::Complement, T::zero(), Region::Complement);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Divergent { end: crate::error::End::Infinity, exponent: f64::NAN, partial: v.as_f64() })
        }
    };
    let inv = |m: T| pow_ext(m, -T::one() / p);

    let i1 = if m1.is_infinite() || m2.is_infinite() { T::zero() } else { mul0(inv(m1 * m2), norm()?) };
    let i2 = if m2.is_infinite() {
        T::zero()
    } else {
        let q = quad.clone();
        let h = Arc::new(move |s: T| q.integral(s, Region::Ball, T::zero(), Region::Complement));
        mul0(inv(m2), level_integral(&geom.g1, w1, h, &b1, p1, cfg)?)
    };
    let i3 = if m1.is_infinite() {
        T::zero()
    } else {
        let q = quad.clone();
        let h = Arc::new(move |s: T| q.integral(T::zero(), Region::Complement, s, Region::Ball));
        mul0(inv(m1), level_integral(&geom.g2, w2, h, &b2, p1, cfg)?)
    };

    let i4 = match g {
        BiRadial::Separable { terms } if terms.len() == 1 => {
            let k = &terms[0];
            let one_dim = |gg: &crate::geometry::GroupGeometry<T>, wi, f: &crate::radial::RadialProfile<T>| {
                let ff = f.clone();
                let t = polar_table(gg, move |s| ff.value(s), &f.breakpoints(), cfg);
                level_integral(gg, wi, Arc::new(move |s| t.below(s)), &f.breakpoints(), p1, cfg)
            };
            let l1 = one_dim(&geom.g1, w1, &k.first)?;
            let l2 = one_dim(&geom.g2, w2, &k.second)?;
            mul0(k.coeff, mul0(l1, l2))
        }
        _ => {
            let (wa, wb) = (w1.clone(), w2.clone());
            let g2 = geom.g2;
            let inner_cfg = cfg.clone();
            let mut inner_breaks = b2.clone();
            inner_breaks.extend(w2.breakpoints());
            let q = quad.clone();
            let inner = move |s1: T| {
                let f = |s2: T| {
                    let ws = wb.value(s2);
                    if ws.is_zero() {
                        return T::zero();
                    }
                    let h = q.integral(s1, Region::Ball, s2, Region::Ball);
                    mul0(pow_ext(h, p1), mul0(pow_ext(wb.cumulative_ext(s2), -p1), ws))
                };
                g2.polar_integral(&f, T::zero(), T::infinity(), &inner_breaks, &inner_cfg).unwrap_or(T::infinity())
            };
            let mut outer_breaks = b1.clone();
            outer_breaks.extend(w1.breakpoints());
            let outer = polar_table(
                &geom.g1,
                move |s1| {
                    let ws = wa.value(s1);
                    if ws.is_zero() {
                        return T::zero();
                    }
                    mul0(mul0(pow_ext(wa.cumulative_ext(s1), -p1), ws), inner(s1))
                },
                &outer_breaks,
                cfg,
            );
            pow_ext(finite_total(&outer)?, T::one() / p1)
        }
    };
    Ok(BhpTerms { i1, i2, i3, i4 })
}
