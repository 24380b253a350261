use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::GroupGeometry;
use crate::quadrature::{CumulativeTable, QuadratureConfig};
use crate::radial::{polar_table, RadialWeight};
use crate::scalar::{pow_ext, Real};

use super::check_p;

/// Radii `x_k` with `2^k = S⁻¹ ∫_{B(e, b x_k)} w^{1-p'}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DyadicSequence<T> {
    pub k: Vec<i64>,
    #[serde(with = "crate::scalar::extended::vec")]
    pub x: Vec<T>,
    /// `S = ∫_G w^{1-p'}`, or `∞`. Finite `S` is normalized to one.
    #[serde(with = "crate::scalar::extended")]
    pub total: T,
    /// Largest relative residual of the defining equation.
    #[serde(with = "crate::scalar::extended")]
    pub equation_residual: T,
    /// Largest relative residual of `2^k = ∫_{B(bx_{k+1})∖B(bx_k)}`.
    #[serde(with = "crate::scalar::extended")]
    pub annulus_residual: T,
}

fn solve<T: Real>(c: &dyn Fn(T) -> T, target: T) -> T {
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::one(), T::one());
    while c(lo) >= target {
        lo = lo / two;
        if lo < T::min_positive_value() * T::lit(1e10) {
            return T::zero();
        }
    }
    while c(hi) < target {
        hi = hi * two;
        if !hi.is_finite() || hi > T::max_value() / T::lit(1e10) {
            return T::infinity();
        }
    }
    // bisection in ln t keeps the relative accuracy uniform
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..400 {
        let m = (a + b) / two;
        if m <= a || m >= b {
            break;
        }
        if c(m.exp()) < target {
            a = m;
        } else {
            b = m;
        }
        if b - a <= T::epsilon() * b.abs().max(T::one()) {
            break;
        }
    }
    b.exp()
}

fn rel<T: Real>(got: T, want: T) -> T {
    if got == want {
        T::zero()
    } else {
        ((got - want) / want).abs()
    }
}

/// The dyadic partition of the second variable used by the product
/// Hardy inequalities.
pub fn dyadic_sequence<T: Real>(
    geom: &GroupGeometry<T>,
    w2: &RadialWeight<T>,
    b: T,
    p: T,
    ks: RangeInclusive<i64>,
    cfg: &QuadratureConfig<T>,
) -> Result<DyadicSequence<T>> {
    check_p(p)?;
    geom.validate()?;
    if w2.geometry() != geom {
        return invalid("w2 lives on a different geometry");
    }
    if !(b > T::zero()) || !b.is_finite() {
        return invalid(format!("dilation b must be positive, got {b}"));
    }
    if ks.is_empty() {
        return invalid("empty range of k");
    }
    let e = T::one() - p / (p - T::one());
    let r = w2.clone();
    let table: CumulativeTable<T> = polar_table(geom, move |s| pow_ext(r.value(s), e), &w2.breakpoints(), cfg);
    if table.head().is_divergent() {
        return Err(Error::Precondition("w2^(1-p') is not integrable near the origin".into()));
    }
    let total = table.total();
    let scale = if total.is_finite() {
        if *ks.end() > 0 {
            return Err(Error::Range { index: *ks.end(), valid: "k ≤ 0 when ∫ w2^(1-p') < ∞".into() });
        }
        if total.is_zero() {
            return Err(Error::Precondition("w2^(1-p') vanishes identically".into()));
        }
        T::one() / total
    } else {
        T::one()
    };
    let c = |t: T| table.below(b * t) * scale;
    let two = T::lit(2.0);
    let mut out = DyadicSequence { k: Vec::new(), x: Vec::new(), total, equation_residual: T::zero(), annulus_residual: T::zero() };
    for k in ks {
        let target = two.powi(k as i32);
        let x = if total.is_finite() && k == 0 && table.tail().value > T::zero() { T::infinity() } else { solve(&c, target) };
        let res = if x.is_finite() { rel(c(x), target) } else { rel(c(T::infinity()), target) };
        out.equation_residual = out.equation_residual.max(res);
        out.k.push(k);
        out.x.push(x);
    }
    for i in 1..out.x.len() {
        let (x0, x1) = (out.x[i - 1], out.x[i]);
        let annulus = table.between(b * x0, b * x1) * scale;
        out.annulus_residual = out.annulus_residual.max(rel(annulus, two.powi(out.k[i - 1] as i32)));
    }
    Ok(out)
}
