//! Weighted antitonic regression by pool-adjacent-violators.

use crate::error::{invalid, Result};
use crate::geometry::GroupGeometry;
use crate::scalar::Real;

use super::{DecreasingProfile, RadialProfile};

/// Least-squares nonincreasing fit of `values` with positive `weights`.
pub fn antitonic<T: Real>(values: &[T], weights: &[T]) -> Vec<T> {
    assert_eq!(values.len(), weights.len(), "one weight per value");
    // blocks of (weighted sum, weight, length)
    let mut blocks: Vec<(T, T, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        let mut cur = (v * w, w, 1usize);
        while let Some(&(s, m, n)) = blocks.last() {
            if s / m < cur.0 / cur.1 {
                blocks.pop();
                cur = (cur.0 + s, cur.1 + m, cur.2 + n);
            } else {
                break;
            }
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(values.len());
    for (s, m, n) in blocks {
        out.extend(std::iter::repeat(s / m).take(n));
    }
    out
}

/// Projection of a step profile onto the decreasing cone in `L²(G)`: cell
/// `i` carries the measure `σ (t_i^Q − t_{i-1}^Q)/Q`.
pub fn project_to_decreasing<T: Real>(geom: &GroupGeometry<T>, p: &RadialProfile<T>) -> Result<DecreasingProfile<T>> {
    let RadialProfile::Step { grid, values } = p else {
        return invalid("projection onto the decreasing cone needs a step profile");
    };
    p.validate()?;
    let weights = cell_measures(geom, grid);
    let fitted = antitonic(values, &weights);
    DecreasingProfile::new(RadialProfile::Step { grid: grid.clone(), values: fitted })
}

/// Group measure of the shells `[t_{i-1}, t_i)` with `t_{-1} = 0`.
pub fn cell_measures<T: Real>(geom: &GroupGeometry<T>, grid: &[T]) -> Vec<T> {
    let mut prev = T::zero();
    grid.iter()
        .map(|&t| {
            let m = geom.ball_volume(t) - geom.ball_volume(prev);
            prev = t;
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pav_examples() {
        let ones = [1.0; 3];
        assert_eq!(antitonic(&[3.0, 1.0, 2.0], &ones), vec![3.0, 1.5, 1.5]);
        assert_eq!(antitonic(&[5.0, 4.0, 3.0], &ones), vec![5.0, 4.0, 3.0]);
        assert_eq!(antitonic(&[1.0, 1.0, 1.0], &ones), vec![1.0, 1.0, 1.0]);
        assert_eq!(antitonic(&[1.0, 3.0], &[3.0, 1.0]), vec![1.5, 1.5]);
    }

    #[test]
    fn projection_uses_shell_measures() {
        let g = GroupGeometry::<f64>::euclidean(1).unwrap();
        // shells of measure 2 and 2: plain average
        let p = RadialProfile::step(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let d = project_to_decreasing(&g, &p).unwrap();
        assert_eq!(d.profile(), &RadialProfile::Step { grid: vec![1.0, 2.0], values: vec![2.0, 2.0] });
        assert!(project_to_decreasing(&g, &RadialProfile::power(-1.0)).is_err());
    }
}
