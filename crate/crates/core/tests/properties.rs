use proptest::prelude::*;

use rieszcone::conditions::{hardy_condition, ExponentPair, HardySide, ScanConfig};
use rieszcone::duality::dyadic_sequence;
use rieszcone::geometry::GroupGeometry;
use rieszcone::operators::{hardy, hardy_tail, riesz_far};
use rieszcone::quadrature::QuadratureConfig;
use rieszcone::radial::{cell_measures, project_to_decreasing, DecreasingProfile, ProductWeight, RadialProfile, RadialWeight};
use rieszcone::verify::{ratio_maximize, OperatorSpec, TestFamily, Witness};

fn cfg() -> QuadratureConfig<f64> {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Strictly increasing grid with nonincreasing positive values.
fn decreasing_step() -> impl Strategy<Value = RadialProfile<f64>> {
    prop::collection::vec((0.05f64..1.0, 0.05f64..1.0), 1..8).prop_map(|cells| {
        let (mut r, mut h) = (0.0, 0.0);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (dr, dh) in cells.iter().rev() {
            h += dh;
            values.push(h);
            let _ = dr;
        }
        values.reverse();
        for (dr, _) in &cells {
            r += dr;
            grid.push(r);
        }
        RadialProfile::step(grid, values).unwrap()
    })
}

fn any_step() -> impl Strategy<Value = RadialProfile<f64>> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..2.0), 1..10).prop_map(|cells| {
        let mut r = 0.0;
        let grid = cells.iter().map(|(dr, _)| {
            r += dr;
            r
        });
        RadialProfile::step(grid.collect(), cells.iter().map(|c| c.1).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn polar_integral_is_dilation_covariant(q in 1.0f64..5.0, lambda in 0.1f64..10.0, shift in 0.2f64..3.0, big_t in 0.5f64..20.0) {
        let g = GroupGeometry::normalized(q, 1.5).unwrap();
        let u = move |t: f64| (shift + t).powf(-1.0) * (-t).exp();
        let base = g.polar_integral(&u, 0.0, big_t, &[], &cfg()).unwrap();
        let dilated = g.polar_integral(&|t: f64| u(t / lambda), 0.0, lambda * big_t, &[], &cfg()).unwrap();
        prop_assert!(rel(dilated, lambda.powf(q) * base) < 1e-9, "{} vs {}", dilated, lambda.powf(q) * base);
    }

    #[test]
    fn ball_volume_from_polar_integral(q in 1.0f64..6.0, t in 1e-3f64..1e3) {
        let g = GroupGeometry::normalized(q, 2.0).unwrap();
        let v = g.polar_integral(&|_| 1.0, 0.0, t, &[], &cfg()).unwrap();
        prop_assert!(rel(v, g.ball_volume(t)) < 1e-12);
    }

    #[test]
    fn line_kernel_average_is_symmetric(r in 1e-3f64..1e3, s in 1e-3f64..1e3, alpha in 0.05f64..0.95) {
        let g = GroupGeometry::euclidean(1).unwrap();
        prop_assert_eq!(g.euclidean_kernel_average(r, s, alpha).unwrap(), g.euclidean_kernel_average(s, r, alpha).unwrap());
    }

    #[test]
    fn cumulative_is_monotone_and_products_factor(a in -0.9f64..2.0, ts in prop::collection::vec(1e-4f64..1e4, 2..12), tau in 1e-3f64..1e3) {
        let g = GroupGeometry::euclidean(1).unwrap();
        let w = RadialWeight::new(g, RadialProfile::power(a), &cfg()).unwrap();
        let mut ts = ts;
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ws: Vec<f64> = ts.iter().map(|t| w.cumulative(*t).unwrap()).collect();
        prop_assert!(ws.windows(2).all(|p| p[0] <= p[1]));
        // closed form 2 t^{a+1}/(a+1)
        for (t, v) in ts.iter().zip(&ws) {
            prop_assert!(rel(*v, 2.0 * t.powf(a + 1.0) / (a + 1.0)) < 1e-9);
        }
        let e = RadialWeight::new(g, RadialProfile::Exponential { coeff: 1.0, rate: -1.0 }, &cfg()).unwrap();
        let pw = ProductWeight::product(w.clone(), e.clone());
        prop_assert_eq!(pw.cumulative(ts[0], tau, &cfg()), w.cumulative(ts[0]).unwrap() * e.cumulative(tau).unwrap());
    }

    #[test]
    fn projection_is_idempotent_and_contractive(f in any_step(), n in 1u32..4) {
        let g = GroupGeometry::euclidean(n).unwrap();
        let d = project_to_decreasing(&g, &f).unwrap();
        prop_assert!(d.profile().is_nonincreasing());
        let again = project_to_decreasing(&g, d.profile()).unwrap();
        let RadialProfile::Step { grid, values: v_in } = &f else { unreachable!() };
        let RadialProfile::Step { values: v_out, .. } = d.profile() else { unreachable!() };
        let RadialProfile::Step { values: v_again, .. } = again.profile() else { unreachable!() };
        for (x, y) in v_out.iter().zip(v_again) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let m = cell_measures(&g, grid);
        let norm = |v: &[f64]| v.iter().zip(&m).map(|(x, w)| w * x * x).sum::<f64>();
        prop_assert!(norm(v_out) <= norm(v_in) * (1.0 + 1e-12));
        // the projection preserves mass on every pooled block, hence in total
        let mass = |v: &[f64]| v.iter().zip(&m).map(|(x, w)| w * x).sum::<f64>();
        prop_assert!(rel(mass(v_out), mass(v_in)) < 1e-12 || mass(v_in) == 0.0);
    }

    #[test]
    fn hardy_operators_are_monotone(f in decreasing_step(), n in 1u32..4, a in 0.5f64..2.0) {
        let g = GroupGeometry::euclidean(n).unwrap();
        let d = DecreasingProfile::new(f.clone()).unwrap();
        let h = hardy(&g, a, &d, &cfg()).unwrap();
        let ht = hardy_tail(&g, a, &d, &cfg()).unwrap();
        let probes: Vec<f64> = (0..40).map(|k| 1e-3 * 1.3f64.powi(k)).collect();
        for p in probes.windows(2) {
            prop_assert!(h.value(p[0]) <= h.value(p[1]) * (1.0 + 1e-12));
            prop_assert!(ht.value(p[0]) * (1.0 + 1e-12) >= ht.value(p[1]));
        }
        if n == 1 {
            let s = riesz_far(&g, 0.5, &f, &cfg()).unwrap();
            for p in probes.windows(2) {
                prop_assert!(s.value(p[0]) * (1.0 + 1e-12) >= s.value(p[1]));
            }
        }
    }

    #[test]
    fn hardy_condition_homogeneity(p in 1.3f64..3.0, dq in 0.0f64..1.5, lambda in 0.1f64..10.0) {
        let q = p + dq;
        let pair = ExponentPair::new(p, q).unwrap();
        let g = GroupGeometry::euclidean(1).unwrap();
        let w = RadialWeight::new(g, RadialProfile::constant(1.0), &cfg()).unwrap();
        let v = RadialWeight::new(g, RadialProfile::ShiftedPower { coeff: 1.0, shift: 1.0, exponent: -3.0 }, &cfg()).unwrap();
        let scan = ScanConfig::default();
        let base = hardy_condition(&g, pair, &w, &v, 1.0, HardySide::Near, &scan).unwrap();
        prop_assume!(base.value.is_finite());
        let sv = hardy_condition(&g, pair, &w, &v.scaled(lambda).unwrap(), 1.0, HardySide::Near, &scan).unwrap();
        prop_assert!(rel(sv.value, lambda.powf(1.0 / q) * base.value) < 1e-9);
        let sw = hardy_condition(&g, pair, &w.scaled(lambda).unwrap(), &v, 1.0, HardySide::Near, &scan).unwrap();
        prop_assert!(rel(sw.value, lambda.powf(-1.0 / p) * base.value) < 1e-9);
    }

    #[test]
    fn dyadic_sequence_is_increasing(e in -0.9f64..2.0, p in 1.2f64..3.0, b in 0.5f64..2.0) {
        // w₂^{1−p'} = s^e
        let a = e * (1.0 - p);
        let g = GroupGeometry::euclidean(1).unwrap();
        let w = RadialWeight::new(g, RadialProfile::power(a), &cfg()).unwrap();
        let s = dyadic_sequence(&g, &w, b, p, -6..=6, &cfg()).unwrap();
        prop_assert!(s.x.windows(2).all(|x| x[0] < x[1]));
        prop_assert!(s.equation_residual < 1e-8 && s.annulus_residual < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn ratio_report_dominates_its_trace(a in -0.5f64..0.5, b in -3.0f64..-1.5, seed in 0u64..1000) {
        let g = GroupGeometry::euclidean(1).unwrap();
        let pair = ExponentPair::new(2.0, 2.0).unwrap();
        let w = RadialWeight::new(g, RadialProfile::power(a), &cfg()).unwrap();
        let v = RadialWeight::new(g, RadialProfile::power_on(b, 1.0, f64::INFINITY), &cfg()).unwrap();
        let fam = [TestFamily::Indicator { lo: 1e-2, hi: 1e2, points: 13 }];
        let r = ratio_maximize(&g, pair, OperatorSpec::Hardy { a: 1.0 }, &w, &v, &fam, 60, seed, &cfg()).unwrap();
        for tr in &r.family_trace {
            for [_, x] in &tr.points {
                prop_assert!(r.best_ratio >= *x);
            }
        }
        let Witness::Radial(wit) = &r.witness else { unreachable!() };
        prop_assert!(wit.profile().is_nonincreasing());
        prop_assert!(DecreasingProfile::new(wit.profile().clone()).is_ok());
    }
}
