use rieszcone::conditions::ExponentPair;
use rieszcone::geometry::{GroupGeometry, ProductGeometry};
use rieszcone::operators::{riesz_full, RieszPiece};
use rieszcone::quadrature::{Finiteness, QuadratureConfig};
use rieszcone::radial::{BiRadial, ProductWeight, RadialProfile, RadialWeight};
use rieszcone::verify::*;

fn line() -> GroupGeometry<f64> {
    GroupGeometry::euclidean(1).unwrap()
}

fn cfg() -> QuadratureConfig<f64> {
    QuadratureConfig::default()
}

fn weight(p: RadialProfile<f64>) -> RadialWeight<f64> {
    RadialWeight::new(line(), p, &cfg()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn oracle_closed_forms_on_the_line() {
    let op = OperatorSpec::Riesz { alpha: 0.5 };
    let f = RadialProfile::indicator(1.0);
    let v = brute_force_oracle(&line(), &op, &f, &[1e-9, 2.0, 0.0, -1.0]).unwrap();
    assert!(rel(v[0].unwrap(), 4.0) < 1e-3, "{:?}", v[0]);
    assert!(rel(v[1].unwrap(), 2.0 * 3f64.sqrt() - 2.0) < 1e-10, "{:?}", v[1]);
    assert_eq!(&v[2..], &[None, None]);
}

#[test]
fn oracle_matches_the_radial_engine() {
    let t0 = std::time::Instant::now();
    let probes: Vec<f64> = (0..12).map(|k| 0.013 * 2.3f64.powi(k)).collect();
    for f in [
        RadialProfile::indicator(1.0),
        RadialProfile::power_on(-0.3, 0.0, 2.0),
        RadialProfile::step(vec![0.5, 1.0, 3.0], vec![3.0, 2.0, 0.5]).unwrap(),
        RadialProfile::ShiftedPower { coeff: 1.0, shift: 1.0, exponent: -2.0 },
    ] {
        for alpha in [0.25, 0.5, 0.75] {
            let i = riesz_full(&line(), alpha, &f, &cfg()).unwrap();
            let o = brute_force_oracle(&line(), &OperatorSpec::Riesz { alpha }, &f, &probes).unwrap();
            for (t, o) in probes.iter().zip(o) {
                let o = o.unwrap();
                assert!(rel(i.value(*t), o) < 1e-6, "α={alpha} t={t} {f:?}: {} vs {o}", i.value(*t));
            }
        }
    }
    eprintln!("oracle line: {:?}", t0.elapsed());
}

#[test]
fn probe_at_the_cap_radius() {
    // the cap of s^{-1/2} at height 10 ends at s = 0.01; reference by mpmath
    let f = RadialProfile::TruncatedPower { coeff: 1.0, exponent: 0.5, height: 10.0, radius: 5.0 };
    let i = riesz_full(&line(), 0.25, &f, &cfg()).unwrap();
    for (t, want) in [(0.0099, 44.50677944089268), (0.01, 44.47318301537030)] {
        assert!(rel(i.value(t), want) < 1e-7, "t={t}: {}", i.value(t));
    }
}

#[test]
fn oracle_in_the_plane() {
    let r2 = GroupGeometry::euclidean(2).unwrap();
    let f = RadialProfile::indicator(1.0);
    let probes = [0.1, 0.7, 1.0, 1.9, 5.0];
    for alpha in [0.5, 1.3] {
        let i = riesz_full(&r2, alpha, &f, &cfg()).unwrap();
        let o = brute_force_oracle(&r2, &OperatorSpec::Riesz { alpha }, &f, &probes).unwrap();
        for (t, o) in probes.iter().zip(o) {
            assert!(rel(i.value(*t), o.unwrap()) < 1e-5, "α={alpha} t={t}: {} vs {:?}", i.value(*t), o);
        }
    }
    // H^1 χ_{B(0,1)} at t=2 is the disc area
    let h = brute_force_oracle(&r2, &OperatorSpec::Hardy { a: 1.0 }, &f, &[2.0]).unwrap();
    assert!(rel(h[0].unwrap(), std::f64::consts::PI) < 1e-12);
}

#[test]
fn product_far_far_piece_vanishes_off_support() {
    let geom = ProductGeometry::new(line(), line()).unwrap();
    let f = BiRadial::tensor(RadialProfile::indicator(1.0), RadialProfile::indicator(1.0));
    let op = ProductOperatorSpec::RieszPiece { alpha1: 0.5, alpha2: 0.5, piece: RieszPiece::SS };
    let v = brute_force_oracle_product(&geom, &op, &f, &[(0.6, 0.7), (2.0, 3.0)]).unwrap();
    assert_eq!(v, vec![Some(0.0), Some(0.0)]);
    // the full potential of a tensor factorizes
    let op = ProductOperatorSpec::Riesz { alpha1: 0.5, alpha2: 0.25 };
    let v = brute_force_oracle_product(&geom, &op, &f, &[(2.0, 0.5)]).unwrap();
    let a = riesz_full(&line(), 0.5, &RadialProfile::indicator(1.0), &cfg()).unwrap().value(2.0);
    let b = riesz_full(&line(), 0.25, &RadialProfile::indicator(1.0), &cfg()).unwrap().value(0.5);
    assert!(rel(v[0].unwrap(), a * b) < 1e-8, "{:?} vs {}", v[0], a * b);
}

#[test]
fn kernel_estimate_closed_form() {
    // ∫_{0.5}^{1} + ∫_{-1}^{-0.5} |t − 1/4|^{-1/2} dt
    let v = kernel_estimate_integral(1, 0.5, &[1.0], &[0.25]).unwrap();
    assert!(rel(v, 2.0 * (1.25f64.sqrt() - 0.5)) < 1e-12, "{v}");
    assert_eq!(kernel_estimate_integral(1, 0.5, &[1.0], &[0.6]).unwrap(), 0.0);
    let v = kernel_estimate_integral(2, 0.5, &[1.0, 0.0], &[0.0, 0.0]).unwrap();
    assert!(rel(v, 4.0 * std::f64::consts::PI) < 1e-12);
    let v: f64 = kernel_estimate_integral(2, 0.5, &[0.0, 1.0], &[0.1, 0.1]).unwrap();
    assert!(v > 0.0 && v.is_finite());
}

fn hardy_example() -> (RadialWeight<f64>, RadialWeight<f64>) {
    (weight(RadialProfile::constant(1.0)), weight(RadialProfile::power_on(-2.0, 1.0, f64::INFINITY)))
}

#[test]
fn hardy_indicator_trace_saturates() {
    let (w, v) = hardy_example();
    let pair = ExponentPair::new(2.0, 2.0).unwrap();
    let fam = [TestFamily::Indicator { lo: 1e-3, hi: 1e3, points: 31 }];
    let r = ratio_maximize(&line(), pair, OperatorSpec::Hardy { a: 1.0 }, &w, &v, &fam, 0, 1, &cfg()).unwrap();
    let tr = &r.family_trace[0];
    for [s, ratio] in &tr.points {
        let exact = if *s <= 1.0 { 2.0 * s.sqrt() } else { (8.0 - 4.0 / s).sqrt() };
        assert!(rel(*ratio, exact) < 1e-8, "s={s}: {ratio} vs {exact}");
    }
    // at s = 1, f = χ_(0,1): ‖Hf‖² = 8, ‖f‖² = 2
    assert!(rel(tr.points[15][1], 2.0) < 1e-8);
    assert!(rel(r.best_ratio, 8f64.sqrt()) < 0.05);
    assert!(r.best_ratio >= tr.points.iter().map(|p| p[1]).fold(0.0, f64::max));
    assert_eq!(tr.bounded(), Some(true));
}

#[test]
fn ratio_scales_with_v_and_ascent_only_improves() {
    let (w, v) = hardy_example();
    let pair = ExponentPair::new(2.0, 2.0).unwrap();
    let fam = TestFamily::standard(&line(), 2.0);
    let op = OperatorSpec::Hardy { a: 1.0 };
    let a = ratio_maximize(&line(), pair, op, &w, &v, &fam, 150, 7, &cfg()).unwrap();
    let b = ratio_maximize(&line(), pair, op, &w, &v.scaled(0.01).unwrap(), &fam, 150, 7, &cfg()).unwrap();
    for (x, y) in a.family_trace[0].points.iter().zip(&b.family_trace[0].points) {
        assert!(rel(y[1], 0.1 * x[1]) < 1e-10);
    }
    let asc = a.ascent.as_ref().unwrap();
    assert!(asc.end >= asc.start && a.best_ratio >= asc.start);
    assert!(a.evaluations <= 150);
    let again = ratio_maximize(&line(), pair, op, &w, &v, &fam, 150, 7, &cfg()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&again).unwrap());
}

fn settings() -> SweepSettings<f64> {
    SweepSettings::default()
}

#[test]
fn riesz_scenario_with_inverse_power_v() {
    let pair = ExponentPair::new(2.0, 2.0).unwrap();
    let s = TheoremScenario::Riesz {
        geom: line(),
        pair,
        alpha: 0.5,
        w: weight(RadialProfile::constant(1.0)),
        v: weight(RadialProfile::power(-1.0)),
    };
    let t0 = std::time::Instant::now();
    let v = theorem_consistency_sweep(&s, &settings()).unwrap();
    eprintln!("riesz scenario: {:?}", t0.elapsed());
    let f: Vec<_> = v.conditions_finite.iter().map(|c| c.finite).collect();
    assert_eq!(f, vec![Finiteness::Finite, Finiteness::Finite, Finiteness::Infinite]);
    assert_eq!(v.ratio_bounded, Some(false));
    assert!(v.consistent && !v.indeterminate, "{v:#?}");
}

#[test]
fn riesz_scenario_with_constant_v() {
    let pair = ExponentPair::new(2.0, 2.0).unwrap();
    let one = weight(RadialProfile::constant(1.0));
    let s = TheoremScenario::Riesz { geom: line(), pair, alpha: 0.5, w: one.clone(), v: one };
    let v = theorem_consistency_sweep(&s, &settings()).unwrap();
    assert_eq!(v.conditions_finite[0].finite, Finiteness::Infinite);
    assert_eq!(v.ratio_bounded, Some(false));
    assert!(v.consistent && !v.indeterminate);
}

#[test]
fn riesz_scenario_with_balanced_powers_is_bounded() {
    // w = s^{-1/2}, v = s^b with α + (b+1)/q − (a+1)/p = 0, p = 2, q = 3, α = 1/8
    let (p, q, alpha, a) = (2.0, 3.0, 0.125, -0.5);
    let b = q * ((a + 1.0) / p - alpha) - 1.0;
    let pair = ExponentPair::new(p, q).unwrap();
    let s = TheoremScenario::Riesz {
        geom: line(),
        pair,
        alpha,
        w: weight(RadialProfile::power(a)),
        v: weight(RadialProfile::power(b)),
    };
    let v = theorem_consistency_sweep(&s, &settings()).unwrap();
    assert!(v.conditions_finite.iter().all(|c| c.finite == Finiteness::Finite), "{:?}", v.conditions_finite);
    assert_eq!(v.ratio_bounded, Some(true), "growth {}", v.growth);
    assert!(v.consistent && !v.indeterminate);
}

#[test]
fn trace_scenario_is_bounded() {
    let geom = ProductGeometry::new(line(), line()).unwrap();
    let one = weight(RadialProfile::constant(1.0));
    let s = TheoremScenario::ProductTrace {
        geom,
        pair: ExponentPair::new(2.0, 4.0).unwrap(),
        alpha1: 0.25,
        alpha2: 0.25,
        v: ProductWeight::product(one.clone(), one),
    };
    let t0 = std::time::Instant::now();
    let v = theorem_consistency_sweep(&s, &settings()).unwrap();
    eprintln!("trace scenario: {:?}", t0.elapsed());
    assert!(rel(v.conditions[0].value, 2f64.sqrt()) < 1e-9);
    assert_eq!(v.ratio_bounded, Some(true), "growth {}", v.growth);
    assert!(v.consistent && !v.indeterminate);
}

#[test]
fn growth_proxy() {
    let pts: Vec<[f64; 2]> = (0..31).map(|k| {
        let s = 10f64.powf(-3.0 + k as f64 * 0.2);
        [s, s.powf(0.5)]
    }).collect();
    assert!((decade_growth(&pts) - 10f64.powf(1.5)).abs() < 1e-9);
    let flat: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], 3.0]).collect();
    assert_eq!(decade_growth(&flat), 1.0);
    let mut inf = flat.clone();
    inf[4][1] = f64::INFINITY;
    assert_eq!(decade_growth(&inf), f64::INFINITY);
}
