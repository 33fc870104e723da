use ilw::symbols::*;
use ilw::Error;
use proptest::prelude::*;

const COTH1: f64 = 1.313_035_285_499_331_3;
const COTH2: f64 = 1.037_314_720_727_548_1;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn dispersion_values() {
    assert_eq!(dispersion_a(0.0, 1.0), 0.0);
    let x: f64 = 1e-3;
    assert!(rel(dispersion_a(x, 1.0), x + x.powi(3) / 3.0 - x.powi(5) / 45.0) < 1e-12);
    assert!(rel(dispersion_a(1.0, 1.0), COTH1) < 1e-15);
    assert_eq!(dispersion_big_a(0.0, 1.0), 0.0);
    assert!(rel(dispersion_big_a(1.0, 1.0), COTH1 - 1.0) < 1e-14);
    assert!((dispersion_big_a(x, 1.0) / x.powi(3) - 1.0 / 3.0).abs() < 1e-6 / 3.0);
}

#[test]
fn group_velocity_values() {
    assert!((group_velocity(0.0, 1.0) - 1.0).abs() < 1e-15);
    assert!((group_velocity(20.0, 1.0) - 40.0).abs() < 1e-6);
    // Depth 2: a'(0) = 1/δ.
    assert!((group_velocity(0.0, 2.0) - 0.5).abs() < 1e-15);
}

#[test]
fn smoothing_values() {
    let p = SymbolPoint::new(1.0, 1.0).unwrap().smoothing_p().unwrap();
    assert!(p.re == 0.0 && rel(p.im, 1.0 - COTH1) < 1e-14);
    let x = 1e-6;
    let p = SymbolPoint::new(x, 1.0).unwrap().smoothing_p().unwrap();
    assert!((x * p.im + 1.0).abs() < 1e-6);
    assert!(matches!(SymbolPoint::new(0.0, 1.0).unwrap().smoothing_p(), Err(Error::UndefinedMultiplier { .. })));
}

#[test]
fn smoothing_gains_derivatives() {
    for n in 1..=3 {
        let mut sup: f64 = 0.0;
        let mut arg = 0.0;
        let mut x: f64 = 1e-4;
        while x <= 50.0 {
            let v = x.powi(n) * smoothing_symbol(x, 1.0).im.abs();
            if v > sup {
                sup = v;
                arg = x;
            }
            x *= 1.01;
        }
        assert!(sup.is_finite() && sup < 10.0, "n={n}: {sup}");
        if n == 2 {
            assert!((0.3..3.0).contains(&arg), "|ξ²p| peaks at {arg}");
        }
    }
}

#[test]
fn sigma_values() {
    assert_eq!(sigma(0.0, 1.0), 0.0);
    assert!((sigma(20.0, 1.0) - (1.0 - 2.0 * (-40f64).exp())).abs() < 1e-15);
}

#[test]
fn resonance_values() {
    let p = SymbolPoint::pair(1.0, 1.0, 1.0).unwrap();
    assert!(rel(p.resonance_omega2().unwrap(), 4.0 * COTH2 - 2.0 * COTH1) < 1e-13);
    assert!(SymbolPoint::new(1.0, 1.0).unwrap().resonance_omega2().is_err());
}

#[test]
fn symbol_point_invariants() {
    assert!(matches!(SymbolPoint::new(1.0, 0.5), Err(Error::InvalidParameter(_))));
    let p = SymbolPoint::pair(0.3, -1.7, 1.0).unwrap();
    assert_eq!(p.xi + p.eta.unwrap() + p.zeta().unwrap(), 0.0);
    assert_eq!(p.dispersion_A(), dispersion_big_a(0.3, 1.0));
    assert_eq!(p.group_velocity(), group_velocity(0.3, 1.0));
    assert_eq!(p.sigma_tanh(), sigma(0.3, 1.0));
}

#[test]
fn series_switch_is_continuous() {
    for delta in [1.0, 3.0] {
        let x = SERIES_SWITCH / delta;
        let below = x * (1.0 - 1e-12);
        let closed = |x: f64| x * x * coth(delta * x);
        assert!(rel(dispersion_a(below, delta), closed(below)) < 1e-12);
        assert!(rel(dispersion_a(x * (1.0 + 1e-12), delta), closed(x)) < 1e-11);
    }
}

#[test]
fn resonance_band_is_continuous() {
    for xi in [0.4, -1.3, 7.0] {
        for side in [1.0, -1.0] {
            let inner = resonance_weight(xi, side * LINE_BAND * (1.0 - 1e-9), 1.0);
            let outer = resonance_weight(xi, side * LINE_BAND * (1.0 + 1e-9), 1.0);
            assert!(rel(inner, outer) < 1e-8, "xi={xi}: {inner} {outer}");
        }
    }
}

proptest! {
    #[test]
    fn parity(x in -60.0f64..60.0, delta in 1.0f64..8.0) {
        prop_assert_eq!(dispersion_a(-x, delta), -dispersion_a(x, delta));
        prop_assert_eq!(dispersion_big_a(-x, delta), -dispersion_big_a(x, delta));
        prop_assert_eq!(group_velocity(-x, delta), group_velocity(x, delta));
    }

    #[test]
    fn derivative_matches_differences(x in -30.0f64..30.0) {
        let h = 1e-5;
        let fd = (dispersion_a(x + h, 1.0) - dispersion_a(x - h, 1.0)) / (2.0 * h);
        let d = group_velocity(x, 1.0);
        prop_assert!((fd - d).abs() <= 1e-8 * d.abs().max(1.0), "{} vs {}", fd, d);
    }

    #[test]
    fn tanh_triple_identity(x in -40.0f64..40.0, y in -40.0f64..40.0, delta in 1.0f64..4.0) {
        let (s1, s2, s3) = (sigma(x, delta), sigma(y, delta), sigma(x + y, delta));
        prop_assert!((s3 * s1 * s2 - (s1 + s2 - s3)).abs() < 1e-12);
    }

    #[test]
    fn resonance_on_lines(x in -30.0f64..30.0, delta in 1.0f64..4.0) {
        prop_assert_eq!(resonance_omega(x, 0.0, delta), 0.0);
        prop_assert_eq!(resonance_omega(0.0, x, delta), 0.0);
        prop_assert_eq!(resonance_omega(x, -x, delta), 0.0);
    }

    #[test]
    fn resonance_sign_by_sextant(x in -30.0f64..30.0, y in -30.0f64..30.0) {
        prop_assume!(x.abs() > 1e-6 && y.abs() > 1e-6 && (x + y).abs() > 1e-6);
        let om = resonance_omega(x, y, 1.0);
        prop_assert!(resonance_weight(x, y, 1.0) > 0.0);
        prop_assert_eq!(om.signum(), (x * y * (x + y)).signum());
    }
}
