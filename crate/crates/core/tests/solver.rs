use ilw::solver::*;
use ilw::{Field, GridSpec};
use num_complex::Complex64;

fn config(model: Model, grid: GridSpec, dt: f64, t_end: f64, datum: Datum) -> SimConfig {
    SimConfig { grid, delta: 1.0, model, dt, t_end, datum, dealias: true, cadence: 1 }
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn linear_regime_step_is_propagator() {
    let g = GridSpec::new(60.0, 256).unwrap();
    let u = Datum::gaussian(1e-8, 2.0).sample(&g).unwrap();
    // The nonlinear part of one step is O(ε·dt) relative to the linear one.
    let dt = 1e-4;
    let stepped = step_etdrk4(&u, dt, Model::IlwTransport, 1.0).unwrap();
    let exact = u
        .apply_multiplier(|xi| Complex64::new(0.0, dt * ilw::symbols::dispersion_big_a(xi, 1.0)).exp(), Complex64::new(1.0, 0.0))
        .unwrap();
    assert!(rel(&stepped, &exact) < 1e-12, "{}", rel(&stepped, &exact));
}

#[test]
fn one_step_defect_is_fifth_order() {
    // Local error of a step of size h against a reference built from many tiny steps.
    let g = GridSpec::new(40.0, 256).unwrap();
    let u = Datum::gaussian(0.5, 2.0).sample(&g).unwrap();
    let reference = |h: f64| {
        let it = Integrator::new(g, Model::Ilw, 1.0, h / 64.0, true).unwrap();
        let mut f = u.clone();
        for _ in 0..64 {
            f = it.step(&f).unwrap();
        }
        f
    };
    let defect = |h: f64| step_etdrk4(&u, h, Model::Ilw, 1.0).unwrap().sub(&reference(h)).unwrap().l2_norm();
    let (d1, d2) = (defect(0.2), defect(0.1));
    let ratio = d1 / d2;
    // Local error O(h⁵); at least the 2⁴ of a fourth order method.
    assert!(ratio > 14.0, "ratio {ratio} ({d1:e}, {d2:e})");
}

#[test]
fn mean_is_conserved_exactly() {
    let g = GridSpec::new(50.0, 128).unwrap();
    let tr = evolve(&config(Model::Ilw, g, 0.01, 1.0, Datum::gaussian(0.3, 2.0))).unwrap();
    for f in &tr.fields {
        assert!(f.mean().abs() < 1e-15);
    }
}

#[test]
fn time_reversal_returns_datum() {
    let g = GridSpec::new(80.0, 512).unwrap();
    let datum = Datum::gaussian(0.1, 2.0);
    let tr = evolve(&config(Model::Ilw, g, 0.005, 2.0, datum.clone())).unwrap();
    let back = Integrator::new(g, Model::Ilw, 1.0, -0.005, true).unwrap();
    let mut f = tr.last().unwrap().clone();
    for _ in 0..400 {
        f = back.step(&f).unwrap();
    }
    let u0 = datum.sample(&g).unwrap();
    assert!(f.sub(&u0).unwrap().sup_norm() < 1e-6);
}

#[test]
fn bo_matches_ilw_at_high_frequency() {
    let g = GridSpec::new(100.0, 1024).unwrap();
    let u0 = Field::from_fn(g, |x| 0.01 * (12.0 * x).cos() * (-(x / 5.0).powi(2)).exp());
    let mk = |m| config(m, g, 0.001, 1.0, Datum::gaussian(1.0, 1.0));
    let a = evolve_from(&mk(Model::Ilw), u0.clone(), false).unwrap();
    let b = evolve_from(&mk(Model::BenjaminOno), u0, false).unwrap();
    let worst = a.fields.iter().zip(&b.fields).map(|(x, y)| rel(x, y)).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn kdv_matches_transport_frame_at_low_frequency() {
    let g = GridSpec::new(2000.0, 256).unwrap();
    let u0 = Datum::gaussian(1e-3, 40.0).sample(&g).unwrap();
    let mk = |m| config(m, g, 0.5, 20.0, Datum::gaussian(1.0, 1.0));
    let a = evolve_from(&mk(Model::IlwTransport), u0.clone(), false).unwrap();
    let b = evolve_from(&mk(Model::Kdv), u0, false).unwrap();
    let worst = a.fields.iter().zip(&b.fields).map(|(x, y)| rel(x, y)).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn delta_scaling() {
    let g = GridSpec::new(100.0, 1024).unwrap();
    let datum = Datum::gaussian(0.1, 2.0);
    let mut c2 = config(Model::Ilw, g, 0.004, 1.0, datum.clone());
    c2.delta = 2.0;
    c2.cadence = 50;
    let u = evolve(&c2).unwrap();
    let v0 = rescale_delta(&datum.sample(&g).unwrap(), 2.0).unwrap();
    let c1 = SimConfig { grid: *v0.grid(), delta: 1.0, dt: 0.001, t_end: 0.25, cadence: 50, ..c2.clone() };
    let v = evolve_from(&c1, v0, false).unwrap();
    for (fu, fv) in u.fields.iter().zip(&v.fields) {
        let mapped = rescale_delta(fu, 2.0).unwrap();
        assert!(mapped.sub(fv).unwrap().sup_norm() < 1e-8 * fv.sup_norm());
    }
}

#[test]
fn energy_single_mode_and_unit_mass() {
    let g = GridSpec::new(2.0 * std::f64::consts::PI * 4.0, 64).unwrap();
    let xi0 = 3.0 / 4.0;
    let f = Field::from_fn(g, |x| (xi0 * x).cos());
    // E1 quadratic part = ∫ f T⁻¹f_x = -ξ₀coth(ξ₀)·∫cos²; cubic part integrates to 0.
    let e1 = energy(&f, 1, 1.0).unwrap();
    let expected = -xi0 / xi0.tanh() * f.l2_norm_sq();
    assert!((e1 - expected).abs() < 1e-12);
    let unit = f.scale(1.0 / f.l2_norm());
    assert!((energy(&unit, 0, 1.0).unwrap() - 0.5).abs() < 1e-14);
    assert!(energy(&f.map(|v| v + 1.0), 1, 1.0).is_err());
}

#[test]
fn stiffness_guard_rejects_huge_steps() {
    let g = GridSpec::new(10.0, 1024).unwrap();
    assert!(Integrator::new(g, Model::Ilw, 1.0, 1.0, true).is_err());
}
