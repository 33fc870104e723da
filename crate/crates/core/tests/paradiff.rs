use ilw::paradiff::*;
use ilw::{DyadicIndex, Error, Field, GridSpec};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn grid() -> GridSpec {
    GridSpec::new(8.0 * PI, 4096).unwrap()
}

fn random_field(grid: GridSpec, seed: u64) -> Field {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dk = grid.dk();
    let modes: Vec<(f64, f64, f64)> = (1..=1500)
        .map(|m| {
            let xi = m as f64 * dk;
            let s = 1.0 / (1.0 + xi);
            (xi, s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0))
        })
        .collect();
    Field::from_fn(grid, |x| modes.iter().map(|&(xi, a, b)| a * (xi * x).cos() + b * (xi * x).sin()).sum())
        .without_mean()
}

#[test]
fn primitive_of_single_mode() {
    let g = grid();
    let l = g.period();
    let phi = Field::from_fn(g, |x| 2.0 * (2.0 * PI * x / l).sin());
    let p = primitive_phi(&phi).unwrap();
    let expect = Field::from_fn(g, |x| -(l / (2.0 * PI)) * (2.0 * PI * x / l).cos());
    assert!(p.sub(&expect).unwrap().sup_norm() < 1e-12);
}

#[test]
fn primitive_derivative_is_half() {
    let phi = random_field(grid(), 1);
    let p = primitive_phi(&phi).unwrap();
    let d = p.derivative(1).sub(&phi.scale(0.5)).unwrap().sup_norm();
    assert!(d < 1e-12 * phi.sup_norm().max(1.0), "{d:e}");
}

#[test]
fn primitive_rejects_mean() {
    let phi = Field::from_fn(grid(), |x| 1.0 + x.sin());
    assert!(matches!(primitive_phi(&phi), Err(Error::NotMeanZero { .. })));
}

#[test]
fn gauge_is_unimodular() {
    let phi = random_field(grid(), 2);
    for k in 0..=8 {
        let d = shell_diagnostics(&phi, k).unwrap();
        assert!(d.gauge_defect <= 1e-12 * d.psi_norm.max(1e-300), "k={k}: {d:?}");
    }
}

#[test]
fn bk_constants_are_finite() {
    for seed in [3, 4] {
        let phi = random_field(grid(), seed);
        for k in 0..=8 {
            let d = shell_diagnostics(&phi, k).unwrap();
            assert!(d.bk_constant.is_finite() && d.bk_constant < 10.0, "k={k}: {d:?}");
            assert!(d.commutator_gain.is_finite() && d.commutator_gain < 10.0, "k={k}: {d:?}");
        }
    }
}

#[test]
fn bk_is_quadratic() {
    let phi = random_field(grid(), 5);
    let k = DyadicIndex::plus(3);
    let a = nf_bk(&phi, k).unwrap();
    let b = nf_bk(&phi.scale(3.0), k).unwrap();
    let d = b.sub(&a.scale(9.0.into())).unwrap().l2_norm();
    assert!(d < 1e-12 * b.l2_norm(), "{d:e}");
}

#[test]
fn low_shell_input_gives_no_output() {
    // φ in a single shell far below k: every term needs shell-k input.
    let g = grid();
    let phi = Field::from_fn(g, |x| (2.0 * x / 4.0).sin());
    let b = nf_bk(&phi, DyadicIndex::plus(6)).unwrap();
    assert!(b.l2_norm() < 1e-13, "{:e}", b.l2_norm());
}

#[test]
fn gauge_expansion_is_cubic() {
    let phi = random_field(grid(), 6);
    for k in [0, 3, 6] {
        let k = DyadicIndex::plus(k);
        let e1 = gauge_expansion_defect(&phi.scale(1e-3), k).unwrap().l2_norm();
        let e2 = gauge_expansion_defect(&phi.scale(2e-3), k).unwrap().l2_norm();
        let ratio = e2 / e1;
        assert!((ratio - 8.0).abs() < 0.05, "{k:?}: ratio {ratio}");
    }
}

#[test]
fn envelope_transfer_is_bounded() {
    let phi = random_field(grid(), 8);
    let c = envelope_transfer(&phi, &(0..=8).collect::<Vec<_>>(), 0.5).unwrap();
    assert!(c.is_finite() && c < 10.0, "{c}");
}

#[test]
fn shell_out_of_range() {
    let phi = random_field(grid(), 9);
    assert!(nf_bk(&phi, DyadicIndex::plus(-10)).is_err());
    assert!(nf_bk(&phi, DyadicIndex::minus(2)).is_err());
}
