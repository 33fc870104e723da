use ilw::normal_form::{decay_ladder, verify_quadratic_identity, Fault, Lattice, NormalForm};

#[test]
fn identity_report_ilw() {
    let nf = NormalForm::ilw(1.0);
    let rep = verify_quadratic_identity(&nf, &Lattice::new(400, 25.0).unwrap());
    println!("{rep}");
    assert!(rep.passed());
}

#[test]
fn identity_report_bo() {
    let rep = verify_quadratic_identity(&NormalForm::benjamin_ono(), &Lattice::new(400, 25.0).unwrap());
    println!("{rep}");
    assert!(rep.passed());
}

#[test]
fn flipped_b2_fails_time_identity() {
    let nf = NormalForm::ilw(1.0).with_fault(Fault::FlipB2);
    let rep = verify_quadratic_identity(&nf, &Lattice::new(101, 25.0).unwrap());
    let c = rep.check("time_coefficients").unwrap();
    println!("{rep}");
    assert!(c.max_off_band > 1e-2);
}

#[test]
fn ladder() {
    let nf = NormalForm::ilw(1.0);
    let a = decay_ladder(&nf, &Lattice::new(201, 30.0).unwrap(), &Lattice::new(31, 15.0).unwrap());
    let b = decay_ladder(&nf, &Lattice::new(401, 30.0).unwrap(), &Lattice::new(61, 15.0).unwrap());
    println!("{a:?}\n{b:?}");
}
