use asqlab_core::certificates::{
    build_counterexample, counterexample_indices, refute_lasq_sweep, refute_unit_h, verify_certificate, CertificateCase,
};
use asqlab_core::constructions::make_xn;
use asqlab_core::moduli::ModulusConfig;
use asqlab_core::oracle::enumerate_oracle;
use asqlab_core::random::{random_unit, trial_rng, VectorShape};
use asqlab_core::{CoordVector, Rational, Scalar};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

#[test]
fn counterexample_shape() {
    let space = make_xn(2, 4, 64).unwrap();
    let f: CoordVector<Rational> = build_counterexample(&space).unwrap();
    assert_eq!(f, CoordVector::from_entries(64, [(4, r(2, 1)), (8, r(2, 1))]).unwrap());
    assert_eq!(counterexample_indices(4), vec![4, 8]);
    assert_eq!(space.norm(&f).unwrap(), r(1, 1));
    assert_eq!(enumerate_oracle(&space, &f).unwrap(), r(1, 1));
}

#[test]
fn counterexample_needs_room() {
    let space = make_xn(2, 2, 8).unwrap();
    assert!(build_counterexample::<Rational>(&space).is_err());
    let odd = make_xn(2, 3, 64).unwrap();
    assert!(build_counterexample::<Rational>(&odd).is_err());
}

#[test]
fn spike_on_the_support() {
    let space = make_xn(2, 4, 64).unwrap();
    let f: CoordVector<Rational> = build_counterexample(&space).unwrap();
    let h = CoordVector::basis(64, 4, r(2, 1)).unwrap();
    assert_eq!(space.norm(&h).unwrap(), r(1, 1));
    let eps = r(1, 16);
    let cert = refute_unit_h(&space, &f, &h, &eps, 0.0).unwrap();
    assert!(cert.achieved >= r(2, 1));
    assert!(verify_certificate(&space, &f, &h, &cert, 0.0).unwrap().passed());
}

#[test]
fn pair_far_out() {
    let space = make_xn(2, 2, 16).unwrap();
    let f: CoordVector<Rational> = build_counterexample(&space).unwrap();
    let h = CoordVector::from_entries(16, [(8, r(1, 1)), (9, r(-1, 1))]).unwrap();
    let cert = refute_unit_h(&space, &f, &h, &r(1, 8), 0.0).unwrap();
    assert!(cert.achieved >= r(3, 2));
    assert!(verify_certificate(&space, &f, &h, &cert, 0.0).unwrap().passed());
}

#[test]
fn eps_out_of_range() {
    let space = make_xn(2, 4, 64).unwrap();
    let f: CoordVector<Rational> = build_counterexample(&space).unwrap();
    let h = CoordVector::basis(64, 4, r(2, 1)).unwrap();
    assert!(refute_unit_h(&space, &f, &h, &r(1, 12), 0.0).is_err());
    assert!(refute_unit_h(&space, &f, &h, &r(0, 1), 0.0).is_err());
    assert!(refute_unit_h(&space, &f, &h.scale(&r(1, 2)), &r(1, 16), 0.0).is_err());
}

#[test]
fn float_eps_must_be_strictly_positive() {
    let space = make_xn(2, 2, 16).unwrap();
    let f: CoordVector<f64> = build_counterexample(&space).unwrap();
    let h = CoordVector::from_entries(16, [(8, 1.0), (9, -1.0)]).unwrap();
    for eps in [0.0, f64::NAN, -0.1] {
        assert!(refute_unit_h(&space, &f, &h, &eps, 1e-12).is_err(), "eps = {eps}");
    }
}

#[test]
fn sweep_refutes_and_control_does_not() {
    let space = make_xn(2, 2, 16).unwrap();
    let cfg = ModulusConfig::new(12, 40, 3);
    let rep = refute_lasq_sweep(&space, &cfg, false).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.failures.is_empty());
    assert_eq!(rep.certified, rep.candidates);
    let control = refute_lasq_sweep(&space, &cfg, true).unwrap();
    assert!(control.passed(), "{control:?}");
    assert!(control.modulus.value_upper <= 1.5 + 1e-9);
}

fn case_name(c: CertificateCase) -> &'static str {
    match c {
        CertificateCase::BlockClaim => "block",
        CertificateCase::Case1Average => "average",
        CertificateCase::Case2Coordinate => "coordinate",
        CertificateCase::Case3Pair => "pair",
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_certificate_survives_the_oracle(seed in any::<u64>(), nnz in 1usize..=8, support in 4usize..=40) {
        let space = make_xn(2, 4, 64).unwrap();
        let f: CoordVector<Rational> = build_counterexample(&space).unwrap();
        let h: CoordVector<Rational> = random_unit(&space, &mut trial_rng(seed, 0), &VectorShape::sparse(nnz, support)).unwrap();
        let cert = refute_unit_h(&space, &f, &h, &r(1, 16), 0.0).unwrap();
        let check = verify_certificate(&space, &f, &h, &cert, 0.0).unwrap();
        prop_assert!(check.passed(), "case {} failed: {:?}", case_name(cert.case), check);
        prop_assert!(check.oracle_norm > r(17, 16));
    }

    #[test]
    fn float_certificates_clear_the_margin(seed in any::<u64>()) {
        let space = make_xn(2, 2, 16).unwrap();
        let f: CoordVector<f64> = build_counterexample(&space).unwrap();
        let h: CoordVector<f64> = random_unit(&space, &mut trial_rng(seed, 1), &VectorShape::full(16)).unwrap();
        let cert = refute_unit_h(&space, &f, &h, &0.125, 1e-12).unwrap();
        prop_assert!(cert.achieved > 1.125);
        prop_assert!(verify_certificate(&space, &f, &h, &cert, 1e-12).unwrap().passed());
    }
}
