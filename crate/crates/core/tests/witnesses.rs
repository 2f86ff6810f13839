use asqlab_core::constructions::{make_c0_sum, make_fkn, make_xn};
use asqlab_core::oracle::enumerate_oracle;
use asqlab_core::random::{random_unit, random_unit_sum, trial_rng, VectorShape};
use asqlab_core::space::{sum_add, sum_sub};
use asqlab_core::witness::{
    component_witness, coordinate_witness, find_block_pair, linf_transfer_witness, multi_coordinate_witness, pair_witness,
    super_sequence, type_tau, RightFactor,
};
use asqlab_core::{CoordVector, Error, PolyNormSpace, Rational, Scalar};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// `max ‖f ± h‖` from the enumeration oracle, not the closed form.
fn oracle_pm(space: &PolyNormSpace, f: &CoordVector<Rational>, h: &CoordVector<Rational>) -> Rational {
    let a = enumerate_oracle(space, &f.add(h)).unwrap();
    let b = enumerate_oracle(space, &f.sub(h)).unwrap();
    if a > b {
        a
    } else {
        b
    }
}

#[test]
fn coordinate_witness_on_all_ones() {
    let space = make_fkn(2, 4, 8).unwrap();
    let f = CoordVector::from_dense(&vec![r(1, 1); 8]);
    assert_eq!(space.norm(&f).unwrap(), r(1, 1));
    let rep = coordinate_witness(&space, &f, 0.0).unwrap();
    assert_eq!(rep.h.nnz(), 1);
    assert_eq!(rep.h.linf(), r(2, 1));
    assert!(rep.passed());
    assert!(oracle_pm(&space, &f, &rep.h) <= r(3, 2));
}

#[test]
fn multi_coordinate_runs_out_of_coordinates() {
    let space = make_fkn(2, 4, 8).unwrap();
    let fs: Vec<_> = (0..4)
        .map(|i| CoordVector::from_entries(8, [(2 * i + 1, r(2, 1)), (2 * i + 2, r(-2, 1))]).unwrap())
        .collect();
    for f in &fs {
        assert_eq!(space.norm(f).unwrap(), r(1, 1));
    }
    assert!(matches!(multi_coordinate_witness(&space, &fs, 0.0), Err(Error::TruncationTooSmall { .. })));
    assert!(multi_coordinate_witness(&space, &fs[..2], 0.0).unwrap().passed());
}

#[test]
fn pair_witness_on_small_block_spike() {
    let space = make_xn(2, 2, 16).unwrap();
    let f = CoordVector::basis(16, 2, r(2, 1)).unwrap();
    let rep = pair_witness(&space, std::slice::from_ref(&f), 0.0).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.bound, r(3, 2));
    assert!(oracle_pm(&space, &f, &rep.h) <= r(3, 2));
}

#[test]
fn empty_input_pair() {
    let space = make_xn(2, 2, 16).unwrap();
    let p = find_block_pair::<Rational>(&space, &[], &r(1, 2), 0.0).unwrap();
    assert_eq!((p.block, p.l, p.m), (1, 2, 3));
}

#[test]
fn component_witness_small_and_large_eps() {
    let space = make_c0_sum(&[(2, 2, 32), (2, 4, 32), (2, 6, 32)]).unwrap();
    let mut x = space.zero::<Rational>();
    x[0] = CoordVector::from_entries(32, [(4, r(1, 1)), (5, r(-1, 1))]).unwrap();
    let rep = component_witness(&space, &[x.clone()], &r(3, 5), 0.0).unwrap();
    assert_eq!(rep.placement, vec![1]);
    assert_eq!(rep.bound, r(3, 2));
    assert!(rep.passed());
    let err = component_witness(&space, &[x], &r(1, 20), 0.0).unwrap_err();
    assert!(err.to_string().contains("N >= 22"), "{err}");
}

#[test]
fn transfer_with_small_left_part() {
    let left = make_fkn(2, 4, 8).unwrap();
    let right = make_xn(4, 4, 32).unwrap();
    let w = CoordVector::basis(8, 3, r(9, 5)).unwrap();
    assert_eq!(left.norm(&w).unwrap(), r(9, 10));
    let x = CoordVector::basis(32, 4, r(4, 1)).unwrap();
    let x = x.scale(&(r(1, 1) / right.norm(&x).unwrap()));
    let rep = linf_transfer_witness(&left, &RightFactor::Single(right.clone()), &[w], &[vec![x.clone()]], 0.0).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.report.bound, r(5, 4));
    assert_eq!(rep.report.placement, vec![2]);

    // With w = 0 the sum sees exactly the right factor's witness.
    let zero = CoordVector::zero(8);
    let rep0 = linf_transfer_witness(&left, &RightFactor::Single(right.clone()), &[zero], &[vec![x.clone()]], 0.0).unwrap();
    let inner = pair_witness(&right, &[x], 0.0).unwrap();
    assert_eq!(rep0.report.h, inner.h);
    assert_eq!(rep0.report.worst(), inner.worst());
}

#[test]
fn super_sequence_and_tau() {
    let specs: Vec<_> = (1..=9).map(|i| (2, 2 * i, 64)).collect();
    let space = make_c0_sum(&specs).unwrap();
    let mut shapes = vec![VectorShape::sparse(4, 8); 3];
    shapes.extend(vec![VectorShape::sparse(0, 0); 6]);
    let mut rng = trial_rng(11, 0);
    let dense: Vec<_> = (0..5).map(|_| random_unit_sum::<f64, _>(&space, &mut rng, &shapes, 1.0).unwrap()).collect();
    let eps = vec![0.5, 0.25, 0.125, 1.0 / 12.0, 1.0 / 16.0];
    let seq = super_sequence(&space, &dense, &eps, 1e-12).unwrap();
    assert_eq!(seq.steps.len(), 5);
    assert!(seq.passed());

    let zero = space.zero::<f64>();
    let t = type_tau(&space, &zero, &seq, &dense).unwrap();
    assert_eq!(t.tau, 1.0);
    assert!(t.passed);
    for x in &dense {
        let t = type_tau(&space, x, &seq, &dense).unwrap();
        assert!(t.passed, "{t:?}");
        assert_eq!(t.density_gap, 0.0);
    }
}

#[test]
fn super_sequence_rejects_bad_eps() {
    let space = make_c0_sum(&[(2, 2, 32), (2, 4, 32)]).unwrap();
    let x = space.zero::<f64>();
    assert!(super_sequence(&space, &[x.clone(), x.clone()], &[0.25, 0.5], 0.0).is_err());
    assert!(super_sequence(&space, &[x], &[], 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordinate_witness_against_oracle(seed in any::<u64>()) {
        let space = make_fkn(2, 4, 8).unwrap();
        let f: CoordVector<Rational> = random_unit(&space, &mut trial_rng(seed, 0), &VectorShape::full(8)).unwrap();
        let rep = coordinate_witness(&space, &f, 0.0).unwrap();
        prop_assert!(rep.passed());
        prop_assert_eq!(space.norm(&rep.h).unwrap(), r(1, 1));
        prop_assert!(oracle_pm(&space, &f, &rep.h) <= r(3, 2));
    }

    #[test]
    fn pair_witness_against_oracle(seed in any::<u64>(), count in 1usize..=3) {
        let space = make_xn(2, 2, 64).unwrap();
        let mut rng = trial_rng(seed, 0);
        let fs: Vec<CoordVector<Rational>> =
            (0..count).map(|_| random_unit(&space, &mut rng, &VectorShape::sparse(5, 12)).unwrap()).collect();
        let rep = pair_witness(&space, &fs, 0.0).unwrap();
        prop_assert!(rep.passed());
        prop_assert_eq!(enumerate_oracle(&space, &rep.h).unwrap(), r(1, 1));
        for f in &fs {
            prop_assert!(oracle_pm(&space, f, &rep.h) <= r(3, 2));
        }
    }

    #[test]
    fn component_witness_against_oracle(seed in any::<u64>()) {
        let space = make_c0_sum(&[(2, 2, 32), (2, 4, 32), (2, 6, 32)]).unwrap();
        let shapes = vec![VectorShape::sparse(5, 8); 3];
        let mut rng = trial_rng(seed, 0);
        let x = random_unit_sum::<Rational, _>(&space, &mut rng, &shapes, 0.7).unwrap();
        let rep = component_witness(&space, std::slice::from_ref(&x), &r(1, 4), 0.0).unwrap();
        prop_assert!(rep.passed());
        let c = rep.placement[0] - 1;
        let mut h = space.zero::<Rational>();
        h[c] = rep.h.clone();
        for y in [sum_add(&x, &h), sum_sub(&x, &h)] {
            let n = space.components.iter().zip(&y).map(|(s, v)| enumerate_oracle(s, v).unwrap()).fold(r(0, 1), |a, b| if b > a { b } else { a });
            prop_assert!(n <= r(5, 4));
        }
    }
}
