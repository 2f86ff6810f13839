use asqlab_core::constructions::{make_c0_sum, make_fkn, make_xn, InterleaveMap};
use asqlab_core::family::{Coeff, FunctionalFamily};
use asqlab_core::oracle::{brute_force_norm, enumerate_oracle};
use asqlab_core::space::{project, sum_norm};
use asqlab_core::{CoordVector, PolyNormSpace, Rational, Scalar, SumKind};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn e(dim: usize, i: usize, v: Rational) -> CoordVector<Rational> {
    CoordVector::basis(dim, i, v).unwrap()
}

fn dense(values: &[i64]) -> CoordVector<Rational> {
    CoordVector::from_dense(&values.iter().map(|&v| r(v, 1)).collect::<Vec<_>>())
}

#[test]
fn closed_form_examples() {
    let f24 = make_fkn(2, 4, 8).unwrap();
    assert_eq!(f24.norm(&e(8, 1, r(2, 1))).unwrap(), r(1, 1));
    assert_eq!(f24.norm(&CoordVector::<Rational>::zero(8)).unwrap(), r(0, 1));

    let x2 = make_xn(2, 2, 16).unwrap();
    let d = e(16, 4, r(1, 1)).sub(&e(16, 5, r(1, 1)));
    assert_eq!(x2.norm(&d).unwrap(), r(1, 1));
    assert_eq!(x2.norm(&e(16, 4, r(2, 1))).unwrap(), r(1, 1));
}

#[test]
fn family_sup_examples() {
    let avg = FunctionalFamily::Average { coeff: Coeff::HALF, size: 4, padded: true };
    assert_eq!(avg.sup(&e(16, 4, r(2, 1)), 16), r(1, 1));
    let coord = FunctionalFamily::Coordinate { scale: Coeff::HALF };
    assert_eq!(coord.sup(&e(16, 1, r(1, 1)), 16), r(1, 2));
    let pair = FunctionalFamily::DyadicPair;
    let f = e(16, 4, r(1, 1)).add(&e(16, 5, r(1, 1)));
    assert_eq!(pair.sup(&f, 16), r(1, 1));
}

#[test]
fn oracle_examples() {
    let f24 = make_fkn(2, 4, 8).unwrap();
    assert_eq!(enumerate_oracle(&f24, &dense(&[1, 1, 1, 1, 0, 0, 0, 0])).unwrap(), r(1, 1));
    let x2 = make_xn(2, 2, 16).unwrap();
    assert_eq!(enumerate_oracle(&x2, &e(16, 4, r(1, 1))).unwrap(), r(1, 2));
}

#[test]
fn family_counts() {
    let f24 = make_fkn(2, 4, 8).unwrap();
    let counts: Vec<u128> = f24.families().iter().map(|fam| fam.count(8)).collect();
    // Members are counted up to a global sign.
    assert_eq!(counts, vec![70, 8]);
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(make_fkn(4, 3, 8).is_err());
    assert!(make_xn(1, 2, 16).is_err());
    assert!(make_c0_sum(&[(2, 3, 32)]).is_err());
    assert!(make_c0_sum(&[]).is_err());
}

#[test]
fn projection_is_contractive_example() {
    let x2 = make_xn(2, 2, 16).unwrap();
    let f = e(16, 4, r(1, 1)).sub(&e(16, 5, r(1, 1)));
    let p = project(&f, 4).unwrap();
    assert_eq!(p, e(16, 4, r(1, 1)));
    assert_eq!(x2.norm(&p).unwrap(), r(1, 2));
    assert!(x2.norm(&p).unwrap() <= x2.norm(&f).unwrap());
}

#[test]
fn c0_sum_examples() {
    let s = make_c0_sum(&[(2, 2, 16), (2, 4, 16), (2, 6, 16)]).unwrap();
    let d = e(16, 4, r(1, 1)).sub(&e(16, 5, r(1, 1)));
    let x = vec![d, CoordVector::zero(16), CoordVector::zero(16)];
    assert_eq!(s.norm(&x).unwrap(), r(1, 1));
    let pairs: Vec<_> = s.components.iter().zip(&x).collect();
    assert_eq!(sum_norm(SumKind::C0, &pairs).unwrap(), r(1, 1));
}

#[test]
fn interleave_examples() {
    let map = InterleaveMap::new(vec![4, 4]);
    let x = vec![e(4, 1, r(3, 1)), e(4, 1, r(5, 1))];
    let y = map.interleave(&x).unwrap();
    assert_eq!(y.get(1), r(3, 1));
    assert_eq!(y.get(2), r(5, 1));
    assert_eq!(map.deinterleave(&y).unwrap(), x);
    // The pairing is a bijection on an initial square.
    let mut seen = std::collections::HashSet::new();
    for c in 1..=6 {
        for j in 1..=6 {
            let p = InterleaveMap::position(c, j);
            assert_eq!(InterleaveMap::pair(p), (c, j));
            assert!(seen.insert(p));
        }
    }
    assert_eq!(seen.iter().max(), Some(&36));
}

fn small_spaces() -> Vec<PolyNormSpace> {
    vec![make_fkn(2, 4, 8).unwrap(), make_fkn(3, 4, 10).unwrap(), make_xn(2, 2, 12).unwrap(), make_xn(3, 4, 12).unwrap()]
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = CoordVector<Rational>> {
    prop::collection::vec((-7i64..=7, 1i64..=4), dim)
        .prop_map(|v| CoordVector::from_dense(&v.into_iter().map(|(n, d)| r(n, d)).collect::<Vec<_>>()))
}

fn case() -> impl Strategy<Value = (usize, CoordVector<Rational>, CoordVector<Rational>, Rational)> {
    (0usize..4).prop_flat_map(|i| {
        let dim = small_spaces()[i].dim();
        (Just(i), vec_strategy(dim), vec_strategy(dim), (-9i64..=9, 1i64..=5).prop_map(|(n, d)| r(n, d)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms((i, f, g, t) in case()) {
        let space = &small_spaces()[i];
        let nf = space.norm(&f).unwrap();
        let ng = space.norm(&g).unwrap();
        prop_assert_eq!(space.norm(&f.scale(&t)).unwrap(), t.abs() * nf.clone());
        prop_assert_eq!(space.norm(&f.neg()).unwrap(), nf.clone());
        prop_assert!(space.norm(&f.add(&g)).unwrap() <= nf.clone() + ng);
        prop_assert!(!nf.is_negative());
        prop_assert_eq!(nf.is_zero(), f.is_zero());
    }

    #[test]
    fn closed_form_matches_both_oracles((i, f, _g, _t) in case()) {
        let space = &small_spaces()[i];
        let closed = space.norm(&f).unwrap();
        prop_assert_eq!(enumerate_oracle(space, &f).unwrap(), closed.clone());
        prop_assert_eq!(brute_force_norm(space, &f, 10_000_000).unwrap(), closed);
    }

    #[test]
    fn linf_sandwich((i, f, _g, _t) in case()) {
        let space = &small_spaces()[i];
        let (c, big_c) = space.linf_equivalence();
        let n = space.norm(&f).unwrap().to_f64();
        let sup = f.linf().to_f64();
        prop_assert!(c * sup <= n * (1.0 + 1e-12));
        prop_assert!(n <= big_c * sup * (1.0 + 1e-12));
    }

    #[test]
    fn float_mode_tracks_rational_mode((i, f, _g, _t) in case()) {
        let space = &small_spaces()[i];
        let exact = space.norm(&f).unwrap().to_f64();
        let float = space.norm(&f.to_f64()).unwrap();
        prop_assert!((exact - float).abs() <= 1e-12 * exact.max(1.0));
    }

    // Only the padded spaces: unpadded averages are not monotone under truncation.
    #[test]
    fn projections_are_monotone((i, f, _g, _t) in case().prop_filter("padded spaces", |c| c.0 >= 2)) {
        let space = &small_spaces()[i];
        let mut prev = Rational::from_ratio(0, 1);
        for k in 1..=space.dim() {
            let n = space.norm(&project(&f, k).unwrap()).unwrap();
            prop_assert!(n >= prev);
            prev = n;
        }
        prop_assert_eq!(prev, space.norm(&f).unwrap());
    }
}
