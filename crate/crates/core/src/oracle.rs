//! Ground-truth norm evaluation by enumeration.
//!
//! Two enumerators live here. [`enumerate_family`] lists every functional of a family
//! at truncation `m`, which is only practical for tiny `m`. [`enumerate_oracle`]
//! visits every *distinct restriction* of the functionals to `supp f` instead: two
//! averages that differ only on coordinates where `f` vanishes give the same value,
//! so it suffices to walk subsets of the support whose size is admissible. Both are
//! independent of the closed-form suprema in [`crate::family`].

use std::ops::{Add, Neg};

use crate::error::{Error, Result};
use crate::family::{binomial, block_in_range, blocks, Coeff, FamilyKind, Functional, FunctionalFamily};
use crate::scalar::Scalar;
use crate::space::PolyNormSpace;
use crate::vector::CoordVector;

/// Default refusal threshold for oracle work, counted in visited functionals.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Admissible sizes of `A ∩ supp f` for an average family.
fn average_size_range(size: usize, padded: bool, m: usize, support: usize) -> (usize, usize) {
    let hi = size.min(support);
    let lo = if padded { 0 } else { size.saturating_sub(m - support) };
    (lo, hi)
}

/// Number of distinct restrictions the oracle will visit for `f`.
pub fn oracle_count<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>) -> u128 {
    let m = space.dim();
    let s = f.nnz();
    space
        .families()
        .iter()
        .map(|fam| match *fam {
            FunctionalFamily::Average { size, padded, .. } => {
                let (lo, hi) = average_size_range(size, padded, m, s);
                (lo..=hi).fold(0u128, |acc, j| acc.saturating_add(binomial(s, j)))
            }
            FunctionalFamily::Coordinate { .. } => s as u128,
            FunctionalFamily::DyadicPair => pair_restrictions(f, m).len() as u128,
        })
        .fold(0u128, u128::saturating_add)
}

pub fn enumerate_oracle<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>) -> Result<S> {
    enumerate_oracle_with_cap(space, f, DEFAULT_CAP)
}

/// `sup |f(x)|` over every functional of the space, by explicit enumeration of the
/// restrictions to `supp f`. Refuses when the work exceeds `cap`.
pub fn enumerate_oracle_with_cap<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>, cap: u128) -> Result<S> {
    if f.max_index() > space.dim() {
        return Err(Error::IndexOutOfRange { index: f.max_index(), dim: space.dim() });
    }
    let count = oracle_count(space, f);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    let m = space.dim();
    let values: Vec<S> = f.entries().iter().map(|(_, v)| v.clone()).collect();
    let mut best = S::zero();
    for fam in space.families() {
        let v = match *fam {
            FunctionalFamily::Average { coeff, size, padded } => {
                let (lo, hi) = average_size_range(size, padded, m, values.len());
                let raw = match S::common_denominator(&values) {
                    Some((ints, den)) => {
                        let top = subset_max_abs(&ints, lo, hi, 0i128);
                        from_i128::<S>(top) / den
                    }
                    None => subset_max_abs(&values, lo, hi, S::zero()),
                };
                raw * coeff.to_scalar::<S>()
            }
            FunctionalFamily::Coordinate { scale } => {
                let mut top = S::zero();
                for v in &values {
                    top = S::max_of(top, v.abs());
                }
                top * scale.to_scalar::<S>()
            }
            FunctionalFamily::DyadicPair => {
                let mut top = S::zero();
                for (a, b) in pair_restrictions(f, m) {
                    let x = f.get(a);
                    let y = b.map_or_else(S::zero, |b| f.get(b));
                    top = S::max_of(top, (x.clone() + y.clone()).abs());
                    top = S::max_of(top, (x - y).abs());
                }
                top * S::from_ratio(1, 2)
            }
        };
        best = S::max_of(best, v);
    }
    Ok(best)
}

fn from_i128<S: Scalar>(v: i128) -> S {
    // Split to stay within i64 for from_ratio.
    let base: i128 = 1 << 62;
    let (hi, lo) = (v / base, v % base);
    S::from_ratio(hi as i64, 1) * S::from_ratio(1 << 62, 1) + S::from_ratio(lo as i64, 1)
}

/// Largest `|Σ_{j∈S} v_j|` over index subsets with `lo ≤ |S| ≤ hi`.
fn subset_max_abs<T>(values: &[T], lo: usize, hi: usize, zero: T) -> T
where
    T: Clone + PartialOrd + Add<Output = T> + Neg<Output = T>,
{
    fn walk<T>(values: &[T], start: usize, size: usize, sum: T, lo: usize, hi: usize, best: &mut T)
    where
        T: Clone + PartialOrd + Add<Output = T> + Neg<Output = T>,
    {
        if size >= lo {
            let abs = if sum < -sum.clone() { -sum.clone() } else { sum.clone() };
            if abs > *best {
                *best = abs;
            }
        }
        if size == hi {
            return;
        }
        // Not enough indices left to reach `lo`.
        if values.len() - start + size < lo {
            return;
        }
        for i in start..values.len() {
            walk(values, i + 1, size + 1, sum.clone() + values[i].clone(), lo, hi, best);
        }
    }
    if lo > hi || lo > values.len() {
        return zero;
    }
    let mut best = zero.clone();
    walk(values, 0, 0, zero, lo, hi, &mut best);
    best
}

/// Distinct pair restrictions: both indices in the support, or one support index
/// paired with an in-block index where `f` vanishes (`None`).
fn pair_restrictions<S: Scalar>(f: &CoordVector<S>, m: usize) -> Vec<(usize, Option<usize>)> {
    let mut out = Vec::new();
    for n in blocks(m) {
        let (lo, hi) = block_in_range(n, m).expect("listed blocks are in range");
        let members: Vec<usize> = f.support().filter(|&j| j >= lo && j <= hi).collect();
        let has_zero = members.len() < hi - lo + 1;
        for (a_pos, &a) in members.iter().enumerate() {
            for &b in &members[a_pos + 1..] {
                out.push((a, Some(b)));
            }
            if has_zero {
                out.push((a, None));
            }
        }
    }
    out
}

/// Every functional of `fam` at truncation `m`, in a fixed order.
///
/// Padded averages are listed by their in-range part, so sets of every size up to
/// the cardinality appear.
pub fn enumerate_family(fam: &FunctionalFamily, m: usize, cap: u128) -> Result<Vec<Functional>> {
    let count = fam.count(m);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    match *fam {
        FunctionalFamily::Average { coeff, size, padded } => {
            let lo = if padded { 0 } else { size };
            for q in lo..=size.min(m) {
                for set in combinations(m, q) {
                    out.push(Functional {
                        family: FamilyKind::Average,
                        coeff,
                        terms: set.into_iter().map(|j| (j, 1)).collect(),
                    });
                }
            }
        }
        FunctionalFamily::Coordinate { scale } => {
            for j in 1..=m {
                out.push(Functional { family: FamilyKind::Coordinate, coeff: scale, terms: vec![(j, 1)] });
            }
        }
        FunctionalFamily::DyadicPair => {
            for n in blocks(m) {
                let (lo, hi) = block_in_range(n, m).expect("listed blocks are in range");
                for a in lo..=hi {
                    for b in a + 1..=hi {
                        for sign in [1, -1] {
                            out.push(Functional {
                                family: FamilyKind::DyadicPair,
                                coeff: Coeff::HALF,
                                terms: vec![(a, 1), (b, sign)],
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All `q`-subsets of `{1..m}` in lexicographic order.
fn combinations(m: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if q > m {
        return out;
    }
    let mut cur: Vec<usize> = (1..=q).collect();
    loop {
        out.push(cur.clone());
        // Rightmost position that can still advance.
        let mut i = q;
        while i > 0 && cur[i - 1] == m - q + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for t in i..q {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// Norm by evaluating every listed functional. Slow; for cross-checking the oracle.
pub fn brute_force_norm<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>, cap: u128) -> Result<S> {
    let mut best = S::zero();
    for fam in space.families() {
        for x in enumerate_family(fam, space.dim(), cap)? {
            best = S::max_of(best, x.eval(f).abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_fkn, make_xn};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn spec_instances() {
        let fkn = make_fkn(2, 4, 8).unwrap();
        let ones = CoordVector::from_entries(8, (1..=4).map(|j| (j, r(1, 1)))).unwrap();
        assert_eq!(enumerate_oracle(&fkn, &ones).unwrap(), r(1, 1));
        let xn = make_xn(2, 2, 16).unwrap();
        assert_eq!(enumerate_oracle(&xn, &CoordVector::basis(16, 4, r(1, 1)).unwrap()).unwrap(), r(1, 2));
    }

    #[test]
    fn combinations_are_complete() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4), vec![vec![1, 2, 3, 4]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn restricted_oracle_matches_full_listing() {
        let fkn = make_fkn(2, 3, 6).unwrap();
        let xn = make_xn(2, 2, 8).unwrap();
        let f = CoordVector::from_entries(6, [(1, r(3, 2)), (2, r(-1, 1)), (5, r(-2, 3))]).unwrap();
        assert_eq!(enumerate_oracle(&fkn, &f).unwrap(), brute_force_norm(&fkn, &f, DEFAULT_CAP).unwrap());
        let g = f.with_dim(8).unwrap().add(&CoordVector::basis(8, 7, r(5, 4)).unwrap());
        assert_eq!(enumerate_oracle(&xn, &g).unwrap(), brute_force_norm(&xn, &g, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn refuses_above_cap() {
        let xn = make_xn(2, 4, 32).unwrap();
        let f = CoordVector::from_entries(32, (1..=32).map(|j| (j, r(1, j as i64)))).unwrap();
        assert!(matches!(enumerate_oracle_with_cap(&xn, &f, 1000), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn float_mode_uses_generic_sums() {
        let fkn = make_fkn(2, 4, 8).unwrap();
        let f = CoordVector::from_entries(8, [(1, 0.5), (3, -1.25), (8, 2.0)]).unwrap();
        let a = enumerate_oracle(&fkn, &f).unwrap();
        assert!((a - fkn.norm(&f).unwrap()).abs() < 1e-12);
    }
}
