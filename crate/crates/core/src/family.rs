//! Structured families of sparse linear functionals and their closed-form suprema.
//!
//! Three shapes cover every norm in this crate:
//!
//! * `Average`: `c · Σ_{j∈A} e_j*` over all index sets `A` of a fixed size `q`.
//!   When `padded`, `A` may reach past the truncation (those coordinates are zero).
//! * `Coordinate`: `s · e_j*` for every in-range `j`.
//! * `DyadicPair`: `½ e_l* ± ½ e_m*` for distinct `l, m` in the same dyadic block
//!   `E_n = {2^n, …, 2^{n+1} − 1}`, `n ≥ 1`. Index 1 lies in no block.
//!
//! `sup` evaluates `sup_x |f(x)|` without enumerating; `argmax` additionally returns
//! a maximizing member. Ties go to the smallest index.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;
use crate::vector::CoordVector;

/// A small positive rational coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coeff {
    pub num: i64,
    pub den: i64,
}

impl Coeff {
    pub const HALF: Coeff = Coeff { num: 1, den: 2 };

    pub fn recip(den: usize) -> Self {
        Coeff { num: 1, den: den as i64 }
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        S::from_ratio(self.num, self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    #[serde(rename = "A")]
    Average,
    #[serde(rename = "B")]
    Coordinate,
    #[serde(rename = "C")]
    DyadicPair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionalFamily {
    Average { coeff: Coeff, size: usize, padded: bool },
    Coordinate { scale: Coeff },
    DyadicPair,
}

/// One explicit member of a family: `coeff · Σ sign_j e_j*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Functional {
    pub family: FamilyKind,
    pub coeff: Coeff,
    pub terms: Vec<(usize, i8)>,
}

impl Functional {
    pub fn eval<S: Scalar>(&self, f: &CoordVector<S>) -> S {
        let mut acc = S::zero();
        for &(j, sign) in &self.terms {
            let v = f.get(j);
            acc = if sign < 0 { acc - v } else { acc + v };
        }
        acc * self.coeff.to_scalar::<S>()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|(j, _)| *j)
    }
}

/// Dyadic block containing `j`, if any.
pub fn block_of(j: usize) -> Option<u32> {
    if j < 2 {
        None
    } else {
        Some(usize::BITS - 1 - j.leading_zeros())
    }
}

/// Full index range of `E_n`.
pub fn block_bounds(n: u32) -> (usize, usize) {
    (1usize << n, (1usize << (n + 1)) - 1)
}

/// In-range part of `E_n`, when it holds at least two indices.
pub fn block_in_range(n: u32, m: usize) -> Option<(usize, usize)> {
    let (lo, hi) = block_bounds(n);
    let hi = hi.min(m);
    (hi > lo).then_some((lo, hi))
}

pub fn block_is_full(n: u32, m: usize) -> bool {
    block_bounds(n).1 <= m
}

/// Blocks with at least two in-range indices.
pub fn blocks(m: usize) -> impl Iterator<Item = u32> {
    (1u32..usize::BITS - 1).take_while(move |&n| block_in_range(n, m).is_some())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn cmp_desc<S: Scalar>(a: &(S, usize), b: &(S, usize)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// Indices of `1..=m` outside the (sorted) support, ascending.
fn zero_indices<'a, S>(f: &'a CoordVector<S>, m: usize) -> impl Iterator<Item = usize> + 'a
where
    S: Scalar,
{
    let mut support = f.entries().iter().map(|(i, _)| *i).peekable();
    (1..=m).filter(move |j| {
        while support.peek().is_some_and(|s| s < j) {
            support.next();
        }
        support.peek() != Some(j)
    })
}

impl FunctionalFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FunctionalFamily::Average { .. } => FamilyKind::Average,
            FunctionalFamily::Coordinate { .. } => FamilyKind::Coordinate,
            FunctionalFamily::DyadicPair => FamilyKind::DyadicPair,
        }
    }

    /// Largest ℓ1-mass of a member.
    pub fn l1_mass(&self) -> f64 {
        match self {
            FunctionalFamily::Average { coeff, size, .. } => coeff.to_f64() * *size as f64,
            FunctionalFamily::Coordinate { scale } => scale.to_f64(),
            FunctionalFamily::DyadicPair => 1.0,
        }
    }

    /// Number of members restricted to `1..=m`.
    pub fn count(&self, m: usize) -> u128 {
        match *self {
            FunctionalFamily::Average { size, padded: false, .. } => binomial(m, size),
            FunctionalFamily::Average { size, padded: true, .. } => {
                (0..=size.min(m)).fold(0u128, |acc, j| acc.saturating_add(binomial(m, j)))
            }
            FunctionalFamily::Coordinate { .. } => m as u128,
            FunctionalFamily::DyadicPair => blocks(m)
                .map(|n| {
                    let (lo, hi) = block_in_range(n, m).unwrap();
                    2 * binomial(hi - lo + 1, 2)
                })
                .sum(),
        }
    }

    /// `sup_x |f(x)|` over the family restricted to truncation `m`.
    pub fn sup<S: Scalar>(&self, f: &CoordVector<S>, m: usize) -> S {
        match *self {
            FunctionalFamily::Average { coeff, size, padded } => {
                let plus = average_side_sum(f, m, size, padded, false);
                let minus = average_side_sum(f, m, size, padded, true);
                S::max_of(plus, minus) * coeff.to_scalar::<S>()
            }
            FunctionalFamily::Coordinate { scale } => f.linf() * scale.to_scalar::<S>(),
            FunctionalFamily::DyadicPair => pair_sup(f, m),
        }
    }

    /// A member attaining `sup`, or `None` when the family is empty at this truncation.
    pub fn argmax<S: Scalar>(&self, f: &CoordVector<S>, m: usize) -> Option<(S, Functional)> {
        match *self {
            FunctionalFamily::Average { coeff, size, padded } => {
                let (plus, a) = average_side_argmax(f, m, size, padded, false);
                let (minus, b) = average_side_argmax(f, m, size, padded, true);
                let (best, terms) = if minus > plus { (minus, b) } else { (plus, a) };
                let functional = Functional {
                    family: FamilyKind::Average,
                    coeff,
                    terms: terms.into_iter().map(|j| (j, 1)).collect(),
                };
                Some((best * coeff.to_scalar::<S>(), functional))
            }
            FunctionalFamily::Coordinate { scale } => {
                if m == 0 {
                    return None;
                }
                let mut best = (S::zero(), 1usize);
                for (j, v) in f.entries() {
                    if v.abs() > best.0 {
                        best = (v.abs(), *j);
                    }
                }
                let functional = Functional { family: FamilyKind::Coordinate, coeff: scale, terms: vec![(best.1, 1)] };
                Some((best.0 * scale.to_scalar::<S>(), functional))
            }
            FunctionalFamily::DyadicPair => pair_argmax(f, m),
        }
    }

    /// Whether `x` is a member of this family at truncation `m`.
    pub fn contains(&self, x: &Functional, m: usize) -> bool {
        if x.family != self.kind() {
            return false;
        }
        let mut idx: Vec<usize> = x.indices().collect();
        let in_range = idx.iter().all(|&j| j >= 1 && j <= m);
        idx.sort_unstable();
        idx.dedup();
        let distinct = idx.len() == x.terms.len();
        if !in_range || !distinct {
            return false;
        }
        match *self {
            FunctionalFamily::Average { coeff, size, padded } => {
                x.coeff == coeff
                    && x.terms.iter().all(|(_, s)| *s == 1)
                    && if padded { x.terms.len() <= size } else { x.terms.len() == size }
            }
            FunctionalFamily::Coordinate { scale } => x.coeff == scale && x.terms.len() == 1 && x.terms[0].1 == 1,
            FunctionalFamily::DyadicPair => {
                x.coeff == Coeff::HALF
                    && x.terms.len() == 2
                    && x.terms[0].1 == 1
                    && x.terms[1].1.abs() == 1
                    && block_of(x.terms[0].0).is_some()
                    && block_of(x.terms[0].0) == block_of(x.terms[1].0)
            }
        }
    }
}

/// `max_A ±Σ_{j∈A} f_j` (sign chosen by `negate`) over admissible `A`, without indices.
fn average_side_sum<S: Scalar>(f: &CoordVector<S>, m: usize, q: usize, padded: bool, negate: bool) -> S {
    let mut vals: Vec<S> = f
        .entries()
        .iter()
        .map(|(_, v)| if negate { -v.clone() } else { v.clone() })
        .collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let positives = vals.iter().take_while(|v| v.is_strictly_positive()).count();
    let take = positives.min(q);
    let mut sum = vals[..take].iter().fold(S::zero(), |acc, v| acc + v.clone());
    if padded || take == q {
        return sum;
    }
    let zeros = m - f.nnz();
    let rem = (q - take).saturating_sub(zeros);
    // Remaining slots must use the least negative entries.
    for v in vals[positives..].iter().take(rem) {
        sum = sum + v.clone();
    }
    sum
}

fn average_side_argmax<S: Scalar>(
    f: &CoordVector<S>,
    m: usize,
    q: usize,
    padded: bool,
    negate: bool,
) -> (S, Vec<usize>) {
    let mut vals: Vec<(S, usize)> = f
        .entries()
        .iter()
        .map(|(i, v)| (if negate { -v.clone() } else { v.clone() }, *i))
        .collect();
    vals.sort_by(cmp_desc);
    let positives = vals.iter().take_while(|(v, _)| v.is_strictly_positive()).count();
    let take = positives.min(q);
    let mut sum = S::zero();
    let mut chosen = Vec::with_capacity(q);
    for (v, i) in &vals[..take] {
        sum = sum + v.clone();
        chosen.push(*i);
    }
    if take < q {
        let zeros: Vec<usize> = zero_indices(f, m).take(q - take).collect();
        chosen.extend_from_slice(&zeros);
        if !padded {
            let rem = q - chosen.len();
            for (v, i) in vals[positives..].iter().take(rem) {
                sum = sum + v.clone();
                chosen.push(*i);
            }
        }
    }
    chosen.sort_unstable();
    (sum, chosen)
}

fn pair_sup<S: Scalar>(f: &CoordVector<S>, m: usize) -> S {
    let mut best = S::zero();
    let entries = f.entries();
    let mut pos = 0;
    while pos < entries.len() {
        let Some(n) = block_of(entries[pos].0) else {
            pos += 1;
            continue;
        };
        let mut top = (S::zero(), S::zero());
        while pos < entries.len() && block_of(entries[pos].0) == Some(n) {
            let a = entries[pos].1.abs();
            if a > top.0 {
                top = (a, top.0);
            } else if a > top.1 {
                top.1 = a;
            }
            pos += 1;
        }
        if block_in_range(n, m).is_some() {
            let v = (top.0 + top.1) * S::from_ratio(1, 2);
            if v > best {
                best = v;
            }
        }
    }
    best
}

fn pair_argmax<S: Scalar>(f: &CoordVector<S>, m: usize) -> Option<(S, Functional)> {
    let mut best: Option<(S, usize, usize)> = None;
    for n in blocks(m) {
        let (lo, hi) = block_in_range(n, m).unwrap();
        let mut members: Vec<(S, usize)> = f
            .entries()
            .iter()
            .filter(|(i, _)| *i >= lo && *i <= hi)
            .map(|(i, v)| (v.abs(), *i))
            .collect();
        members.sort_by(cmp_desc);
        // Pad with in-block zero coordinates, smallest index first.
        let mut j = lo;
        while members.len() < 2 {
            if !members.iter().any(|(_, i)| *i == j) {
                members.push((S::zero(), j));
            }
            j += 1;
        }
        let v = (members[0].0.clone() + members[1].0.clone()) * S::from_ratio(1, 2);
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, members[0].1, members[1].1));
        }
    }
    let (v, a, b) = best?;
    let (l, r) = (a.min(b), a.max(b));
    let sign = if (f.get(l) * f.get(r)).is_negative() { -1 } else { 1 };
    let functional = Functional { family: FamilyKind::DyadicPair, coeff: Coeff::HALF, terms: vec![(l, 1), (r, sign)] };
    Some((v, functional))
}
