use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyKind, Functional, FunctionalFamily};
use crate::scalar::Scalar;
use crate::vector::{CoordVector, SumVector};

/// Parameters of the named constructions, kept so that witness routines can validate
/// the configuration they were handed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceParams {
    Fkn {
        k: usize,
        n: usize,
        m: usize,
    },
    Xn {
        k: usize,
        #[serde(rename = "N")]
        big_n: usize,
        m: usize,
    },
    Custom,
}

/// A norm on `ℓ∞^m` given as the supremum of `|f(x)|` over a union of functional families.
#[derive(Clone, Debug)]
pub struct PolyNormSpace {
    label: String,
    dim: usize,
    families: Vec<FunctionalFamily>,
    params: SpaceParams,
}

impl PolyNormSpace {
    pub fn new(label: impl Into<String>, dim: usize, families: Vec<FunctionalFamily>) -> Result<Self> {
        Self::with_params(label, dim, families, SpaceParams::Custom)
    }

    pub(crate) fn with_params(
        label: impl Into<String>,
        dim: usize,
        families: Vec<FunctionalFamily>,
        params: SpaceParams,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("truncation m must be at least 1"));
        }
        if families.is_empty() {
            return Err(Error::config("a norm needs at least one functional family"));
        }
        for fam in &families {
            if let FunctionalFamily::Average { size, .. } = fam {
                if *size > dim {
                    return Err(Error::config(format!(
                        "average family of cardinality {size} does not fit in truncation m = {dim}"
                    )));
                }
            }
        }
        Ok(Self { label: label.into(), dim, families, params })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn families(&self) -> &[FunctionalFamily] {
        &self.families
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    fn check_support<S: Scalar>(&self, f: &CoordVector<S>) -> Result<()> {
        if f.max_index() > self.dim {
            return Err(Error::IndexOutOfRange { index: f.max_index(), dim: self.dim });
        }
        Ok(())
    }

    /// The norm, via the closed-form family suprema.
    pub fn norm<S: Scalar>(&self, f: &CoordVector<S>) -> Result<S> {
        self.check_support(f)?;
        Ok(self
            .families
            .iter()
            .map(|fam| fam.sup(f, self.dim))
            .fold(S::zero(), S::max_of))
    }

    /// A member of the union attaining the norm (first family wins ties).
    pub fn norming_functional<S: Scalar>(&self, f: &CoordVector<S>) -> Result<(S, Functional)> {
        self.check_support(f)?;
        let mut best: Option<(S, Functional)> = None;
        for fam in &self.families {
            if let Some((v, x)) = fam.argmax(f, self.dim) {
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, x));
                }
            }
        }
        best.ok_or_else(|| Error::invariant("space has no functionals at this truncation"))
    }

    pub fn contains(&self, x: &Functional) -> bool {
        self.families.iter().any(|fam| fam.contains(x, self.dim))
    }

    pub fn family(&self, kind: FamilyKind) -> Option<&FunctionalFamily> {
        self.families.iter().find(|f| f.kind() == kind)
    }

    /// Constants `(c, C)` with `c‖f‖∞ ≤ ‖f‖ ≤ C‖f‖∞`. `c` comes from the coordinate
    /// family and is 0 when there is none.
    pub fn linf_equivalence(&self) -> (f64, f64) {
        let lower = self
            .families
            .iter()
            .filter_map(|f| match f {
                FunctionalFamily::Coordinate { scale } => Some(scale.to_f64()),
                _ => None,
            })
            .fold(0.0, f64::max);
        let upper = self.families.iter().map(FunctionalFamily::l1_mass).fold(0.0, f64::max);
        (lower, upper)
    }

    /// Number of enumerable functionals in the union at this truncation.
    pub fn functional_count(&self) -> u128 {
        self.families.iter().map(|f| f.count(self.dim)).fold(0u128, u128::saturating_add)
    }
}

/// `P_K f`.
pub fn project<S: Scalar>(f: &CoordVector<S>, k: usize) -> Result<CoordVector<S>> {
    if k > f.dim() {
        return Err(Error::input(format!("projection rank {k} exceeds truncation {}", f.dim())));
    }
    Ok(f.project(k))
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct MonotoneReport<S: Scalar> {
    #[serde(serialize_with = "crate::report::ser_scalars")]
    pub values: Vec<S>,
    #[serde(serialize_with = "crate::report::ser_scalar")]
    pub full_norm: S,
    pub support_end: usize,
    pub nondecreasing: bool,
    pub reaches_full_norm: bool,
}

impl<S: Scalar> MonotoneReport<S> {
    pub fn passed(&self) -> bool {
        self.nondecreasing && self.reaches_full_norm
    }
}

/// Sweeps `K = 1..=m` and checks that `‖P_K f‖` is nondecreasing and equals `‖f‖`
/// from the last support index on.
pub fn monotone_limit_check<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>, rel_tol: f64) -> Result<MonotoneReport<S>> {
    let full = space.norm(f)?;
    let mut values = Vec::with_capacity(space.dim());
    for k in 1..=space.dim() {
        values.push(space.norm(&f.project(k))?);
    }
    let nondecreasing = values.windows(2).all(|w| w[0].le_tol(&w[1], rel_tol));
    let support_end = f.max_index().max(1);
    let reaches_full_norm = values[support_end - 1..].iter().all(|v| v.approx_eq(&full, rel_tol));
    Ok(MonotoneReport { values, full_norm: full, support_end, nondecreasing, reaches_full_norm })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    C0,
    Linf,
}

/// A finite direct sum normed by the maximum of the component norms.
///
/// At finite truncation the `c0` and `ℓ∞` sums share the same norm; the kind only
/// changes which witness semantics apply downstream.
#[derive(Clone, Debug)]
pub struct SumSpace {
    pub kind: SumKind,
    pub components: Vec<PolyNormSpace>,
}

impl SumSpace {
    pub fn norm<S: Scalar>(&self, x: &SumVector<S>) -> Result<S> {
        if x.len() != self.components.len() {
            return Err(Error::input(format!(
                "sum vector has {} components, space has {}",
                x.len(),
                self.components.len()
            )));
        }
        let pairs: Vec<(&PolyNormSpace, &CoordVector<S>)> = self.components.iter().zip(x).collect();
        sum_norm(self.kind, &pairs)
    }

    pub fn zero<S: Scalar>(&self) -> SumVector<S> {
        self.components.iter().map(|c| CoordVector::zero(c.dim())).collect()
    }
}

pub fn sum_norm<S: Scalar>(_kind: SumKind, components: &[(&PolyNormSpace, &CoordVector<S>)]) -> Result<S> {
    let mut best = S::zero();
    for (space, v) in components {
        best = S::max_of(best, space.norm(v)?);
    }
    Ok(best)
}

pub fn sum_add<S: Scalar>(a: &SumVector<S>, b: &SumVector<S>) -> SumVector<S> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn sum_sub<S: Scalar>(a: &SumVector<S>, b: &SumVector<S>) -> SumVector<S> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn sum_scale<S: Scalar>(a: &SumVector<S>, t: &S) -> SumVector<S> {
    a.iter().map(|x| x.scale(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_fkn, make_xn};
    use crate::scalar::Rational;
    use num_traits::Signed;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn fkn_spike_is_normed_by_coordinates() {
        let space = make_fkn(2, 4, 8).unwrap();
        let f = CoordVector::basis(8, 1, r(2, 1)).unwrap();
        assert_eq!(space.norm(&f).unwrap(), r(1, 1));
        assert_eq!(space.norm(&CoordVector::<Rational>::zero(8)).unwrap(), r(0, 1));
    }

    #[test]
    fn xn_pair_vector_has_norm_one() {
        let space = make_xn(2, 2, 16).unwrap();
        let h = CoordVector::from_entries(16, [(4, r(1, 1)), (5, r(-1, 1))]).unwrap();
        assert_eq!(space.norm(&h).unwrap(), r(1, 1));
        let (v, x) = space.norming_functional(&h).unwrap();
        assert_eq!(v, r(1, 1));
        assert!(space.contains(&x));
        assert_eq!(x.eval(&h).abs(), r(1, 1));
    }

    #[test]
    fn rejects_support_beyond_truncation() {
        let space = make_fkn(2, 4, 8).unwrap();
        let f = CoordVector::basis(9, 9, 1.0).unwrap();
        assert!(matches!(space.norm(&f), Err(Error::IndexOutOfRange { index: 9, dim: 8 })));
    }

    #[test]
    fn projection_of_pair_vector() {
        let space = make_xn(2, 2, 16).unwrap();
        let f = CoordVector::from_entries(16, [(4, r(1, 1)), (5, r(-1, 1))]).unwrap();
        let p4 = project(&f, 4).unwrap();
        assert_eq!(p4, CoordVector::basis(16, 4, r(1, 1)).unwrap());
        assert_eq!(space.norm(&p4).unwrap(), r(1, 2));
        for k in 5..=16 {
            assert_eq!(space.norm(&project(&f, k).unwrap()).unwrap(), r(1, 1));
        }
        assert!(project(&f, 17).is_err());
        let report = monotone_limit_check(&space, &f, 0.0).unwrap();
        assert!(report.passed());
        assert_eq!(report.support_end, 5);
    }

    #[test]
    fn sum_norm_is_max_of_components() {
        let x2 = make_xn(2, 2, 16).unwrap();
        let x4 = make_xn(2, 4, 16).unwrap();
        let a = CoordVector::from_entries(16, [(4, r(1, 1)), (5, r(-1, 1))]).unwrap();
        let z = CoordVector::zero(16);
        assert_eq!(sum_norm(SumKind::C0, &[(&x2, &a), (&x4, &z)]).unwrap(), r(1, 1));
    }

    #[test]
    fn equivalence_constants() {
        assert_eq!(make_fkn(2, 4, 8).unwrap().linf_equivalence(), (0.5, 1.0));
        assert_eq!(make_xn(2, 3, 16).unwrap().linf_equivalence(), (0.5, 2.0));
    }
}
