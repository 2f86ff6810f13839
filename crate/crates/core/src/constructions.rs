//! The named spaces: `F_{k,n}`, `X_N`, finite `c0`/`ℓ∞` sums of them, and the
//! interleaving map that identifies a `c0`-sum vector with a single sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Coeff, FunctionalFamily};
use crate::scalar::Scalar;
use crate::space::{PolyNormSpace, SpaceParams, SumKind, SumSpace};
use crate::vector::{CoordVector, SumVector};

/// JSON-facing space configuration: `{"kind": ..., "k", "n", "N", "m", "components"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
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
    C0Sum {
        components: Vec<SpaceSpec>,
    },
    /// Exactly two components, left then right.
    LinfSum {
        components: Vec<SpaceSpec>,
    },
}

/// A built space: a single polyhedral norm or a direct sum.
#[derive(Clone, Debug)]
pub enum BuiltSpace {
    Single(PolyNormSpace),
    Sum(SumSpace),
}

impl SpaceSpec {
    pub fn build(&self) -> Result<BuiltSpace> {
        match self {
            SpaceSpec::Fkn { k, n, m } => make_fkn(*k, *n, *m).map(BuiltSpace::Single),
            SpaceSpec::Xn { k, big_n, m } => make_xn(*k, *big_n, *m).map(BuiltSpace::Single),
            SpaceSpec::C0Sum { components } => {
                let specs = components
                    .iter()
                    .map(|c| match c {
                        SpaceSpec::Xn { k, big_n, m } => Ok((*k, *big_n, *m)),
                        other => Err(Error::config(format!("c0_sum components must be xn specs, got {other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                make_c0_sum(&specs).map(BuiltSpace::Sum)
            }
            SpaceSpec::LinfSum { components } => {
                let [left, right] = components.as_slice() else {
                    return Err(Error::config("linf_sum takes exactly two components"));
                };
                let single = |s: &SpaceSpec| match s.build()? {
                    BuiltSpace::Single(p) => Ok(p),
                    BuiltSpace::Sum(_) => Err(Error::config("linf_sum components must be single spaces")),
                };
                Ok(BuiltSpace::Sum(make_linf_sum(single(left)?, single(right)?)))
            }
        }
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `F_{k,n}` on `ℓ∞^m`: averages over `n`-subsets of `{1..m}` and `(1/k)`-scaled coordinates.
pub fn make_fkn(k: usize, n: usize, m: usize) -> Result<PolyNormSpace> {
    if k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    if k > n {
        return Err(Error::config(format!("k <= n violated (k = {k}, n = {n})")));
    }
    if n > m {
        return Err(Error::config(format!("n <= m violated (n = {n}, m = {m})")));
    }
    let families = vec![
        FunctionalFamily::Average { coeff: Coeff::recip(n), size: n, padded: false },
        FunctionalFamily::Coordinate { scale: Coeff::recip(k) },
    ];
    PolyNormSpace::with_params(format!("F_{{{k},{n}}}(m={m})"), m, families, SpaceParams::Fkn { k, n, m })
}

/// `X_N` truncated to `{1..m}`: averages `(1/N)Σ_{j∈A}` with `|A| = kN` (free to pad past
/// the truncation), `(1/k)`-scaled coordinates, and dyadic-block pairs.
pub fn make_xn(k: usize, big_n: usize, m: usize) -> Result<PolyNormSpace> {
    if k < 2 {
        return Err(Error::config(format!("k >= 2 required (k = {k})")));
    }
    if big_n == 0 {
        return Err(Error::config("N must be at least 1"));
    }
    if m < 2 {
        return Err(Error::config(format!("m >= 2 required (m = {m})")));
    }
    if k * big_n > m {
        return Err(Error::config(format!(
            "kN <= m required so that averages fit in the truncation (kN = {}, m = {m})",
            k * big_n
        )));
    }
    let families = vec![
        FunctionalFamily::Average { coeff: Coeff::recip(big_n), size: k * big_n, padded: true },
        FunctionalFamily::Coordinate { scale: Coeff::recip(k) },
        FunctionalFamily::DyadicPair,
    ];
    PolyNormSpace::with_params(format!("X_{big_n}(k={k},m={m})"), m, families, SpaceParams::Xn { k, big_n, m })
}

/// Finite `c0`-sum of `X_N` spaces; every `N` must be even.
pub fn make_c0_sum(specs: &[(usize, usize, usize)]) -> Result<SumSpace> {
    if specs.is_empty() {
        return Err(Error::config("c0 sum needs at least one component"));
    }
    let components = specs
        .iter()
        .map(|&(k, big_n, m)| {
            if big_n % 2 != 0 {
                return Err(Error::config(format!("c0 sum components need even N (got N = {big_n})")));
            }
            make_xn(k, big_n, m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SumSpace { kind: SumKind::C0, components })
}

pub fn make_linf_sum(left: PolyNormSpace, right: PolyNormSpace) -> SumSpace {
    SumSpace { kind: SumKind::Linf, components: vec![left, right] }
}

/// Bijection between `(component, coordinate)` pairs and output positions.
///
/// Pairs are enumerated in square shells `s = max(c, j)`: `(s,1), (1,s), (s,2), (2,s), …, (s,s)`.
/// The first five positions are `(1,1), (2,1), (1,2), (2,2), (3,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleaveMap {
    dims: Vec<usize>,
}

impl InterleaveMap {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn for_space(space: &SumSpace) -> Self {
        Self::new(space.components.iter().map(PolyNormSpace::dim).collect())
    }

    /// 1-based position of coordinate `j` of component `c` (both 1-based).
    pub fn position(c: usize, j: usize) -> usize {
        let s = c.max(j);
        let base = (s - 1) * (s - 1);
        if c == s && j == s {
            s * s
        } else if c == s {
            base + 2 * j - 1
        } else {
            base + 2 * c
        }
    }

    pub fn pair(pos: usize) -> (usize, usize) {
        let mut s = (pos as f64).sqrt().ceil() as usize;
        while s * s < pos {
            s += 1;
        }
        while s > 1 && (s - 1) * (s - 1) >= pos {
            s -= 1;
        }
        let r = pos - (s - 1) * (s - 1);
        if r == 2 * s - 1 {
            (s, s)
        } else if r % 2 == 1 {
            (s, r.div_ceil(2))
        } else {
            (r / 2, s)
        }
    }

    /// Truncation of the output sequence.
    pub fn output_dim(&self) -> usize {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .flat_map(|(c, &d)| (1..=d).map(move |j| Self::position(c + 1, j)))
            .max()
            .unwrap_or(0)
    }

    pub fn interleave<S: Scalar>(&self, x: &SumVector<S>) -> Result<CoordVector<S>> {
        if x.len() != self.dims.len() {
            return Err(Error::input(format!("expected {} components, got {}", self.dims.len(), x.len())));
        }
        let mut entries = Vec::new();
        for (c, v) in x.iter().enumerate() {
            if v.max_index() > self.dims[c] {
                return Err(Error::IndexOutOfRange { index: v.max_index(), dim: self.dims[c] });
            }
            entries.extend(v.entries().iter().map(|(j, val)| (Self::position(c + 1, *j), val.clone())));
        }
        CoordVector::from_entries(self.output_dim(), entries)
    }

    pub fn deinterleave<S: Scalar>(&self, y: &CoordVector<S>) -> Result<SumVector<S>> {
        let mut parts: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.dims.len()];
        for (pos, v) in y.entries() {
            let (c, j) = Self::pair(*pos);
            if c > self.dims.len() || j > self.dims[c - 1] {
                return Err(Error::input(format!("position {pos} maps outside the sum ({c}, {j})")));
            }
            parts[c - 1].push((j, v.clone()));
        }
        parts
            .into_iter()
            .zip(&self.dims)
            .map(|(e, &d)| CoordVector::from_entries(d, e))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InterleaveBoundsReport {
    pub samples: usize,
    pub k: f64,
    /// Smallest `‖Tx‖∞ / ‖x‖` and largest, over nonzero samples.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub bound_violations: usize,
    pub linearity_violations: usize,
    pub roundtrip_failures: usize,
}

impl InterleaveBoundsReport {
    pub fn passed(&self) -> bool {
        self.bound_violations == 0 && self.linearity_violations == 0 && self.roundtrip_failures == 0
    }
}

/// Checks `(1/k)‖x‖ ≤ ‖Tx‖∞ ≤ k‖x‖` on every sample, plus additivity on consecutive
/// pairs and exact inversion.
pub fn interleave_bounds_check<S: Scalar>(
    space: &SumSpace,
    samples: &[SumVector<S>],
    k: usize,
    rel_tol: f64,
) -> Result<InterleaveBoundsReport> {
    let map = InterleaveMap::for_space(space);
    let kk = S::from_usize(k);
    let mut report = InterleaveBoundsReport {
        samples: samples.len(),
        k: k as f64,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        bound_violations: 0,
        linearity_violations: 0,
        roundtrip_failures: 0,
    };
    let mut prev: Option<(&SumVector<S>, CoordVector<S>)> = None;
    for x in samples {
        let norm = space.norm(x)?;
        let tx = map.interleave(x)?;
        let sup = tx.linf();
        if !(norm.clone() / kk.clone()).le_tol(&sup, rel_tol) || !sup.le_tol(&(norm.clone() * kk.clone()), rel_tol) {
            report.bound_violations += 1;
        }
        if !norm.is_zero() {
            let ratio = sup.to_f64() / norm.to_f64();
            report.min_ratio = report.min_ratio.min(ratio);
            report.max_ratio = report.max_ratio.max(ratio);
        }
        if map.deinterleave(&tx)? != *x {
            report.roundtrip_failures += 1;
        }
        if let Some((px, ptx)) = &prev {
            let sum: SumVector<S> = px.iter().zip(x).map(|(a, b)| a.add(b)).collect();
            if map.interleave(&sum)? != ptx.add(&tx) {
                report.linearity_violations += 1;
            }
        }
        prev = Some((x, tx));
    }
    Ok(report)
}
