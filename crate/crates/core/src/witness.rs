//! Constructive witness procedures.
//!
//! Each routine returns a [`WitnessReport`]: the vector `h`, the achieved value
//! `max ‖f_i ± h‖` for every input and the bound the construction promises.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{block_bounds, block_is_full, block_of};
use crate::report::{ser_f64, ser_scalar, Verdict};
use crate::scalar::Scalar;
use crate::space::{PolyNormSpace, SpaceParams, SumKind, SumSpace};
use crate::vector::{CoordVector, SumVector};

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `h = k e_l` on `F_{k,n}`.
    Coordinate,
    /// `h = k e_l` for several inputs at once.
    MultiCoordinate,
    /// `h = e_l − e_m` from a dyadic block of `X_N`.
    BlockPair,
    /// Block-pair witness placed in one component of a `c0`-sum.
    C0Component,
    /// Witness of the right factor of an `ℓ∞`-sum.
    LinfTransfer,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct InputValue<S: Scalar> {
    pub id: usize,
    #[serde(serialize_with = "ser_scalar")]
    pub plus: S,
    #[serde(serialize_with = "ser_scalar")]
    pub minus: S,
    /// `max(plus, minus)`.
    #[serde(serialize_with = "ser_scalar")]
    pub value: S,
}

impl<S: Scalar> InputValue<S> {
    fn new(id: usize, plus: S, minus: S) -> Self {
        let value = S::max_of(plus.clone(), minus.clone());
        Self { id, plus, minus, value }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct WitnessReport<S: Scalar> {
    pub provenance: Provenance,
    pub params: BTreeMap<String, String>,
    pub h: CoordVector<S>,
    /// 1-based component path of `h` inside a sum space; empty for a single space.
    pub placement: Vec<usize>,
    #[serde(serialize_with = "ser_scalar")]
    pub h_norm: S,
    pub per_input: Vec<InputValue<S>>,
    #[serde(serialize_with = "ser_scalar")]
    pub bound: S,
    pub verdict: Verdict,
}

impl<S: Scalar> WitnessReport<S> {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        provenance: Provenance,
        params: BTreeMap<String, String>,
        h: CoordVector<S>,
        placement: Vec<usize>,
        h_norm: S,
        per_input: Vec<InputValue<S>>,
        bound: S,
        rel_tol: f64,
    ) -> Self {
        let ok = h_norm.approx_eq(&S::one(), rel_tol) && per_input.iter().all(|p| p.value.le_tol(&bound, rel_tol));
        Self { provenance, params, h, placement, h_norm, per_input, bound, verdict: Verdict::from_bool(ok) }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// Largest per-input value, `None` without inputs.
    pub fn worst(&self) -> Option<S> {
        self.per_input.iter().map(|p| p.value.clone()).reduce(S::max_of)
    }
}

fn check_unit<S: Scalar>(norm: &S, id: usize, rel_tol: f64) -> Result<()> {
    if norm.approx_eq(&S::one(), rel_tol) {
        Ok(())
    } else {
        Err(Error::input(format!("input {id} has norm {norm}, expected 1")))
    }
}

fn check_ball<S: Scalar>(norm: &S, id: usize, rel_tol: f64) -> Result<()> {
    if norm.le_tol(&S::one(), rel_tol) {
        Ok(())
    } else {
        Err(Error::input(format!("input {id} has norm {norm}, expected at most 1")))
    }
}

fn plus_minus<S: Scalar>(space: &PolyNormSpace, fs: &[CoordVector<S>], h: &CoordVector<S>) -> Result<Vec<InputValue<S>>> {
    fs.iter()
        .enumerate()
        .map(|(i, f)| Ok(InputValue::new(i, space.norm(&f.add(h))?, space.norm(&f.sub(h))?)))
        .collect()
}

fn fkn_params(space: &PolyNormSpace) -> Result<(usize, usize, usize)> {
    match space.params() {
        SpaceParams::Fkn { k, n, m } => Ok((k, n, m)),
        other => Err(Error::config(format!("expected an F_{{k,n}} space, got {other:?}"))),
    }
}

fn xn_params(space: &PolyNormSpace) -> Result<(usize, usize, usize)> {
    match space.params() {
        SpaceParams::Xn { k, big_n, m } => Ok((k, big_n, m)),
        other => Err(Error::config(format!("expected an X_N space, got {other:?}"))),
    }
}

/// `h = k e_l` for a unit `f` in `F_{k,n}` with `k² ≤ n` and `m = 2n`.
///
/// `l` minimizes `|f_l|` over the larger sign class of `f` (zeros count as
/// nonnegative, and the nonnegative class wins when both have `n` members).
pub fn coordinate_witness<S: Scalar>(space: &PolyNormSpace, f: &CoordVector<S>, rel_tol: f64) -> Result<WitnessReport<S>> {
    let (k, n, m) = fkn_params(space)?;
    if k * k > n {
        return Err(Error::config(format!("k^2 <= n violated (k = {k}, n = {n})")));
    }
    if m != 2 * n {
        return Err(Error::config(format!("m = 2n required (m = {m}, n = {n})")));
    }
    check_unit(&space.norm(f)?, 0, rel_tol)?;
    let nonneg: Vec<usize> = (1..=m).filter(|&j| !f.get(j).is_negative()).collect();
    let class: Vec<usize> = if nonneg.len() >= n {
        nonneg
    } else {
        (1..=m).filter(|&j| f.get(j).is_negative()).collect()
    };
    let l = argmin_abs(class.iter().copied(), |j| f.get(j).abs())
        .ok_or_else(|| Error::invariant("sign class is empty"))?;
    if !f.get(l).abs().le_tol(&S::one(), rel_tol) {
        return Err(Error::invariant(format!(
            "no coordinate of modulus <= 1 in the sign class (min |f_l| = {} at l = {l}); is f normalized?",
            f.get(l).abs()
        )));
    }
    let h = CoordVector::basis(m, l, S::from_usize(k))?;
    let h_norm = space.norm(&h)?;
    if !h_norm.approx_eq(&S::one(), rel_tol) {
        return Err(Error::invariant(format!("witness k e_l has norm {h_norm}")));
    }
    let per_input = plus_minus(space, std::slice::from_ref(f), &h)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("n".into(), n.to_string());
    params.insert("m".into(), m.to_string());
    params.insert("l".into(), l.to_string());
    let bound = S::one() + S::recip_usize(k);
    Ok(WitnessReport::finish(Provenance::Coordinate, params, h, vec![], h_norm, per_input, bound, rel_tol))
}

fn argmin_abs<S: Scalar>(indices: impl Iterator<Item = usize>, value: impl Fn(usize) -> S) -> Option<usize> {
    let mut best: Option<(S, usize)> = None;
    for j in indices {
        let v = value(j);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, j));
        }
    }
    best.map(|(_, j)| j)
}

/// `h = k e_l` serving several unit vectors of `F_{k,n}` (`k² ≤ n`) at once, with
/// `l` minimizing `max_i |f^i_l|`.
///
/// Each unit vector has at most `2(n − 1)` coordinates of modulus above 1, so
/// `m ≥ 2K(n − 1) + 1` always leaves a usable coordinate.
pub fn multi_coordinate_witness<S: Scalar>(
    space: &PolyNormSpace,
    fs: &[CoordVector<S>],
    rel_tol: f64,
) -> Result<WitnessReport<S>> {
    let (k, n, m) = fkn_params(space)?;
    if k * k > n {
        return Err(Error::config(format!("k^2 <= n violated (k = {k}, n = {n})")));
    }
    for (i, f) in fs.iter().enumerate() {
        check_unit(&space.norm(f)?, i, rel_tol)?;
    }
    let worst = |j: usize| fs.iter().map(|f| f.get(j).abs()).fold(S::zero(), S::max_of);
    let l = argmin_abs(1..=m, worst).ok_or_else(|| Error::invariant("empty truncation"))?;
    if !worst(l).le_tol(&S::one(), rel_tol) {
        let required = 2 * fs.len() * (n - 1) + 1;
        return Err(Error::TruncationTooSmall {
            required: BigUint::from(required),
            actual: m,
            detail: format!("every coordinate has |f^i_l| > 1 for some of the {} inputs", fs.len()),
        });
    }
    let h = CoordVector::basis(m, l, S::from_usize(k))?;
    let h_norm = space.norm(&h)?;
    let per_input = plus_minus(space, fs, &h)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("n".into(), n.to_string());
    params.insert("m".into(), m.to_string());
    params.insert("l".into(), l.to_string());
    params.insert("inputs".into(), fs.len().to_string());
    let bound = S::one() + S::recip_usize(k);
    Ok(WitnessReport::finish(Provenance::MultiCoordinate, params, h, vec![], h_norm, per_input, bound, rel_tol))
}

/// A dyadic block `E_n` with two of its indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockPair {
    pub block: u32,
    pub l: usize,
    pub m: usize,
}

/// Finds `n` and `l < m` in `E_n` with `|f^i_j| ≤ 1/k` on all of `E_n` and
/// `|f^i_l − f^i_m| < eps` for every input.
///
/// The search starts one block after the last block holding a coordinate above
/// `1/k` and only uses blocks lying entirely inside the truncation. Within a block
/// the coordinate tuples are bucketed into cells of side just under `eps`; the
/// lexicographically first colliding pair is returned.
pub fn find_block_pair<S: Scalar>(space: &PolyNormSpace, fs: &[CoordVector<S>], eps: &S, rel_tol: f64) -> Result<BlockPair> {
    let (k, _, m) = xn_params(space)?;
    if !eps.is_strictly_positive() {
        return Err(Error::input(format!("eps must be positive, got {eps}")));
    }
    for (i, f) in fs.iter().enumerate() {
        check_ball(&space.norm(f)?, i, rel_tol)?;
    }
    let inv_k = S::recip_usize(k);
    let large = |v: &S| !v.abs().le_tol(&inv_k, rel_tol);
    let n0 = fs
        .iter()
        .flat_map(|f| f.entries().iter().filter(|(_, v)| large(v)).filter_map(|(j, _)| block_of(*j)))
        .map(|n| n + 1)
        .max()
        .unwrap_or(1);

    let eps_f = eps.to_f64();
    let side = eps_f * (1.0 - 1e-12);
    let shift = 1.0 / k as f64;
    let mut n = n0;
    while n < usize::BITS - 1 && block_is_full(n, m) {
        if let Some(pair) = search_block(fs, n, side, shift, eps, &large) {
            return Ok(pair);
        }
        n += 1;
    }

    let cells = (2.0 / (k as f64 * side)).floor() as u64 + 1;
    let tuples = BigUint::from(cells).pow(fs.len() as u32);
    let n1 = (tuples.bits() as u32).max(n0);
    Err(Error::TruncationTooSmall {
        required: BigUint::from(1u8) << (n1 + 1),
        actual: m,
        detail: format!(
            "no dyadic block from E_{n0} on inside the truncation has a pair within eps = {eps} \
             ({cells} cells per coordinate, {} inputs)",
            fs.len()
        ),
    })
}

fn search_block<S: Scalar>(
    fs: &[CoordVector<S>],
    n: u32,
    side: f64,
    shift: f64,
    eps: &S,
    large: &impl Fn(&S) -> bool,
) -> Option<BlockPair> {
    let (lo, hi) = block_bounds(n);
    if fs.iter().any(|f| f.entries().iter().any(|(j, v)| *j >= lo && *j <= hi && large(v))) {
        return None;
    }
    let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for j in lo..=hi {
        let key = fs.iter().map(|f| ((f.get(j).to_f64() + shift) / side).floor() as i64).collect();
        groups.entry(key).or_default().push(j);
    }
    let mut candidates: Vec<(usize, usize)> = groups
        .values()
        .filter(|g| g.len() >= 2)
        .flat_map(|g| g.iter().enumerate().flat_map(move |(a, &l)| g[a + 1..].iter().map(move |&m| (l, m))))
        .collect();
    candidates.sort_unstable();
    candidates
        .into_iter()
        .find(|&(l, m)| fs.iter().all(|f| (f.get(l) - f.get(m)).abs() < *eps))
        .map(|(l, m)| BlockPair { block: n, l, m })
}

/// `h = e_l − e_m` for unit vectors of `X_N`, from the block pair at `eps = 1/N`.
pub fn pair_witness<S: Scalar>(space: &PolyNormSpace, fs: &[CoordVector<S>], rel_tol: f64) -> Result<WitnessReport<S>> {
    for (i, f) in fs.iter().enumerate() {
        check_unit(&space.norm(f)?, i, rel_tol)?;
    }
    pair_witness_in_ball(space, fs, rel_tol)
}

/// As [`pair_witness`] for inputs of norm at most 1; the bound is the same.
pub fn pair_witness_in_ball<S: Scalar>(space: &PolyNormSpace, fs: &[CoordVector<S>], rel_tol: f64) -> Result<WitnessReport<S>> {
    let (k, big_n, m) = xn_params(space)?;
    let eps = S::recip_usize(big_n);
    let pair = find_block_pair(space, fs, &eps, rel_tol)?;
    let h = CoordVector::from_entries(m, [(pair.l, S::one()), (pair.m, -S::one())])?;
    let h_norm = space.norm(&h)?;
    if !h_norm.approx_eq(&S::one(), rel_tol) {
        return Err(Error::invariant(format!("e_l - e_m has norm {h_norm}")));
    }
    let per_input = plus_minus(space, fs, &h)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("N".into(), big_n.to_string());
    params.insert("m".into(), m.to_string());
    params.insert("block".into(), pair.block.to_string());
    params.insert("l".into(), pair.l.to_string());
    params.insert("pair_m".into(), pair.m.to_string());
    let bound = S::one() + eps;
    Ok(WitnessReport::finish(Provenance::BlockPair, params, h, vec![], h_norm, per_input, bound, rel_tol))
}

/// Index of the component with the smallest `N` satisfying `N·eps > 1`.
pub fn select_component<S: Scalar>(space: &SumSpace, eps: &S) -> Result<usize> {
    if !eps.is_strictly_positive() {
        return Err(Error::input(format!("eps must be positive, got {eps}")));
    }
    let mut best: Option<(usize, usize)> = None;
    for (c, comp) in space.components.iter().enumerate() {
        let (_, big_n, _) = xn_params(comp)?;
        if S::from_usize(big_n) * eps.clone() > S::one() && best.is_none_or(|(b, _)| big_n < b) {
            best = Some((big_n, c));
        }
    }
    best.map(|(_, c)| c).ok_or_else(|| {
        let mut required = (S::one() / eps.clone()).floor_i64().max(0) + 1;
        if required % 2 == 1 {
            required += 1;
        }
        let have = space
            .components
            .iter()
            .filter_map(|c| xn_params(c).ok().map(|p| p.1))
            .max()
            .unwrap_or(0);
        Error::config(format!("eps = {eps} needs a component with even N >= {required} (largest N is {have})"))
    })
}

pub fn embed<S: Scalar>(space: &SumSpace, component: usize, h: &CoordVector<S>) -> SumVector<S> {
    let mut out = space.zero();
    out[component] = h.clone();
    out
}

/// Witness for unit vectors of a `c0`-sum of `X_N`: the block-pair witness of the
/// component `M` chosen by [`select_component`], embedded in the sum. The reported
/// bound is `1 + 1/M`, which lies strictly below `1 + eps`.
pub fn component_witness<S: Scalar>(space: &SumSpace, fs: &[SumVector<S>], eps: &S, rel_tol: f64) -> Result<WitnessReport<S>> {
    for (i, f) in fs.iter().enumerate() {
        check_unit(&space.norm(f)?, i, rel_tol)?;
    }
    component_witness_in_ball(space, fs, eps, rel_tol)
}

pub fn component_witness_in_ball<S: Scalar>(
    space: &SumSpace,
    fs: &[SumVector<S>],
    eps: &S,
    rel_tol: f64,
) -> Result<WitnessReport<S>> {
    if space.kind != SumKind::C0 {
        return Err(Error::config("component witness needs a c0 sum"));
    }
    let c = select_component(space, eps)?;
    let comp = &space.components[c];
    let (_, big_n, _) = xn_params(comp)?;
    let parts: Vec<CoordVector<S>> = fs.iter().map(|f| f[c].clone()).collect();
    let inner = pair_witness_in_ball(comp, &parts, rel_tol)?;
    let h_sum = embed(space, c, &inner.h);
    let h_norm = space.norm(&h_sum)?;
    let mut per_input = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        let plus = space.norm(&crate::space::sum_add(f, &h_sum))?;
        let minus = space.norm(&crate::space::sum_sub(f, &h_sum))?;
        // The sum norm must split as max(other components, component M ± h).
        let others = f
            .iter()
            .enumerate()
            .filter(|(d, _)| *d != c)
            .map(|(d, v)| space.components[d].norm(v))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(S::zero(), S::max_of);
        let split_plus = S::max_of(others.clone(), inner.per_input[i].plus.clone());
        let split_minus = S::max_of(others, inner.per_input[i].minus.clone());
        if !plus.approx_eq(&split_plus, rel_tol) || !minus.approx_eq(&split_minus, rel_tol) {
            return Err(Error::invariant(format!("sum norm does not split over components for input {i}")));
        }
        per_input.push(InputValue::new(i, plus, minus));
    }
    let mut params = inner.params.clone();
    params.insert("M".into(), big_n.to_string());
    params.insert("component".into(), (c + 1).to_string());
    params.insert("eps".into(), eps.to_report_string());
    params.insert("target".into(), (S::one() + eps.clone()).to_report_string());
    let bound = inner.bound.clone();
    let mut report =
        WitnessReport::finish(Provenance::C0Component, params, inner.h, vec![c + 1], h_norm, per_input, bound, rel_tol);
    if report.bound >= S::one() + eps.clone() {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

/// Right factor of an `ℓ∞`-sum `W ⊕∞ R` whose witness is transferred.
#[derive(Clone, Debug)]
pub enum RightFactor<S> {
    Single(PolyNormSpace),
    C0Sum { space: SumSpace, eps: S },
}

impl<S: Scalar> RightFactor<S> {
    fn norm(&self, x: &SumVector<S>) -> Result<S> {
        match self {
            RightFactor::Single(space) => match x.as_slice() {
                [v] => space.norm(v),
                _ => Err(Error::input("single right factor takes one component")),
            },
            RightFactor::C0Sum { space, .. } => space.norm(x),
        }
    }

    pub fn components(&self) -> Vec<PolyNormSpace> {
        match self {
            RightFactor::Single(space) => vec![space.clone()],
            RightFactor::C0Sum { space, .. } => space.components.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct TransferReport<S: Scalar> {
    #[serde(flatten)]
    pub report: WitnessReport<S>,
    /// Whether `‖(w, x ± h)‖ = max(‖w‖, ‖x ± h‖)` held exactly on every input.
    pub identity_holds: bool,
}

impl<S: Scalar> TransferReport<S> {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.identity_holds
    }
}

/// Places the right factor's witness for `(x_i)` into `W ⊕∞ R` and evaluates
/// `‖(w_i, x_i ± h)‖` on the whole sum.
pub fn linf_transfer_witness<S: Scalar>(
    left: &PolyNormSpace,
    right: &RightFactor<S>,
    ws: &[CoordVector<S>],
    xs: &[SumVector<S>],
    rel_tol: f64,
) -> Result<TransferReport<S>> {
    if ws.len() != xs.len() {
        return Err(Error::input(format!("{} left vectors but {} right vectors", ws.len(), xs.len())));
    }
    for (i, (w, x)) in ws.iter().zip(xs).enumerate() {
        let n = S::max_of(left.norm(w)?, right.norm(x)?);
        check_unit(&n, i, rel_tol)?;
    }
    let (inner, placement) = match right {
        RightFactor::Single(space) => {
            let parts: Vec<CoordVector<S>> = xs.iter().map(|x| x[0].clone()).collect();
            (pair_witness_in_ball(space, &parts, rel_tol)?, vec![2])
        }
        RightFactor::C0Sum { space, eps } => {
            let r = component_witness_in_ball(space, xs, eps, rel_tol)?;
            let mut p = vec![2];
            p.extend(&r.placement);
            (r, p)
        }
    };
    // Flattened sum: the left space followed by every right component.
    let mut components = vec![left.clone()];
    components.extend(right.components());
    let whole = SumSpace { kind: SumKind::Linf, components };
    let offset = placement.get(1).copied().unwrap_or(1);
    let mut h_whole = whole.zero();
    h_whole[offset] = inner.h.clone();
    let h_norm = whole.norm(&h_whole)?;
    let mut identity_holds = true;
    let mut per_input = Vec::with_capacity(xs.len());
    for (i, (w, x)) in ws.iter().zip(xs).enumerate() {
        let mut v: SumVector<S> = vec![w.clone()];
        v.extend(x.iter().cloned());
        let plus = whole.norm(&crate::space::sum_add(&v, &h_whole))?;
        let minus = whole.norm(&crate::space::sum_sub(&v, &h_whole))?;
        let wn = left.norm(w)?;
        identity_holds &= plus == S::max_of(wn.clone(), inner.per_input[i].plus.clone());
        identity_holds &= minus == S::max_of(wn, inner.per_input[i].minus.clone());
        per_input.push(InputValue::new(i, plus, minus));
    }
    let mut params = inner.params.clone();
    params.insert("right_provenance".into(), serde_json::to_value(inner.provenance)?.as_str().unwrap_or("").to_string());
    params.insert("left".into(), left.label().to_string());
    let report = WitnessReport::finish(
        Provenance::LinfTransfer,
        params,
        inner.h,
        placement,
        h_norm,
        per_input,
        inner.bound,
        rel_tol,
    );
    Ok(TransferReport { report, identity_holds })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct SequenceStep<S: Scalar> {
    pub n: usize,
    #[serde(serialize_with = "ser_scalar")]
    pub eps: S,
    /// `N` of the component carrying `h_n`.
    pub component_n: usize,
    pub placement: Vec<usize>,
    pub h: CoordVector<S>,
    /// `max_i |‖x_i ± h_n‖ − 1|` over the first `n` points.
    #[serde(serialize_with = "ser_f64")]
    pub deviation: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct SuperSequence<S: Scalar> {
    pub steps: Vec<SequenceStep<S>>,
}

impl<S: Scalar> SuperSequence<S> {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }

    pub fn h_vector(&self, space: &SumSpace, step: usize) -> SumVector<S> {
        let s = &self.steps[step];
        embed(space, s.placement[0] - 1, &s.h)
    }
}

/// `h_n` = component witness for the first `n` dense points at `eps_n`, checked
/// against `|‖x_i ± h_n‖ − 1| < eps_n` for every `i ≤ n`.
pub fn super_sequence<S: Scalar>(
    space: &SumSpace,
    dense: &[SumVector<S>],
    eps_seq: &[S],
    rel_tol: f64,
) -> Result<SuperSequence<S>> {
    if eps_seq.is_empty() {
        return Err(Error::input("eps sequence is empty"));
    }
    if eps_seq.len() > dense.len() {
        return Err(Error::input(format!("{} eps values but only {} dense points", eps_seq.len(), dense.len())));
    }
    if !eps_seq[0].is_strictly_positive() || eps_seq.windows(2).any(|w| !w[1].is_strictly_positive() || w[1] >= w[0]) {
        return Err(Error::input("eps sequence must be positive and strictly decreasing"));
    }
    let mut steps = Vec::with_capacity(eps_seq.len());
    for (idx, eps) in eps_seq.iter().enumerate() {
        let n = idx + 1;
        let w = component_witness(space, &dense[..n], eps, rel_tol)?;
        let h = embed(space, w.placement[0] - 1, &w.h);
        let mut deviation = 0.0f64;
        let mut holds = true;
        let one = S::one();
        for x in &dense[..n] {
            let plus = space.norm(&crate::space::sum_add(x, &h))?;
            let minus = space.norm(&crate::space::sum_sub(x, &h))?;
            // Triangle inequality: ‖x ± h‖ ≥ 2 − ‖x ∓ h‖.
            let two = S::from_usize(2);
            for (v, other) in [(&plus, &minus), (&minus, &plus)] {
                holds &= *v < one.clone() + eps.clone();
                holds &= *v > one.clone() - eps.clone();
                holds &= two.clone() - other.clone() > one.clone() - eps.clone();
                deviation = deviation.max((v.clone() - one.clone()).abs().to_f64());
            }
        }
        let component_n = match space.components[w.placement[0] - 1].params() {
            SpaceParams::Xn { big_n, .. } => big_n,
            _ => 0,
        };
        steps.push(SequenceStep { n, eps: eps.clone(), component_n, placement: w.placement, h: w.h, deviation, holds });
    }
    Ok(SuperSequence { steps })
}

#[derive(Clone, Debug, Serialize)]
pub struct TauReport {
    #[serde(serialize_with = "ser_f64")]
    pub tau: f64,
    /// Spread of `‖x + h_n‖` over the last three steps.
    #[serde(serialize_with = "ser_f64")]
    pub tail_variation: f64,
    #[serde(serialize_with = "ser_f64")]
    pub norm_x: f64,
    /// `max(‖x‖, 1)`.
    #[serde(serialize_with = "ser_f64")]
    pub target: f64,
    /// `min_i ‖x/‖x‖ − x_i‖` over the dense points, 0 for `x = 0`.
    #[serde(serialize_with = "ser_f64")]
    pub density_gap: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub passed: bool,
}

/// `τ(x) ≈ ‖x + h_last‖`, compared with `max(‖x‖, 1)` within
/// `2·eps_last + max(‖x‖, 1)·density_gap`.
pub fn type_tau<S: Scalar>(space: &SumSpace, x: &SumVector<S>, seq: &SuperSequence<S>, dense: &[SumVector<S>]) -> Result<TauReport> {
    if seq.steps.is_empty() {
        return Err(Error::input("empty witness sequence"));
    }
    let values = (0..seq.steps.len())
        .map(|s| space.norm(&crate::space::sum_add(x, &seq.h_vector(space, s))).map(|v| v.to_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let tau = *values.last().unwrap();
    let tail = &values[values.len().saturating_sub(3)..];
    let tail_variation = tail.iter().cloned().fold(f64::MIN, f64::max) - tail.iter().cloned().fold(f64::MAX, f64::min);
    let norm = space.norm(x)?;
    let density_gap = if norm.is_zero() {
        0.0
    } else {
        let unit = crate::space::sum_scale(x, &(S::one() / norm.clone()));
        dense
            .iter()
            .map(|d| space.norm(&crate::space::sum_sub(&unit, d)).map(|v| v.to_f64()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    };
    let norm_x = norm.to_f64();
    let target = norm_x.max(1.0);
    let eps_last = seq.steps.last().unwrap().eps.to_f64();
    let tolerance = 2.0 * eps_last + target * density_gap;
    let passed = (tau - target).abs() <= tolerance + 1e-12;
    Ok(TauReport { tau, tail_variation, norm_x, target, density_gap, tolerance, passed })
}
