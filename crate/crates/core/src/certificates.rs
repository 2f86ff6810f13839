//! Refutation certificates for the failure of the single-vector property in `X_N`.
//!
//! For even `N ≥ k`, the vector `f = Σ_{j∈E} 2e_j` (one index in each of the blocks
//! `E_2, …, E_{N/2+1}`) is a unit vector with no good witness: every unit `h` has
//! `‖f ± h‖ > 1 + eps` for `eps < 1/(3N)`. [`refute_unit_h`] produces an explicit
//! functional of the norming set that demonstrates this for a given `h`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{block_bounds, Coeff, FamilyKind, Functional};
use crate::moduli::{lasq_modulus, ModulusConfig, ModulusEstimate};
use crate::oracle::{enumerate_oracle_with_cap, DEFAULT_CAP};
use crate::report::{ser_opt_scalar, ser_scalar};
use crate::scalar::Scalar;
use crate::space::{PolyNormSpace, SpaceParams};
use crate::vector::CoordVector;

/// Margin by which float-mode certificates must clear their threshold.
pub const FLOAT_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateCase {
    /// A pair functional in one of the blocks carrying `E`.
    BlockClaim,
    /// `h` is normed by an average.
    Case1Average,
    /// `h` is normed by a scaled coordinate; handled by the large-coordinate construction.
    Case2Coordinate,
    /// `h` is normed by a pair functional outside the blocks carrying `E`.
    Case3Pair,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct RefutationCertificate<S: Scalar> {
    pub case: CertificateCase,
    pub functional: Functional,
    /// `+1` certifies `‖f + h‖`, `−1` certifies `‖f − h‖`.
    pub sign: i8,
    /// `|(f + sign·h)(functional)|`.
    #[serde(serialize_with = "ser_scalar")]
    pub achieved: S,
    /// `1 + eps`.
    #[serde(serialize_with = "ser_scalar")]
    pub threshold: S,
    /// Lower bound the case analysis promises for `achieved`.
    #[serde(serialize_with = "ser_opt_scalar")]
    pub display_bound: Option<S>,
    pub meets_display_bound: bool,
    /// Set for the coordinate case, whose construction is derived rather than spelled out.
    pub derived_construction: bool,
}

fn xn_params(space: &PolyNormSpace) -> Result<(usize, usize, usize)> {
    match space.params() {
        SpaceParams::Xn { k, big_n, m } => Ok((k, big_n, m)),
        other => Err(Error::config(format!("expected an X_N space, got {other:?}"))),
    }
}

/// Indices of the counterexample: the smallest index of each block `E_2, …, E_{N/2+1}`.
pub fn counterexample_indices(big_n: usize) -> Vec<usize> {
    (2..=big_n / 2 + 1).map(|n| block_bounds(n as u32).0).collect()
}

/// `f = Σ_{j∈E} 2e_j` in `X_N`. Requires `N` even, `N ≥ k` and `m ≥ 2^{N/2+3}`.
pub fn build_counterexample<S: Scalar>(space: &PolyNormSpace) -> Result<CoordVector<S>> {
    let (k, big_n, m) = xn_params(space)?;
    if big_n % 2 != 0 {
        return Err(Error::config(format!("N must be even (N = {big_n})")));
    }
    if big_n < k {
        return Err(Error::config(format!("N >= k required (N = {big_n}, k = {k})")));
    }
    let exp = big_n / 2 + 3;
    if exp >= usize::BITS as usize - 1 || m < (1usize << exp) {
        return Err(Error::TruncationTooSmall {
            required: BigUint::from(1u8) << exp,
            actual: m,
            detail: format!("the counterexample for N = {big_n} needs blocks up to E_{}", big_n / 2 + 2),
        });
    }
    let f = CoordVector::from_entries(m, counterexample_indices(big_n).into_iter().map(|j| (j, S::from_usize(2))))?;
    let norm = space.norm(&f)?;
    if norm != S::one() && !norm.approx_eq(&S::one(), 1e-12) {
        return Err(Error::invariant(format!("counterexample has norm {norm}")));
    }
    Ok(f)
}

fn sign_of<S: Scalar>(v: &S) -> i8 {
    if v.is_negative() {
        -1
    } else {
        1
    }
}

/// An explicit functional with `|(f ± h)(x)| > 1 + eps`, for unit `h` and
/// `0 < eps < 1/(3N)`; `f` must be the counterexample of `space`.
pub fn refute_unit_h<S: Scalar>(
    space: &PolyNormSpace,
    f: &CoordVector<S>,
    h: &CoordVector<S>,
    eps: &S,
    rel_tol: f64,
) -> Result<RefutationCertificate<S>> {
    let (k, big_n, _) = xn_params(space)?;
    let expected = build_counterexample::<S>(space)?;
    if *f != expected {
        return Err(Error::input("f is not the counterexample vector of this space"));
    }
    if !eps.is_strictly_positive() || S::from_usize(3 * big_n) * eps.clone() >= S::one() {
        return Err(Error::input(format!("eps must lie in (0, 1/(3N)) = (0, 1/{}), got {eps}", 3 * big_n)));
    }
    let h_norm = space.norm(h)?;
    if !h_norm.approx_eq(&S::one(), rel_tol) {
        return Err(Error::input(format!("h has norm {h_norm}, expected 1")));
    }
    let e_set = counterexample_indices(big_n);
    let threshold = S::one() + eps.clone();
    let margin = if S::EXACT { S::zero() } else { S::from_f64_lossy(FLOAT_MARGIN) };
    let clears = |v: &S| *v > threshold.clone() + margin.clone();
    let two_eps = eps.clone() + eps.clone();

    // Block claim: some l ∈ E ∩ E_n and j ∈ E_n with |h_l| + |h_j| > 2 eps.
    for &l in &e_set {
        let (lo, hi) = block_bounds(crate::family::block_of(l).expect("E avoids index 1"));
        let mut best: Option<(S, usize)> = None;
        for j in (lo..=hi).filter(|&j| j != l) {
            let a = h.get(j).abs();
            if best.as_ref().is_none_or(|(b, _)| a > *b) {
                best = Some((a, j));
            }
        }
        let Some((hj_abs, j)) = best else { continue };
        if h.get(l).abs() + hj_abs.clone() > two_eps {
            let sigma = sign_of(&h.get(l));
            let s = sigma * sign_of(&h.get(j));
            let functional = Functional { family: FamilyKind::DyadicPair, coeff: Coeff::HALF, terms: vec![(l, 1), (j, s)] };
            let achieved = eval_signed(&functional, f, h, sigma);
            let display = S::one() + (h.get(l).abs() + hj_abs) * S::from_ratio(1, 2);
            if clears(&achieved) {
                return Ok(certificate(CertificateCase::BlockClaim, functional, sigma, achieved, threshold, Some(display), false, rel_tol));
            }
        }
    }

    let (_, y) = space.norming_functional(h)?;
    let q = k * big_n;
    let (case, large) = match y.family {
        FamilyKind::Average => {
            // A₁: the (kN − N/2) largest entries of σh outside E, padded past the support.
            let mut best: Option<(S, i8, Vec<usize>)> = None;
            for sigma in [1i8, -1] {
                let chosen = top_aligned(h, sigma, &e_set, q - big_n / 2);
                let mut terms: Vec<usize> = e_set.iter().copied().chain(chosen).collect();
                terms.sort_unstable();
                let x = average(big_n, &terms);
                let v = eval_signed(&x, f, h, sigma);
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, sigma, terms));
                }
            }
            let (achieved, sigma, terms) = best.expect("two signs tried");
            let display = S::from_usize(2) - two_eps.clone() - S::recip_usize(2 * k - 1);
            let functional = average(big_n, &terms);
            if clears(&achieved) {
                return Ok(certificate(CertificateCase::Case1Average, functional, sigma, achieved, threshold, Some(display), false, rel_tol));
            }
            return Err(no_certificate(&h_norm, &achieved, &threshold, "average"));
        }
        FamilyKind::Coordinate => (CertificateCase::Case2Coordinate, y.terms[0].0),
        FamilyKind::DyadicPair => {
            let (a, b) = (y.terms[0].0, y.terms[1].0);
            let l = if h.get(b).abs() > h.get(a).abs() { b } else { a };
            (CertificateCase::Case3Pair, l)
        }
    };

    // Large coordinate l: average over E ∪ {l} ∪ E₀ with E₀ the best remaining entries.
    let mut excluded = e_set.clone();
    excluded.push(large);
    let mut best: Option<(S, i8, Vec<usize>)> = None;
    for sigma in [1i8, -1] {
        let chosen = top_aligned(h, sigma, &excluded, q - big_n / 2 - 1);
        let mut terms: Vec<usize> = excluded.iter().copied().chain(chosen).collect();
        terms.sort_unstable();
        let x = average(big_n, &terms);
        let v = eval_signed(&x, f, h, sigma);
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, sigma, terms));
        }
    }
    let (achieved, sigma, terms) = best.expect("two signs tried");
    let display = S::one() + S::recip_usize(big_n) - two_eps;
    let functional = average(big_n, &terms);
    if clears(&achieved) {
        let derived = case == CertificateCase::Case2Coordinate;
        return Ok(certificate(case, functional, sigma, achieved, threshold, Some(display), derived, rel_tol));
    }
    Err(no_certificate(&h_norm, &achieved, &threshold, "large-coordinate average"))
}

#[allow(clippy::too_many_arguments)]
fn certificate<S: Scalar>(
    case: CertificateCase,
    functional: Functional,
    sign: i8,
    achieved: S,
    threshold: S,
    display_bound: Option<S>,
    derived_construction: bool,
    rel_tol: f64,
) -> RefutationCertificate<S> {
    let meets_display_bound = display_bound.as_ref().is_none_or(|d| d.le_tol(&achieved, rel_tol));
    RefutationCertificate { case, functional, sign, achieved, threshold, display_bound, meets_display_bound, derived_construction }
}

fn no_certificate<S: Scalar>(h_norm: &S, achieved: &S, threshold: &S, what: &str) -> Error {
    let gap = (h_norm.clone() - S::one()).abs();
    Error::NoCertificate(format!(
        "{what} functional reaches only {achieved} against threshold {threshold}; norming gap |‖h‖ − 1| = {gap}"
    ))
}

fn average(big_n: usize, terms: &[usize]) -> Functional {
    Functional { family: FamilyKind::Average, coeff: Coeff::recip(big_n), terms: terms.iter().map(|&j| (j, 1)).collect() }
}

/// `|(f + sigma·h)(x)|`.
fn eval_signed<S: Scalar>(x: &Functional, f: &CoordVector<S>, h: &CoordVector<S>, sigma: i8) -> S {
    let hv = x.eval(h);
    let v = if sigma < 0 { x.eval(f) - hv } else { x.eval(f) + hv };
    v.abs()
}

/// Up to `count` indices outside `excluded` with the largest positive `sigma·h_j`.
fn top_aligned<S: Scalar>(h: &CoordVector<S>, sigma: i8, excluded: &[usize], count: usize) -> Vec<usize> {
    let mut vals: Vec<(S, usize)> = h
        .entries()
        .iter()
        .filter(|(j, _)| !excluded.contains(j))
        .map(|(j, v)| (if sigma < 0 { -v.clone() } else { v.clone() }, *j))
        .filter(|(v, _)| v.is_strictly_positive())
        .collect();
    vals.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    vals.into_iter().take(count).map(|(_, j)| j).collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct CertificateCheck<S: Scalar> {
    pub member: bool,
    pub reevaluated: bool,
    /// `‖f + sign·h‖` from the enumeration oracle.
    #[serde(serialize_with = "ser_scalar")]
    pub oracle_norm: S,
    pub oracle_exceeds_threshold: bool,
    /// `max ‖f ± h‖` from the closed-form norm.
    #[serde(serialize_with = "ser_scalar")]
    pub closed_form_max: S,
    pub closed_form_exceeds_threshold: bool,
}

impl<S: Scalar> CertificateCheck<S> {
    pub fn passed(&self) -> bool {
        self.member && self.reevaluated && self.oracle_exceeds_threshold && self.closed_form_exceeds_threshold
    }
}

/// Independent re-verification: membership in the norming set, direct re-evaluation,
/// and the enumeration oracle on `f ± h`.
pub fn verify_certificate<S: Scalar>(
    space: &PolyNormSpace,
    f: &CoordVector<S>,
    h: &CoordVector<S>,
    cert: &RefutationCertificate<S>,
    rel_tol: f64,
) -> Result<CertificateCheck<S>> {
    let member = space.contains(&cert.functional);
    let g = if cert.sign < 0 { f.sub(h) } else { f.add(h) };
    let direct = cert.functional.eval(&g).abs();
    let reevaluated = direct.approx_eq(&cert.achieved, rel_tol);
    let oracle_norm = enumerate_oracle_with_cap(space, &g, DEFAULT_CAP)?;
    let oracle_exceeds_threshold = oracle_norm > cert.threshold;
    let closed_form_max = S::max_of(space.norm(&f.add(h))?, space.norm(&f.sub(h))?);
    let closed_form_exceeds_threshold = closed_form_max > cert.threshold;
    Ok(CertificateCheck {
        member,
        reevaluated,
        oracle_norm,
        oracle_exceeds_threshold,
        closed_form_max,
        closed_form_exceeds_threshold,
    })
}

/// Outcome of [`refute_lasq_sweep`].
#[derive(Clone, Debug, Serialize)]
pub struct LasqSweepReport {
    pub f: CoordVector<f64>,
    pub control: bool,
    /// `1 + 1/(3N)`.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub threshold: f64,
    /// `1/(4N)`, the eps used for the certificates.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub eps: f64,
    pub modulus: ModulusEstimate,
    pub best_meets_threshold: bool,
    pub candidates: usize,
    pub certified: usize,
    /// Start indices whose final `h` got no certificate, with the reason.
    pub failures: Vec<(usize, String)>,
}

impl LasqSweepReport {
    pub fn passed(&self) -> bool {
        if self.control {
            self.modulus.value_upper <= 1.5 + 1e-9
        } else {
            self.best_meets_threshold && self.failures.is_empty()
        }
    }
}

/// Multi-start search for a good witness at the counterexample, together with a
/// certificate for every visited candidate.
///
/// With `control`, `f = e_4 − e_5` (a point that does have good witnesses) and no
/// refutation is attempted.
pub fn refute_lasq_sweep(space: &PolyNormSpace, cfg: &ModulusConfig, control: bool) -> Result<LasqSweepReport> {
    let (_, big_n, m) = xn_params(space)?;
    let f: CoordVector<f64> = if control {
        CoordVector::from_entries(m, [(4, 1.0), (5, -1.0)])?
    } else {
        build_counterexample(space)?
    };
    let threshold = 1.0 + 1.0 / (3 * big_n) as f64;
    let eps = 1.0 / (4 * big_n) as f64;
    let modulus = lasq_modulus(space, &f.to_dense(), cfg)?;
    let best_meets_threshold = modulus.value_upper >= threshold - cfg.rel_tol;
    let mut certified = 0;
    let mut failures = Vec::new();
    if !control {
        let outcomes: Vec<Result<RefutationCertificate<f64>>> = modulus
            .candidates
            .par_iter()
            .map(|h| refute_unit_h(space, &f, &CoordVector::from_dense(h), &eps, cfg.rel_tol))
            .collect();
        for (i, o) in outcomes.into_iter().enumerate() {
            match o {
                Ok(_) => certified += 1,
                Err(e) => failures.push((i, e.to_string())),
            }
        }
    }
    let candidates = modulus.candidates.len();
    Ok(LasqSweepReport { f, control, threshold, eps, modulus, best_meets_threshold, candidates, certified, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_xn;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn counterexample_vectors() {
        let x2 = make_xn(2, 2, 16).unwrap();
        assert_eq!(build_counterexample::<Rational>(&x2).unwrap(), CoordVector::basis(16, 4, r(2, 1)).unwrap());
        let x4 = make_xn(2, 4, 64).unwrap();
        let f = build_counterexample::<Rational>(&x4).unwrap();
        assert_eq!(f.support().collect::<Vec<_>>(), vec![4, 8]);
        assert_eq!(x4.norm(&f).unwrap(), r(1, 1));
        let small = make_xn(2, 2, 8).unwrap();
        assert!(matches!(build_counterexample::<Rational>(&small), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn block_claim_on_aligned_h() {
        let space = make_xn(2, 2, 16).unwrap();
        let f = build_counterexample::<Rational>(&space).unwrap();
        let h = CoordVector::basis(16, 4, r(2, 1)).unwrap();
        let cert = refute_unit_h(&space, &f, &h, &r(1, 8), 0.0).unwrap();
        assert_eq!(cert.case, CertificateCase::BlockClaim);
        assert!(cert.achieved >= r(2, 1));
        assert!(verify_certificate(&space, &f, &h, &cert, 0.0).unwrap().passed());
    }

    #[test]
    fn witness_pair_is_refuted_by_an_average() {
        let space = make_xn(2, 2, 16).unwrap();
        let f = build_counterexample::<Rational>(&space).unwrap();
        let h = CoordVector::from_entries(16, [(8, r(1, 1)), (9, r(-1, 1))]).unwrap();
        let cert = refute_unit_h(&space, &f, &h, &r(1, 8), 0.0).unwrap();
        assert_eq!(cert.achieved, r(3, 2));
        assert!(cert.functional.indices().any(|j| j == 4));
        assert!(verify_certificate(&space, &f, &h, &cert, 0.0).unwrap().passed());
    }

    #[test]
    fn rejects_eps_outside_range() {
        let space = make_xn(2, 2, 16).unwrap();
        let f = build_counterexample::<Rational>(&space).unwrap();
        let h = CoordVector::basis(16, 4, r(2, 1)).unwrap();
        assert!(refute_unit_h(&space, &f, &h, &r(1, 6), 0.0).is_err());
    }

    #[test]
    fn sweep_and_control() {
        let space = make_xn(2, 2, 16).unwrap();
        let cfg = ModulusConfig::new(8, 30, 1);
        let rep = refute_lasq_sweep(&space, &cfg, false).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.certified, 8);
        let control = refute_lasq_sweep(&space, &cfg, true).unwrap();
        assert!(control.passed() && control.certified == 0);
    }
}
