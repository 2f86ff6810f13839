//! Numeric modes.
//!
//! Every norm, witness and certificate routine is generic over [`Scalar`], which is
//! implemented for `f64` (searches, large sweeps) and for [`Rational`] (exact
//! certification on small instances). Comparisons go through [`Scalar::le_tol`] so
//! that the same code is exact in rational mode and tolerance-aware in float mode.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default relative tolerance for float-mode comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static {
    /// `true` for exact arithmetic.
    const EXACT: bool;
    const MODE: &'static str;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_f64_lossy(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// `floor(self)` as an integer; saturates outside the `i64` range.
    fn floor_i64(&self) -> i64;

    /// Accepts decimals (`-1.25`, `3e-2` in float mode) and fractions (`p/q`).
    fn parse_value(s: &str) -> Result<Self>;

    /// Float mode: 17 significant digits. Rational mode: exact `p/q`.
    fn to_report_string(&self) -> String;

    /// `self <= other`, exactly or up to a relative tolerance.
    fn le_tol(&self, other: &Self, rel_tol: f64) -> bool;

    /// Draws a random value in `[-magnitude, magnitude]`.
    fn random<R: Rng + ?Sized>(rng: &mut R, magnitude: i64) -> Self;

    /// Rewrites `values` over a common denominator `d` with `i128` numerators whose
    /// absolute sum also fits in `i128`. Returns `None` when that is impossible.
    fn common_denominator(values: &[Self]) -> Option<(Vec<i128>, Self)>;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn recip_usize(n: usize) -> Self {
        Self::from_ratio(1, n as i64)
    }

    /// `self > 0`, false for NaN. `Signed::is_positive` is true for `+0.0` and NaN on floats.
    fn is_strictly_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.le_tol(other, rel_tol) && other.le_tol(self, rel_tol)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }

    fn parse_value(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q == 0.0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(p / q);
        }
        let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite value {s:?}")));
        }
        Ok(v)
    }

    fn to_report_string(&self) -> String {
        format!("{:.16e}", self)
    }

    fn le_tol(&self, other: &Self, rel_tol: f64) -> bool {
        *self <= *other + rel_tol * other.abs().max(1.0)
    }

    fn random<R: Rng + ?Sized>(rng: &mut R, magnitude: i64) -> Self {
        let m = magnitude as f64;
        rng.random_range(-m..=m)
    }

    fn common_denominator(_values: &[Self]) -> Option<(Vec<i128>, Self)> {
        None
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64_lossy(x: f64) -> Self {
        Rational::from_f64(x).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_i64(&self) -> i64 {
        let fl = self.floor().to_integer();
        fl.to_i64().unwrap_or(if fl.is_negative() { i64::MIN } else { i64::MAX })
    }

    fn parse_value(s: &str) -> Result<Self> {
        parse_exact(s.trim())
    }

    fn to_report_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn le_tol(&self, other: &Self, _rel_tol: f64) -> bool {
        self <= other
    }

    fn random<R: Rng + ?Sized>(rng: &mut R, magnitude: i64) -> Self {
        let den = rng.random_range(1..=12i64);
        let num = rng.random_range(-magnitude * den..=magnitude * den);
        Self::from_ratio(num, den)
    }

    fn common_denominator(values: &[Self]) -> Option<(Vec<i128>, Self)> {
        let mut lcm = BigInt::one();
        for v in values {
            lcm = lcm.lcm(v.denom());
        }
        let mut out = Vec::with_capacity(values.len());
        let mut total: i128 = 0;
        for v in values {
            let scaled = v.numer() * (&lcm / v.denom());
            let n = scaled.to_i128()?;
            total = total.checked_add(n.checked_abs()?)?;
            out.push(n);
        }
        Some((out, Rational::from_integer(lcm)))
    }
}

fn parse_exact(s: &str) -> Result<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(Error::Parse(format!("bad exact number {s:?} (use a decimal or p/q)")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}
