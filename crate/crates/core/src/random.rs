//! Seeded random inputs for the verification suites.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{PolyNormSpace, SumSpace};
use crate::vector::{CoordVector, SumVector};

/// Generator for trial `i` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// Shape of random vectors: `nnz` entries with indices in `1..=support`, values in
/// `[-magnitude, magnitude]`, optionally one entry of size `spike`, and float-only
/// noise of size `noise` on the remaining coordinates up to `noise_support`.
#[derive(Clone, Debug)]
pub struct VectorShape {
    pub nnz: usize,
    pub support: usize,
    pub magnitude: i64,
    pub spike: Option<i64>,
    pub noise: f64,
    pub noise_support: usize,
}

impl VectorShape {
    /// Dense-ish vectors over the whole truncation.
    pub fn full(dim: usize) -> Self {
        Self { nnz: dim, support: dim, magnitude: 3, spike: None, noise: 0.0, noise_support: 0 }
    }

    pub fn sparse(nnz: usize, support: usize) -> Self {
        Self { nnz, support, magnitude: 3, spike: None, noise: 0.0, noise_support: 0 }
    }
}

pub fn random_vector<S: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize, shape: &VectorShape) -> Result<CoordVector<S>> {
    let support = shape.support.min(dim);
    if support == 0 {
        return Ok(CoordVector::zero(dim));
    }
    let nnz = shape.nnz.min(support);
    let idx = sample(rng, support, nnz).into_vec();
    let mut entries: Vec<(usize, S)> = idx.iter().map(|&i| (i + 1, S::random(rng, shape.magnitude))).collect();
    if let (Some(spike), false) = (shape.spike, entries.is_empty()) {
        let at = rng.random_range(0..entries.len());
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        entries[at].1 = S::from_ratio(sign * spike, 1);
    }
    if shape.noise > 0.0 && !S::EXACT {
        let taken: Vec<usize> = entries.iter().map(|e| e.0).collect();
        for j in 1..=shape.noise_support.min(dim) {
            if !taken.contains(&j) {
                let v = rng.random_range(-shape.noise..=shape.noise);
                entries.push((j, S::from_f64_lossy(v)));
            }
        }
    }
    CoordVector::from_entries(dim, entries)
}

/// A random vector rescaled to norm 1 (exactly, in rational mode).
pub fn random_unit<S: Scalar, R: Rng + ?Sized>(space: &PolyNormSpace, rng: &mut R, shape: &VectorShape) -> Result<CoordVector<S>> {
    for _ in 0..64 {
        let v = random_vector::<S, R>(rng, space.dim(), shape)?;
        let n = space.norm(&v)?;
        if !n.is_zero() {
            return Ok(v.scale(&(S::one() / n)));
        }
    }
    Err(Error::input("could not draw a nonzero vector with this shape"))
}

/// Random vector of a sum space; each component is nonzero with probability `density`.
/// The result has sum norm exactly 1.
pub fn random_unit_sum<S: Scalar, R: Rng + ?Sized>(
    space: &SumSpace,
    rng: &mut R,
    shapes: &[VectorShape],
    density: f64,
) -> Result<SumVector<S>> {
    if shapes.len() != space.components.len() {
        return Err(Error::input("one vector shape per component is required"));
    }
    for _ in 0..64 {
        let v = space
            .components
            .iter()
            .zip(shapes)
            .map(|(c, sh)| {
                if rng.random_bool(density.clamp(0.0, 1.0)) {
                    random_vector::<S, R>(rng, c.dim(), sh)
                } else {
                    Ok(CoordVector::zero(c.dim()))
                }
            })
            .collect::<Result<SumVector<S>>>()?;
        let n = space.norm(&v)?;
        if !n.is_zero() {
            return Ok(crate::space::sum_scale(&v, &(S::one() / n)));
        }
    }
    Err(Error::input("could not draw a nonzero sum vector with these shapes"))
}

/// `count` values decreasing geometrically from `1/2` to `last`.
pub fn eps_sequence(count: usize, last: f64) -> Result<Vec<f64>> {
    let valid = last > 0.0 && (last < 0.5 || count == 1 && last == 0.5);
    if count == 0 || !valid {
        return Err(Error::input(format!("need count >= 1 and 0 < last < 1/2 (got {count}, {last})")));
    }
    if count == 1 {
        return Ok(vec![last]);
    }
    let span = (0.5 / last).log2();
    Ok((0..count)
        .map(|i| if i + 1 == count { last } else { 0.5 * 2f64.powf(-span * i as f64 / (count - 1) as f64) })
        .collect())
}
