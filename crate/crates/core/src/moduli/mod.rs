//! Numerical moduli: how close a point is to admitting a good witness, and the
//! ellipsoid lower bound available in every finite-dimensional space.

mod ellipsoid;
mod polytope;

pub use ellipsoid::{
    contact_point, john_sandwich_check, mvee, john_bound_certificate, Ellipsoid, MveeResult, JohnBoundConfig, JohnBoundReport,
    SandwichReport, MVEE_ITERATION_CAP, MVEE_TOL,
};
pub use polytope::{random_symmetric_polytope, PolytopeNorm};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{ser_f64, ser_f64s, ser_opt_f64};
use crate::space::{PolyNormSpace, SumSpace};
use crate::vector::CoordVector;

/// A norm on `ℝ^d` evaluated on dense coordinates.
pub trait DenseNorm: Sync {
    fn dim(&self) -> usize;
    fn norm(&self, x: &[f64]) -> f64;
    /// Constants `(c, C)` with `c‖x‖∞ ≤ ‖x‖ ≤ C‖x‖∞`.
    fn linf_equivalence(&self) -> (f64, f64);
}

impl DenseNorm for PolyNormSpace {
    fn dim(&self) -> usize {
        PolyNormSpace::dim(self)
    }

    fn norm(&self, x: &[f64]) -> f64 {
        PolyNormSpace::norm(self, &CoordVector::from_dense(x)).expect("dense vector matches the truncation")
    }

    fn linf_equivalence(&self) -> (f64, f64) {
        PolyNormSpace::linf_equivalence(self)
    }
}

/// Components laid out one after another.
impl DenseNorm for SumSpace {
    fn dim(&self) -> usize {
        self.components.iter().map(PolyNormSpace::dim).sum()
    }

    fn norm(&self, x: &[f64]) -> f64 {
        let mut offset = 0;
        let mut best = 0.0f64;
        for c in &self.components {
            let d = c.dim();
            best = best.max(DenseNorm::norm(c, &x[offset..offset + d]));
            offset += d;
        }
        best
    }

    fn linf_equivalence(&self) -> (f64, f64) {
        self.components.iter().map(PolyNormSpace::linf_equivalence).fold((f64::INFINITY, 0.0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }
}

#[derive(Clone, Debug)]
pub struct ModulusConfig {
    pub starts: usize,
    /// Pattern-search sweeps per start.
    pub iters: usize,
    pub seed: u64,
    /// Grid spacing on the cube surface for a certified lower bound (dimension ≤ 3).
    pub grid_res: Option<f64>,
    /// Starting points tried before the random ones.
    pub extra_starts: Vec<Vec<f64>>,
    pub rel_tol: f64,
}

impl ModulusConfig {
    pub fn new(starts: usize, iters: usize, seed: u64) -> Self {
        Self { starts, iters, seed, grid_res: None, extra_starts: Vec::new(), rel_tol: crate::scalar::DEFAULT_REL_TOL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusEstimate {
    /// Best `max_i max ‖x_i ± h‖` found; an upper bound on the infimum.
    #[serde(serialize_with = "ser_f64")]
    pub value_upper: f64,
    /// Certified lower bound from the grid sweep, when one ran.
    #[serde(serialize_with = "ser_opt_f64")]
    pub value_lower: Option<f64>,
    #[serde(serialize_with = "ser_f64s")]
    pub argmin_h: Vec<f64>,
    pub starts: usize,
    pub evaluations: u64,
    /// Iterates where the objective fell below `max(‖x_i‖, ‖h‖)`; always 0 for a norm.
    pub triangle_violations: u64,
    #[serde(serialize_with = "ser_f64s")]
    pub start_values: Vec<f64>,
    /// Final unit `h` of every start, in start order.
    #[serde(skip)]
    pub candidates: Vec<Vec<f64>>,
}

struct Objective<'a, N: DenseNorm + ?Sized> {
    norm: &'a N,
    xs: &'a [Vec<f64>],
    floor: f64,
    rel_tol: f64,
}

impl<N: DenseNorm + ?Sized> Objective<'_, N> {
    /// Returns `(value, unit h)`; `None` for `g = 0`.
    fn eval(&self, g: &[f64], stats: &mut (u64, u64)) -> Option<(f64, Vec<f64>)> {
        let n = self.norm.norm(g);
        if n <= 0.0 || !n.is_finite() {
            return None;
        }
        let h: Vec<f64> = g.iter().map(|v| v / n).collect();
        let mut value = 0.0f64;
        let mut buf = vec![0.0; g.len()];
        for x in self.xs {
            for sign in [1.0, -1.0] {
                for (b, (xi, hi)) in buf.iter_mut().zip(x.iter().zip(&h)) {
                    *b = xi + sign * hi;
                }
                value = value.max(self.norm.norm(&buf));
            }
        }
        stats.0 += 1;
        if value < self.floor * (1.0 - self.rel_tol) {
            stats.1 += 1;
        }
        Some((value, h))
    }
}

/// `inf_h max ‖x ± h‖` over unit `h`, estimated from above by local search and,
/// in dimension ≤ 3 with `grid_res`, bounded from below by a grid sweep.
pub fn lasq_modulus<N: DenseNorm + ?Sized>(norm: &N, x: &[f64], cfg: &ModulusConfig) -> Result<ModulusEstimate> {
    asq_modulus(norm, std::slice::from_ref(&x.to_vec()), cfg)
}

/// As [`lasq_modulus`] with the objective `max_i max ‖x_i ± h‖`.
pub fn asq_modulus<N: DenseNorm + ?Sized>(norm: &N, xs: &[Vec<f64>], cfg: &ModulusConfig) -> Result<ModulusEstimate> {
    let d = norm.dim();
    if xs.is_empty() {
        return Err(Error::input("no points given"));
    }
    for (i, x) in xs.iter().enumerate() {
        if x.len() != d {
            return Err(Error::input(format!("point {i} has dimension {}, expected {d}", x.len())));
        }
        let n = norm.norm(x);
        if (n - 1.0).abs() > cfg.rel_tol.max(1e-12) {
            return Err(Error::input(format!("point {i} has norm {n}, expected 1")));
        }
    }
    for g in &cfg.extra_starts {
        if g.len() != d {
            return Err(Error::input(format!("extra start has dimension {}, expected {d}", g.len())));
        }
    }
    let total = cfg.extra_starts.len() + cfg.starts;
    if total == 0 {
        return Err(Error::input("at least one start is required"));
    }
    let objective = Objective { norm, xs, floor: 1.0f64.max(xs.iter().map(|x| norm.norm(x)).fold(0.0, f64::max)), rel_tol: cfg.rel_tol };
    let runs: Vec<(f64, Vec<f64>, (u64, u64))> = (0..total)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            let g0: Vec<f64> = match cfg.extra_starts.get(i) {
                Some(g) => g.clone(),
                None => (0..d).map(|_| StandardNormal.sample(&mut rng)).collect(),
            };
            local_search(&objective, g0, cfg.iters, &mut rng)
        })
        .collect();

    let mut est = ModulusEstimate {
        value_upper: f64::INFINITY,
        value_lower: None,
        argmin_h: vec![0.0; d],
        starts: total,
        evaluations: 0,
        triangle_violations: 0,
        start_values: Vec::with_capacity(total),
        candidates: Vec::with_capacity(total),
    };
    for (value, h, stats) in runs {
        est.evaluations += stats.0;
        est.triangle_violations += stats.1;
        if value < est.value_upper {
            est.value_upper = value;
            est.argmin_h = h.clone();
        }
        est.start_values.push(value);
        est.candidates.push(h);
    }

    if let Some(res) = cfg.grid_res {
        if d <= 3 {
            let mut stats = (0, 0);
            let (grid_min, grid_h) = grid_sweep(&objective, d, res, &mut stats)?;
            est.evaluations += stats.0;
            est.triangle_violations += stats.1;
            let (c, big_c) = norm.linf_equivalence();
            let mesh = big_c * res / c;
            est.value_lower = Some(grid_min - mesh);
            if grid_min < est.value_upper {
                est.value_upper = grid_min;
                est.argmin_h = grid_h;
            }
        }
    }
    Ok(est)
}

fn local_search<N: DenseNorm + ?Sized>(
    obj: &Objective<'_, N>,
    g0: Vec<f64>,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<f64>, (u64, u64)) {
    let d = g0.len();
    let mut stats = (0u64, 0u64);
    let (mut best, mut h) = obj.eval(&g0, &mut stats).unwrap_or_else(|| {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        obj.eval(&e, &mut stats).expect("basis vector is nonzero")
    });
    let scale = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut step = 0.5 * scale;
    for _ in 0..iters {
        let mut improved = false;
        for j in 0..d {
            for sign in [1.0, -1.0] {
                let mut g = h.clone();
                g[j] += sign * step;
                if let Some((v, hn)) = obj.eval(&g, &mut stats) {
                    if v < best {
                        best = v;
                        h = hn;
                        improved = true;
                    }
                }
            }
        }
        let u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let un = u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        let g: Vec<f64> = h.iter().zip(&u).map(|(a, b)| a + step * b / un).collect();
        if let Some((v, hn)) = obj.eval(&g, &mut stats) {
            if v < best {
                best = v;
                h = hn;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 * scale.max(1e-300) {
                break;
            }
        }
    }
    (best, h, stats)
}

/// Minimum of the objective over normalized points of a grid on the cube surface.
fn grid_sweep<N: DenseNorm + ?Sized>(obj: &Objective<'_, N>, d: usize, res: f64, stats: &mut (u64, u64)) -> Result<(f64, Vec<f64>)> {
    if !(res > 0.0 && res <= 1.0) {
        return Err(Error::input(format!("grid spacing must lie in (0, 1], got {res}")));
    }
    let steps = (2.0 / res).ceil() as usize;
    let axis: Vec<f64> = (0..=steps).map(|i| (-1.0 + i as f64 * 2.0 / steps as f64).min(1.0)).collect();
    let mut best = (f64::INFINITY, vec![0.0; d]);
    let mut g = vec![0.0; d];
    for face in 0..d {
        for fixed in [1.0, -1.0] {
            let free: Vec<usize> = (0..d).filter(|&i| i != face).collect();
            let count = axis.len().pow(free.len() as u32);
            for mut code in 0..count {
                g[face] = fixed;
                for &i in &free {
                    g[i] = axis[code % axis.len()];
                    code /= axis.len();
                }
                if let Some((v, h)) = obj.eval(&g, stats) {
                    if v < best.0 {
                        best = (v, h);
                    }
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Coeff, FunctionalFamily};
    use nalgebra::DMatrix;

    fn linf2() -> PolyNormSpace {
        PolyNormSpace::new("linf2", 2, vec![FunctionalFamily::Coordinate { scale: Coeff::recip(1) }]).unwrap()
    }

    #[test]
    fn linf_corner_modulus_is_two() {
        let mut cfg = ModulusConfig::new(8, 60, 3);
        cfg.grid_res = Some(1e-3);
        let est = lasq_modulus(&linf2(), &[1.0, 1.0], &cfg).unwrap();
        assert!((est.value_upper - 2.0).abs() < 1e-9, "{}", est.value_upper);
        assert!(est.value_lower.unwrap() <= est.value_upper);
        assert!(est.value_lower.unwrap() > 1.99);
        assert_eq!(est.triangle_violations, 0);
    }

    #[test]
    fn euclidean_modulus_is_sqrt_two() {
        let e = Ellipsoid::new(DMatrix::identity(2, 2)).unwrap();
        let mut cfg = ModulusConfig::new(4, 80, 1);
        cfg.grid_res = Some(1e-3);
        let est = lasq_modulus(&e, &[0.6, 0.8], &cfg).unwrap();
        assert!((est.value_upper - 2f64.sqrt()).abs() < 1e-6, "{}", est.value_upper);
        assert!(est.value_lower.unwrap() <= 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn rejects_non_unit_point() {
        assert!(matches!(lasq_modulus(&linf2(), &[2.0, 0.0], &ModulusConfig::new(1, 1, 0)), Err(Error::Input(_))));
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = ModulusConfig::new(6, 30, 42);
        let a = lasq_modulus(&linf2(), &[1.0, 0.5], &cfg).unwrap();
        let b = lasq_modulus(&linf2(), &[1.0, 0.5], &cfg).unwrap();
        assert_eq!(a.start_values, b.start_values);
        assert_eq!(a.argmin_h, b.argmin_h);
    }
}
