use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::polytope::symmetrize;
use super::{DenseNorm, PolytopeNorm};
use crate::error::{Error, Result};
use crate::report::{ser_f64, ser_f64s};

pub const MVEE_TOL: f64 = 1e-7;
pub const MVEE_ITERATION_CAP: usize = 100_000;

/// `J = {x : xᵀQx ≤ 1}` for symmetric positive-definite `Q`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    q: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() || q.nrows() == 0 {
            return Err(Error::input("Q must be a nonempty square matrix"));
        }
        let scale = q.amax().max(1.0);
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::input("Q must be symmetric"));
        }
        if q.clone().cholesky().is_none() {
            return Err(Error::input("Q must be positive definite"));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// `t·J`.
    pub fn scaled(&self, t: f64) -> Self {
        Self { q: &self.q / (t * t) }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.q.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

impl DenseNorm for Ellipsoid {
    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn norm(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (v.dot(&(&self.q * &v))).max(0.0).sqrt()
    }

    fn linf_equivalence(&self) -> (f64, f64) {
        let e = self.eigenvalues();
        let d = self.q.nrows() as f64;
        (e[0].sqrt(), (e[e.len() - 1] * d).sqrt())
    }
}

#[derive(Clone, Debug)]
pub struct MveeResult {
    pub ellipsoid: Ellipsoid,
    pub iterations: usize,
    /// `max_i p_iᵀ X⁻¹ p_i / d − 1` at termination.
    pub gap: f64,
    pub converged: bool,
}

/// Minimum-volume origin-centred ellipsoid containing the symmetrized points.
///
/// Frank–Wolfe ascent with away steps on the barycentric weights, started from
/// uniform weights. `Q` is finally rescaled so that the outermost point lies on `∂J`.
pub fn mvee(points: &[Vec<f64>], tol: f64) -> Result<MveeResult> {
    let d = points.first().map(Vec::len).ok_or_else(|| Error::input("no points"))?;
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::input("points must share a positive dimension"));
    }
    let pts: Vec<DVector<f64>> = symmetrize(points).into_iter().map(DVector::from_vec).collect();
    let n = pts.len();
    let mat = DMatrix::from_fn(d, n, |r, c| pts[c][r]);
    let sv = mat.singular_values();
    let top = sv.amax();
    let rank = sv.iter().filter(|s| **s > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    if rank < d {
        return Err(Error::Rank { rank, dim: d });
    }

    let df = d as f64;
    let mut u = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut gap;
    let mut x_inv;
    loop {
        let mut x = DMatrix::<f64>::zeros(d, d);
        for (p, w) in pts.iter().zip(&u) {
            x += p * p.transpose() * *w;
        }
        x_inv = x.try_inverse().ok_or(Error::Rank { rank: d - 1, dim: d })?;
        let m: Vec<f64> = pts.iter().map(|p| p.dot(&(&x_inv * p))).collect();
        let (j, mj) = m.iter().copied().enumerate().fold((0, f64::MIN), |a, (i, v)| if v > a.1 { (i, v) } else { a });
        let (k, mk) = m
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .fold((0, f64::MAX), |a, (i, v)| if v < a.1 { (i, v) } else { a });
        gap = mj / df - 1.0;
        if gap <= tol || iterations >= MVEE_ITERATION_CAP {
            break;
        }
        iterations += 1;
        if gap >= 1.0 - mk / df {
            let beta = (mj - df) / (df * (mj - 1.0));
            u.iter_mut().for_each(|w| *w *= 1.0 - beta);
            u[j] += beta;
        } else {
            let mut beta = (mk - df) / (df * (mk - 1.0));
            if u[k] < 1.0 {
                beta = beta.max(-u[k] / (1.0 - u[k]));
            }
            u.iter_mut().for_each(|w| *w *= 1.0 - beta);
            u[k] = (u[k] + beta).max(0.0);
        }
    }
    let mut q = x_inv / df;
    let outer = pts.iter().map(|p| p.dot(&(&q * p))).fold(0.0, f64::max);
    q /= outer;
    q = (&q + q.transpose()) * 0.5;
    Ok(MveeResult { ellipsoid: Ellipsoid::new(q)?, iterations, gap, converged: gap <= tol })
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub outer_ok: bool,
    pub inner_ok: bool,
    /// `max ‖v‖_J` over the vertices.
    #[serde(serialize_with = "ser_f64")]
    pub max_vertex_j: f64,
    /// `max ‖y/√n‖` over sampled `y ∈ ∂J`.
    #[serde(serialize_with = "ser_f64")]
    pub max_inner_norm: f64,
    #[serde(serialize_with = "ser_f64s")]
    pub violation: Vec<f64>,
    pub samples: usize,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.outer_ok && self.inner_ok
    }
}

/// Checks `n^{-1/2} J ⊂ B_X ⊂ J` for the polytope with the given vertices.
pub fn john_sandwich_check(vertices: &[Vec<f64>], e: &Ellipsoid, samples: usize, seed: u64, tol: f64) -> Result<SandwichReport> {
    let ball = PolytopeNorm::from_vertices(vertices)?;
    let d = ball.dim();
    if e.dim() != d {
        return Err(Error::input(format!("ellipsoid dimension {} differs from {d}", e.dim())));
    }
    let mut violation = Vec::new();
    let mut max_vertex_j = 0.0f64;
    for v in ball.vertices() {
        let j = e.norm(v);
        if j > max_vertex_j {
            max_vertex_j = j;
            if j > 1.0 + tol && violation.is_empty() {
                violation = v.clone();
            }
        }
    }
    let outer_ok = max_vertex_j <= 1.0 + tol;
    let scale = 1.0 / (d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_inner = 0.0f64;
    let mut inner_violation = Vec::new();
    for s in 0..samples {
        let dir: Vec<f64> = if d == 2 {
            let t = std::f64::consts::TAU * s as f64 / samples as f64;
            vec![t.cos(), t.sin()]
        } else {
            (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let jn = e.norm(&dir);
        let y: Vec<f64> = dir.iter().map(|v| v / jn * scale).collect();
        let b = ball.norm(&y);
        if b > max_inner {
            max_inner = b;
            if b > 1.0 + tol && inner_violation.is_empty() {
                inner_violation = y;
            }
        }
    }
    let inner_ok = max_inner <= 1.0 + tol;
    if violation.is_empty() {
        violation = inner_violation;
    }
    Ok(SandwichReport { outer_ok, inner_ok, max_vertex_j, max_inner_norm: max_inner, violation, samples })
}

/// Vertex maximizing `‖v‖_J`; first in symmetrized input order among ties.
pub fn contact_point(vertices: &[Vec<f64>], e: &Ellipsoid, tol: f64) -> Result<(Vec<f64>, f64)> {
    let sym = symmetrize(vertices);
    let values: Vec<f64> = sym.iter().map(|v| e.norm(v)).collect();
    let top = values.iter().copied().fold(f64::MIN, f64::max);
    if top < 1.0 - tol {
        return Err(Error::invariant(format!(
            "largest vertex value ‖v‖_J = {top} < 1 - {tol}: the ellipsoid is not minimal (MVEE did not converge)"
        )));
    }
    let idx = values.iter().position(|v| *v >= top - 1e-12).expect("nonempty");
    Ok((sym[idx].clone(), values[idx]))
}

#[derive(Clone, Debug)]
pub struct JohnBoundConfig {
    pub samples: usize,
    pub seed: u64,
    /// Grid spacing on the cube surface, used in dimension ≤ 3.
    pub grid_res: Option<f64>,
    /// Slack allowed below `(1 + 1/n)^{1/2}`.
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct JohnBoundReport {
    pub dim: usize,
    #[serde(serialize_with = "ser_f64")]
    pub bound: f64,
    #[serde(serialize_with = "ser_f64s")]
    pub contact: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub contact_j: f64,
    #[serde(serialize_with = "ser_f64")]
    pub worst_value: f64,
    #[serde(serialize_with = "ser_f64s")]
    pub worst_h: Vec<f64>,
    pub samples: usize,
    pub grid_points: usize,
    pub violations: usize,
    pub mvee_iterations: usize,
    #[serde(serialize_with = "ser_f64")]
    pub mvee_gap: f64,
}

impl JohnBoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// At the contact point `x` of the John ellipsoid, checks `max ‖x ± h‖ ≥ (1 + 1/n)^{1/2}`
/// over random unit `h` and, in dimension ≤ 3, over a cube-surface grid.
pub fn john_bound_certificate(vertices: &[Vec<f64>], cfg: &JohnBoundConfig) -> Result<JohnBoundReport> {
    let ball = PolytopeNorm::from_vertices(vertices)?;
    let d = ball.dim();
    let fit = mvee(vertices, MVEE_TOL)?;
    let (x, contact_j) = contact_point(vertices, &fit.ellipsoid, 1e-6)?;
    let bound = (1.0 + 1.0 / d as f64).sqrt();
    let mut worst = (f64::INFINITY, Vec::new());
    let mut violations = 0;
    let mut check = |g: &[f64]| {
        let n = ball.norm(g);
        if n <= 0.0 {
            return;
        }
        let h: Vec<f64> = g.iter().map(|v| v / n).collect();
        let plus: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a - b).collect();
        let value = ball.norm(&plus).max(ball.norm(&minus));
        if value < bound - cfg.tol {
            violations += 1;
        }
        if value < worst.0 {
            worst = (value, h);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        check(&g);
    }
    let mut grid_points = 0;
    if let (Some(res), true) = (cfg.grid_res, d <= 3) {
        let steps = (2.0 / res).ceil() as usize;
        let axis: Vec<f64> = (0..=steps).map(|i| (-1.0 + i as f64 * 2.0 / steps as f64).min(1.0)).collect();
        let mut g = vec![0.0; d];
        for face in 0..d {
            for fixed in [1.0, -1.0] {
                let free: Vec<usize> = (0..d).filter(|&i| i != face).collect();
                for mut code in 0..axis.len().pow(free.len() as u32) {
                    g[face] = fixed;
                    for &i in &free {
                        g[i] = axis[code % axis.len()];
                        code /= axis.len();
                    }
                    check(&g);
                    grid_points += 1;
                }
            }
        }
    }
    Ok(JohnBoundReport {
        dim: d,
        bound,
        contact: x,
        contact_j,
        worst_value: worst.0,
        worst_h: worst.1,
        samples: cfg.samples,
        grid_points,
        violations,
        mvee_iterations: fit.iterations,
        mvee_gap: fit.gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]
    }

    #[test]
    fn square_mvee_is_circle_of_radius_sqrt2() {
        let fit = mvee(&square(), MVEE_TOL).unwrap();
        let q = fit.ellipsoid.q();
        assert!((q[(0, 0)] - 0.5).abs() < 1e-6 && (q[(1, 1)] - 0.5).abs() < 1e-6 && q[(0, 1)].abs() < 1e-6);
        assert!(fit.converged);
    }

    #[test]
    fn cross_polytope_mvee_is_unit_circle() {
        let fit = mvee(&[vec![1.0, 0.0], vec![0.0, 1.0]], MVEE_TOL).unwrap();
        let q = fit.ellipsoid.q();
        assert!((q[(0, 0)] - 1.0).abs() < 1e-6 && (q[(1, 1)] - 1.0).abs() < 1e-6 && q[(0, 1)].abs() < 1e-6);
    }

    #[test]
    fn degenerate_points_are_rejected() {
        assert!(matches!(mvee(&[vec![1.0, 1.0], vec![2.0, 2.0]], MVEE_TOL), Err(Error::Rank { rank: 1, dim: 2 })));
    }

    #[test]
    fn sandwich_and_inflation() {
        let fit = mvee(&square(), MVEE_TOL).unwrap();
        let ok = john_sandwich_check(&square(), &fit.ellipsoid, 720, 0, 1e-6).unwrap();
        assert!(ok.passed(), "{ok:?}");
        let big = john_sandwich_check(&square(), &fit.ellipsoid.scaled(2.0), 720, 0, 1e-6).unwrap();
        assert!(big.outer_ok && !big.inner_ok);
        assert!(!big.violation.is_empty());
    }

    #[test]
    fn square_contact_point_is_a_corner() {
        let fit = mvee(&square(), MVEE_TOL).unwrap();
        let (x, j) = contact_point(&square(), &fit.ellipsoid, 1e-6).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        assert!((j - 1.0).abs() < 1e-9);
        let inflated = fit.ellipsoid.scaled(2.0);
        assert!(contact_point(&square(), &inflated, 1e-6).is_err());
    }

    #[test]
    fn square_certificate_reaches_two() {
        let cfg = JohnBoundConfig { samples: 1000, seed: 5, grid_res: Some(1e-3), tol: 1e-9 };
        let rep = john_bound_certificate(&square(), &cfg).unwrap();
        assert_eq!(rep.violations, 0);
        assert!((rep.worst_value - 2.0).abs() < 1e-9);
    }
}
