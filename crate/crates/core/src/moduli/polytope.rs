use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::DenseNorm;
use crate::error::{Error, Result};

/// Gauge norm of a centrally symmetric polytope given by vertices.
///
/// Facets are found by brute force over `d`-subsets of the vertices, so this is meant
/// for small dimensions and vertex counts.
#[derive(Clone, Debug)]
pub struct PolytopeNorm {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

impl PolytopeNorm {
    /// The input is symmetrized (each `v` and `−v` become vertices).
    pub fn from_vertices(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::input("no vertices"))?;
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::input("vertices must share a positive dimension"));
        }
        let vertices = symmetrize(points);
        let facets = facets(&vertices, dim)?;
        Ok(Self { dim, vertices, facets })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }
}

impl DenseNorm for PolytopeNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|a| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn linf_equivalence(&self) -> (f64, f64) {
        let radius = self.vertices.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let upper = self.facets.iter().map(|a| a.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        (1.0 / radius, upper)
    }
}

pub(crate) fn symmetrize(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(2 * points.len());
    for p in points {
        let neg: Vec<f64> = p.iter().map(|v| -v).collect();
        for q in [p.clone(), neg] {
            if !out.iter().any(|o| o.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12)) {
                out.push(q);
            }
        }
    }
    out
}

fn facets(vertices: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..dim).collect();
    let n = vertices.len();
    if n < dim {
        return Err(Error::Rank { rank: n, dim });
    }
    loop {
        let mat = DMatrix::from_fn(dim, dim, |r, c| vertices[idx[r]][c]);
        if let Some(a) = mat.lu().solve(&DVector::from_element(dim, 1.0)) {
            let a: Vec<f64> = a.iter().copied().collect();
            let supporting = a.iter().all(|v| v.is_finite())
                && vertices.iter().all(|v| v.iter().zip(&a).map(|(p, q)| p * q).sum::<f64>() <= 1.0 + 1e-9);
            if supporting && !out.iter().any(|o| o.iter().zip(&a).all(|(p, q)| (p - q).abs() < 1e-9)) {
                out.push(a);
            }
        }
        // Next d-subset in lexicographic order.
        let mut i = dim;
        while i > 0 && idx[i - 1] == n - dim + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for t in i..dim {
            idx[t] = idx[t - 1] + 1;
        }
    }
    if out.is_empty() {
        return Err(Error::Rank { rank: dim - 1, dim });
    }
    Ok(out)
}

/// `2·dim·dim` Gaussian directions normalized to the Euclidean sphere.
pub fn random_symmetric_polytope<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..2 * dim * dim)
        .map(|_| {
            let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            g.into_iter().map(|v| v / n).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_linf() {
        let p = PolytopeNorm::from_vertices(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        assert!((p.norm(&[0.3, -0.7]) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn cross_polytope_is_l1() {
        let p = PolytopeNorm::from_vertices(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((p.norm(&[0.3, -0.7]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_input_is_rejected() {
        assert!(PolytopeNorm::from_vertices(&[vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    }
}
