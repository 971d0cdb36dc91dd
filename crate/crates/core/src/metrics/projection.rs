use rand_distr::{Distribution, StandardNormal};

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// `L` unit directions in `R^{d_theta}`, stored as an `L x d_theta` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    directions: Tensor,
    seed: u64,
}

impl ProjectionSet {
    /// Wraps explicit directions; every row must have unit norm within `1e-12`.
    pub fn from_directions(directions: Tensor, seed: u64) -> Result<Self> {
        if directions.ndim() != 2 || directions.rows() == 0 || directions.cols() == 0 {
            return Err(Error::shape(format!(
                "directions must be a non-empty matrix, got {:?}",
                directions.shape()
            )));
        }
        for i in 0..directions.rows() {
            let norm = directions.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::contract(format!("direction {i} has norm {norm}")));
            }
        }
        Ok(Self { directions, seed })
    }

    pub fn directions(&self) -> &Tensor {
        &self.directions
    }

    pub fn direction(&self, l: usize) -> &[f64] {
        self.directions.row(l)
    }

    pub fn count(&self) -> usize {
        self.directions.rows()
    }

    pub fn dim(&self) -> usize {
        self.directions.cols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws `count` i.i.d. uniform directions on the unit sphere of `R^dim`
/// by normalizing standard Gaussian vectors.
pub fn sample_unit_sphere(count: usize, dim: usize, seed: u64) -> Result<ProjectionSet> {
    if count == 0 || dim == 0 {
        return Err(Error::contract("need at least one direction of dimension >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut data = Vec::with_capacity(count * dim);
    let mut row = vec![0.0; dim];
    for _ in 0..count {
        let norm = loop {
            for v in row.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        data.extend(row.iter().map(|v| v / norm));
    }
    Ok(ProjectionSet {
        directions: Tensor::from_parts(vec![count, dim], data),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_unit() {
        let p = sample_unit_sphere(50, 7, 3).unwrap();
        for l in 0..p.count() {
            let n: f64 = p.direction(l).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn one_dimensional_directions_are_signs() {
        let p = sample_unit_sphere(100, 1, 11).unwrap();
        assert!(p.directions().data().iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(p.directions().data().contains(&1.0));
        assert!(p.directions().data().contains(&-1.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_unit_sphere(20, 4, 99).unwrap();
        let b = sample_unit_sphere(20, 4, 99).unwrap();
        let c = sample_unit_sphere(20, 4, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.directions(), c.directions());
    }

    #[test]
    fn sample_mean_concentrates() {
        // Each coordinate has variance 1/3 on S^2; the standard error of the
        // mean of 10^4 draws is about 0.0058, so 0.05 is a wide margin.
        let p = sample_unit_sphere(10_000, 3, 5).unwrap();
        for j in 0..3 {
            let mean: f64 = (0..p.count()).map(|l| p.direction(l)[j]).sum::<f64>() / 1e4;
            assert!(mean.abs() < 0.05, "coordinate {j}: {mean}");
        }
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(sample_unit_sphere(0, 3, 0).is_err());
        assert!(sample_unit_sphere(3, 0, 0).is_err());
        let bad = Tensor::matrix(1, 2, vec![1.0, 1.0]).unwrap();
        assert!(ProjectionSet::from_directions(bad, 0).is_err());
    }
}
