use std::sync::Arc;

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};

/// All exponent vectors `alpha` in `N^d` with `|alpha| = m`, in descending
/// lexicographic order: `(m,0,..,0)` first and `(0,..,0,m)` last.
pub fn enumerate_multi_indices(d: usize, m: u32) -> Vec<Vec<u32>> {
    fn fill(pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = remaining;
            out.push(cur.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            cur[pos] = e;
            fill(pos + 1, remaining - e, cur, out);
        }
    }
    if d == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    fill(0, m, &mut vec![0; d], &mut out);
    out
}

/// The map `beta(x, theta)` that replaces the inner product in a generalized
/// Radon transform.
#[derive(Debug, Clone, PartialEq)]
pub enum DefiningFunction {
    /// `beta = <x, theta>`.
    Linear,
    /// `beta = sum_i theta_i x^{alpha_i}` over all multi-indices of an odd degree.
    Polynomial {
        degree: u32,
        table: Arc<[Vec<u32>]>,
    },
    /// `beta = ||x - r theta||_2`.
    Circular { radius: f64 },
}

impl DefiningFunction {
    /// Homogeneous polynomial of odd `degree` on `R^dim`.
    pub fn polynomial(dim: usize, degree: u32) -> Result<Self> {
        if degree % 2 == 0 {
            return Err(Error::Config(format!(
                "polynomial degree must be odd for an injective transform, got {degree}"
            )));
        }
        if dim == 0 {
            return Err(Error::Config("polynomial needs dimension >= 1".into()));
        }
        Ok(Self::Polynomial {
            degree,
            table: enumerate_multi_indices(dim, degree).into(),
        })
    }

    pub fn circular(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("circular radius must be positive, got {radius}")));
        }
        Ok(Self::Circular { radius })
    }

    /// Dimension of the directions `theta` for samples in `R^dim`.
    pub fn projection_dim(&self, dim: usize) -> usize {
        match self {
            Self::Linear | Self::Circular { .. } => dim,
            Self::Polynomial { table, .. } => table.len(),
        }
    }

    /// Records `beta(x_n, theta_l)` for every sample row and direction,
    /// given directions as an `L x d_theta` node.
    pub fn project(&self, tape: &mut Tape, x: Var, theta: Var) -> Result<Var> {
        let dim = tape.value(x).cols();
        let expected = self.projection_dim(dim);
        let got = tape.value(theta).cols();
        if got != expected {
            return Err(Error::contract(format!(
                "directions of dimension {got} for a transform needing {expected}"
            )));
        }
        match self {
            Self::Linear => {
                let t = tape.transpose(theta)?;
                tape.matmul(x, t)
            }
            Self::Polynomial { table, .. } => {
                let features = tape.monomials(x, Arc::clone(table))?;
                let t = tape.transpose(theta)?;
                tape.matmul(features, t)
            }
            Self::Circular { radius } => {
                let centers = tape.scale(theta, *radius)?;
                tape.pairwise_dist(x, centers)
            }
        }
    }
}
