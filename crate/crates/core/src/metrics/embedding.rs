use std::sync::Arc;

use super::defining::enumerate_multi_indices;
use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};

/// A sample map `g: R^d -> R^{d_theta}` that can be recorded on a tape.
pub trait Embedding {
    /// `d_theta` for inputs of dimension `input_dim`.
    fn output_dim(&self, input_dim: usize) -> Result<usize>;

    /// Records `g` applied to every row of the `N x d` node `x`.
    fn embed(&self, tape: &mut Tape, x: Var) -> Result<Var>;

    /// Evaluates `g` on a plain sample matrix.
    fn apply(&self, x: &Tensor) -> Result<Tensor> {
        let mut tape = Tape::new();
        let v = tape.constant(x.clone());
        let out = self.embed(&mut tape, v)?;
        Ok(tape.value(out).clone())
    }
}

/// `g(x) = x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdentityMap;

impl Embedding for IdentityMap {
    fn output_dim(&self, input_dim: usize) -> Result<usize> {
        Ok(input_dim)
    }

    fn embed(&self, _tape: &mut Tape, x: Var) -> Result<Var> {
        Ok(x)
    }
}

/// `g(x) = (x^{alpha_1}, ..., x^{alpha_{d_alpha}})` over all multi-indices of one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMap {
    dim: usize,
    table: Arc<[Vec<u32>]>,
}

impl MonomialMap {
    pub fn new(dim: usize, degree: u32) -> Self {
        Self {
            dim,
            table: enumerate_multi_indices(dim, degree).into(),
        }
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }
}

impl Embedding for MonomialMap {
    fn output_dim(&self, input_dim: usize) -> Result<usize> {
        if input_dim != self.dim {
            return Err(Error::contract(format!(
                "monomial map built for dimension {}, got {input_dim}",
                self.dim
            )));
        }
        Ok(self.table.len())
    }

    fn embed(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        tape.monomials(x, Arc::clone(&self.table))
    }
}
