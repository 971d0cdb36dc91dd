use crate::autodiff::Tensor;
use crate::error::{Error, Result};

/// `N x d` matrix of sample points, `N >= 1`, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Tensor,
}

impl SampleSet {
    pub fn new(points: Tensor) -> Result<Self> {
        if points.ndim() != 2 {
            return Err(Error::shape(format!(
                "samples must be a matrix, got shape {:?}",
                points.shape()
            )));
        }
        if points.rows() == 0 || points.cols() == 0 {
            return Err(Error::contract("sample set needs at least one point of dimension >= 1"));
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Tensor::from_rows(rows)?)
    }

    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(Tensor::matrix(n, d, data)?)
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Tensor {
        &self.points
    }

    pub fn into_points(self) -> Tensor {
        self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Shifts every point by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim() {
            return Err(Error::shape("translation offset dimension"));
        }
        let d = self.dim();
        let data = self
            .points
            .data()
            .iter()
            .enumerate()
            .map(|(i, v)| v + offset[i % d])
            .collect();
        Self::from_flat(self.len(), d, data)
    }
}

/// Checks that two sample sets have the same count and dimension.
pub(crate) fn check_pair(x: &SampleSet, y: &SampleSet) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::contract(format!(
            "sample counts differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::contract(format!(
            "sample dimensions differ: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}
