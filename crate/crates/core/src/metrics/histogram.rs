use super::embedding::Embedding;
use super::one_dim::{check_order, per_column_distances};
use super::projection::ProjectionSet;
use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::samples::{check_pair, SampleSet};

/// Histogram of per-direction 1-D distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionHistogram {
    /// `bins + 1` equally spaced edges from 0 to the largest distance.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `W_k` for each direction, in direction order.
    pub distances: Vec<f64>,
}

impl ProjectionHistogram {
    pub fn mean(&self) -> f64 {
        self.distances.iter().sum::<f64>() / self.distances.len() as f64
    }

    /// Index of the most populated bin (lowest index on ties).
    pub fn mode_bin(&self) -> usize {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        self.counts.iter().position(|&c| c == max).unwrap_or(0)
    }

    fn from_distances(distances: Vec<f64>, bins: usize) -> Self {
        let top = distances.iter().copied().fold(0.0_f64, f64::max);
        let upper = if top > 0.0 { top } else { 1.0 };
        let width = upper / bins as f64;
        let edges = (0..=bins).map(|i| i as f64 * width).collect();
        let mut counts = vec![0; bins];
        for &d in &distances {
            let b = ((d / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self {
            edges,
            counts,
            distances,
        }
    }
}

/// Per-direction `W_k(<g(X), theta_l>, <g(Y), theta_l>)` binned into `bins` buckets.
pub fn projection_histogram<E: Embedding + ?Sized>(
    x: &SampleSet,
    y: &SampleSet,
    projector: &E,
    proj: &ProjectionSet,
    k: f64,
    bins: usize,
) -> Result<ProjectionHistogram> {
    check_pair(x, y)?;
    check_order(k)?;
    if bins == 0 {
        return Err(Error::contract("histogram needs at least one bin"));
    }
    let mut tape = Tape::new();
    let px = project(&mut tape, x, projector, proj)?;
    let py = project(&mut tape, y, projector, proj)?;
    let distances = per_column_distances(tape.value(px), tape.value(py), k);
    Ok(ProjectionHistogram::from_distances(distances, bins))
}

fn project<E: Embedding + ?Sized>(
    tape: &mut Tape,
    x: &SampleSet,
    projector: &E,
    proj: &ProjectionSet,
) -> Result<Var> {
    let v = tape.constant(x.points().clone());
    let g = projector.embed(tape, v)?;
    if tape.value(g).cols() != proj.dim() {
        return Err(Error::contract(format!(
            "projector outputs dimension {}, directions have {}",
            tape.value(g).cols(),
            proj.dim()
        )));
    }
    let theta = tape.constant(proj.directions().clone());
    let t = tape.transpose(theta)?;
    tape.matmul(g, t)
}
