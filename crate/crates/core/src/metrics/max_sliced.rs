use super::one_dim::sliced_on_tape;
use super::projection::{sample_unit_sphere, ProjectionSet};
use crate::autodiff::{Tape, Tensor};
use crate::error::Result;
use crate::samples::{check_pair, SampleSet};

/// Projected gradient ascent defaults for max-sliced distances.
pub const DEFAULT_MAX_SWD_STEPS: usize = 50;
pub const DEFAULT_MAX_SWD_LR: f64 = 0.01;

/// Outcome of the max-sliced ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSliced {
    /// Best `W_k` seen along the ascent, including the starting direction.
    pub value: f64,
    /// Unit direction attaining `value`.
    pub direction: ProjectionSet,
}

/// Ascends `W_k(<X, theta>, <Y, theta>)` over unit `theta` from a seeded
/// random start, renormalizing after each step.
pub fn max_swd_direction(
    x: &SampleSet,
    y: &SampleSet,
    k: f64,
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<MaxSliced> {
    check_pair(x, y)?;
    let d = x.dim();
    let start = sample_unit_sphere(1, d, seed)?;
    let mut theta = start.directions().data().to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for step in 0..=steps {
        let mut tape = Tape::new();
        let vx = tape.constant(x.points().clone());
        let vy = tape.constant(y.points().clone());
        let th = tape.leaf(Tensor::matrix(1, d, theta.clone())?);
        let tt = tape.transpose(th)?;
        let px = tape.matmul(vx, tt)?;
        let py = tape.matmul(vy, tt)?;
        let out = sliced_on_tape(&mut tape, px, py, k)?;
        let value = tape.scalar(out).expect("scalar");
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, theta.clone()));
        }
        if step == steps {
            break;
        }
        let grads = tape.backward(out)?;
        let g = grads.get(th).expect("leaf");
        let next: Vec<f64> = theta.iter().zip(g.data()).map(|(t, g)| t + lr * g).collect();
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            theta = next.into_iter().map(|v| v / norm).collect();
        }
    }

    let (value, dir) = best.expect("at least one evaluation");
    // Renormalize so the direction passes the unit-norm check exactly.
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dir: Vec<f64> = dir.iter().map(|v| v / norm).collect();
    let direction = match ProjectionSet::from_directions(Tensor::matrix(1, d, dir)?, seed) {
        Ok(p) => p,
        Err(_) => start,
    };
    Ok(MaxSliced { value, direction })
}

/// Max-sliced Wasserstein distance (best value found by the ascent).
pub fn max_swd(
    x: &SampleSet,
    y: &SampleSet,
    k: f64,
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<f64> {
    Ok(max_swd_direction(x, y, k, steps, lr, seed)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::swd;

    #[test]
    fn identical_sets_give_zero() {
        let x = SampleSet::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        assert_eq!(max_swd(&x, &x, 2.0, 20, 0.1, 3).unwrap(), 0.0);
    }

    #[test]
    fn point_masses_find_separating_axis() {
        let x = SampleSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let y = SampleSet::from_rows(&[vec![2.5, 0.0]]).unwrap();
        for seed in 0..5 {
            let v = max_swd(&x, &y, 2.0, 500, 0.5, seed).unwrap();
            assert!((v - 2.5).abs() < 1e-3, "seed {seed}: {v}");
        }
    }

    #[test]
    fn never_below_starting_direction() {
        let x = SampleSet::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]]).unwrap();
        let y = SampleSet::from_rows(&[vec![1.0, 1.0], vec![-2.0, 0.0], vec![0.3, 2.0]]).unwrap();
        for seed in 0..10 {
            let start = sample_unit_sphere(1, 2, seed).unwrap();
            let s = swd(&x, &y, &start, 2.0).unwrap();
            let m = max_swd(&x, &y, 2.0, DEFAULT_MAX_SWD_STEPS, DEFAULT_MAX_SWD_LR, seed).unwrap();
            assert!(m >= s);
        }
    }
}
