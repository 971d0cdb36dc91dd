use super::one_dim::sliced_on_tape;
use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::samples::{check_pair, SampleSet};
use rand::Rng;

/// One-layer map `x -> ReLU(x W + b)` whose `L` outputs serve directly as projections.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionNet {
    weights: Tensor,
    bias: Tensor,
}

impl ProjectionNet {
    pub fn new(weights: Tensor, bias: Tensor) -> Result<Self> {
        if weights.ndim() != 2 || bias.shape() != [weights.cols()] {
            return Err(Error::shape(format!(
                "projection net weights {:?} with bias {:?}",
                weights.shape(),
                bias.shape()
            )));
        }
        Ok(Self { weights, bias })
    }

    pub fn zeros(input_dim: usize, outputs: usize) -> Self {
        Self {
            weights: Tensor::zeros(&[input_dim, outputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    /// Weights uniform in `[-1/sqrt(d), 1/sqrt(d)]`, zero bias.
    pub fn random(input_dim: usize, outputs: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let bound = 1.0 / (input_dim as f64).sqrt();
        let data = (0..input_dim * outputs)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Self {
            weights: Tensor::from_parts(vec![input_dim, outputs], data),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Number of projections, fixed by the output layer.
    pub fn outputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn forward_on_tape(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let w = tape.constant(self.weights.clone());
        let b = tape.constant(self.bias.clone());
        let h = tape.matmul(x, w)?;
        let h = tape.add_row(h, b)?;
        tape.relu(h)
    }
}

/// Records the GSWD-NN distance: the network outputs are the projected samples.
pub fn gswd_nn_on_tape(tape: &mut Tape, x: Var, y: Var, net: &ProjectionNet, k: f64) -> Result<Var> {
    let px = net.forward_on_tape(tape, x)?;
    let py = net.forward_on_tape(tape, y)?;
    sliced_on_tape(tape, px, py, k)
}

/// Sliced distance over the outputs of a projection network.
///
/// This is only a pseudo-metric: a network that collapses the inputs, such
/// as the all-zero one, gives 0 for distinct sets.
pub fn gswd_nn(x: &SampleSet, y: &SampleSet, net: &ProjectionNet, k: f64) -> Result<f64> {
    check_pair(x, y)?;
    if x.dim() != net.input_dim() {
        return Err(Error::contract(format!(
            "network expects dimension {}, samples have {}",
            net.input_dim(),
            x.dim()
        )));
    }
    let mut tape = Tape::new();
    let vx = tape.constant(x.points().clone());
    let vy = tape.constant(y.points().clone());
    let out = gswd_nn_on_tape(&mut tape, vx, vy, net, k)?;
    Ok(tape.scalar(out).expect("scalar"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets() -> (SampleSet, SampleSet) {
        (
            SampleSet::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap(),
            SampleSet::from_rows(&[vec![5.0, 1.0], vec![-3.0, 4.0]]).unwrap(),
        )
    }

    #[test]
    fn zero_net_collapses_everything() {
        let (x, y) = sets();
        assert_eq!(gswd_nn(&x, &y, &ProjectionNet::zeros(2, 6), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn identical_inputs_give_zero() {
        let (x, _) = sets();
        let net = ProjectionNet::random(2, 6, 1);
        assert_eq!(gswd_nn(&x, &x, &net, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn projection_count_is_output_width() {
        let net = ProjectionNet::random(2, 13, 1);
        assert_eq!(net.outputs(), 13);
        let (x, _) = sets();
        let mut tape = Tape::new();
        let v = tape.constant(x.points().clone());
        let out = net.forward_on_tape(&mut tape, v).unwrap();
        assert_eq!(tape.value(out).shape(), &[2, 13]);
    }
}
