use rand::Rng;

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::metrics::Embedding;
use crate::rng::rng_from_seed;
use crate::samples::SampleSet;

/// How the network output is turned into the augmented sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AugmentationMode {
    /// `g(x) = [x, phi(x)]`, injective for any weights.
    InjectiveConcat,
    /// `g(x) = phi(x)`, not injective in general.
    Raw,
}

impl AugmentationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::InjectiveConcat => "injective-concat",
            Self::Raw => "raw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "injective-concat" => Some(Self::InjectiveConcat),
            "raw" => Some(Self::Raw),
            _ => None,
        }
    }
}

/// `phi(x) = ReLU(x W + b)` with square `W`, plus the output mode and the
/// regularization weight `lambda` of the training objective.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationNetwork {
    weights: Tensor,
    biases: Tensor,
    mode: AugmentationMode,
    lambda: f64,
}

impl AugmentationNetwork {
    pub fn new(weights: Tensor, biases: Tensor, mode: AugmentationMode, lambda: f64) -> Result<Self> {
        if weights.ndim() != 2 || weights.rows() != weights.cols() || weights.rows() == 0 {
            return Err(Error::shape(format!(
                "network weights must be square, got {:?}",
                weights.shape()
            )));
        }
        if biases.shape() != [weights.cols()] {
            return Err(Error::shape(format!(
                "biases {:?} for weights {:?}",
                biases.shape(),
                weights.shape()
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
        }
        Ok(Self {
            weights,
            biases,
            mode,
            lambda,
        })
    }

    /// Weights i.i.d. uniform in `[-1/sqrt(d), 1/sqrt(d)]`, zero biases.
    pub fn random(dim: usize, mode: AugmentationMode, lambda: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("network dimension must be >= 1"));
        }
        let mut rng = rng_from_seed(seed);
        let bound = 1.0 / (dim as f64).sqrt();
        let w = (0..dim * dim).map(|_| rng.random_range(-bound..=bound)).collect();
        Self::new(
            Tensor::matrix(dim, dim, w)?,
            Tensor::zeros(&[dim]),
            mode,
            lambda,
        )
    }

    pub fn zeros(dim: usize, mode: AugmentationMode, lambda: f64) -> Result<Self> {
        Self::new(Tensor::zeros(&[dim, dim]), Tensor::zeros(&[dim]), mode, lambda)
    }

    pub fn weights(&self) -> &Tensor {
        &self.weights
    }

    pub fn biases(&self) -> &Tensor {
        &self.biases
    }

    pub fn mode(&self) -> AugmentationMode {
        self.mode
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    /// `2d` in injective-concat mode, `d` in raw mode.
    pub fn augmented_dim(&self) -> usize {
        match self.mode {
            AugmentationMode::InjectiveConcat => 2 * self.input_dim(),
            AugmentationMode::Raw => self.input_dim(),
        }
    }

    pub(crate) fn set_parameters(&mut self, weights: Tensor, biases: Tensor) {
        debug_assert_eq!(weights.shape(), self.weights.shape());
        debug_assert_eq!(biases.shape(), self.biases.shape());
        self.weights = weights;
        self.biases = biases;
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.input_dim() {
            return Err(Error::contract(format!(
                "network expects dimension {}, samples have {cols}",
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Records `phi(x)` with explicit weight and bias nodes.
    pub fn phi_with(&self, tape: &mut Tape, x: Var, w: Var, b: Var) -> Result<Var> {
        self.check_input(tape.value(x).cols())?;
        let h = tape.matmul(x, w)?;
        let h = tape.add_row(h, b)?;
        tape.relu(h)
    }

    /// Records `g(x)` with explicit weight and bias nodes.
    pub fn embed_with(&self, tape: &mut Tape, x: Var, w: Var, b: Var) -> Result<Var> {
        let phi = self.phi_with(tape, x, w, b)?;
        match self.mode {
            AugmentationMode::InjectiveConcat => tape.concat(x, phi),
            AugmentationMode::Raw => Ok(phi),
        }
    }
}

impl Embedding for AugmentationNetwork {
    fn output_dim(&self, input_dim: usize) -> Result<usize> {
        self.check_input(input_dim)?;
        Ok(self.augmented_dim())
    }

    fn embed(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let w = tape.constant(self.weights.clone());
        let b = tape.constant(self.biases.clone());
        self.embed_with(tape, x, w, b)
    }
}

/// `ReLU(X W + b)` for every sample.
pub fn phi_forward(net: &AugmentationNetwork, x: &SampleSet) -> Result<Tensor> {
    let mut tape = Tape::new();
    let v = tape.constant(x.points().clone());
    let w = tape.constant(net.weights.clone());
    let b = tape.constant(net.biases.clone());
    let out = net.phi_with(&mut tape, v, w, b)?;
    Ok(tape.value(out).clone())
}

/// `[X, phi(X)]` in injective-concat mode, `phi(X)` in raw mode.
pub fn injective_forward(net: &AugmentationNetwork, x: &SampleSet) -> Result<Tensor> {
    net.apply(x.points())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> SampleSet {
        SampleSet::from_rows(&[vec![0.5, 2.0], vec![1.0, 0.0], vec![3.0, 0.25]]).unwrap()
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = AugmentationNetwork::zeros(2, AugmentationMode::InjectiveConcat, 0.1).unwrap();
        let out = phi_forward(&net, &samples()).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_weights_pass_nonnegative_inputs() {
        let w = Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let net =
            AugmentationNetwork::new(w, Tensor::zeros(&[2]), AugmentationMode::Raw, 0.0).unwrap();
        let x = samples();
        assert_eq!(&phi_forward(&net, &x).unwrap(), x.points());
    }

    #[test]
    fn concat_keeps_input_block() {
        let net = AugmentationNetwork::random(2, AugmentationMode::InjectiveConcat, 0.1, 4).unwrap();
        let x = samples();
        let g = injective_forward(&net, &x).unwrap();
        assert_eq!(g.shape(), &[3, 4]);
        for i in 0..3 {
            assert_eq!(&g.row(i)[..2], x.point(i));
        }
    }

    #[test]
    fn raw_zero_network_is_constant() {
        let net = AugmentationNetwork::zeros(2, AugmentationMode::Raw, 0.1).unwrap();
        let g = injective_forward(&net, &samples()).unwrap();
        assert_eq!(g.shape(), &[3, 2]);
        assert!(g.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_input_rejected() {
        let net = AugmentationNetwork::zeros(3, AugmentationMode::Raw, 0.1).unwrap();
        assert!(matches!(phi_forward(&net, &samples()), Err(Error::Contract(_))));
        assert!(AugmentationNetwork::zeros(2, AugmentationMode::Raw, -1.0).is_err());
    }
}
