use super::tensor::Tensor;
use crate::error::{Error, Result};

/// A trainable tensor with its gradient accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    value: Tensor,
    grad: Tensor,
}

impl Parameter {
    pub fn new(value: Tensor) -> Self {
        let grad = Tensor::zeros(value.shape());
        Self { value, grad }
    }

    pub fn value(&self) -> &Tensor {
        &self.value
    }

    pub fn grad(&self) -> &Tensor {
        &self.grad
    }

    pub fn into_value(self) -> Tensor {
        self.value
    }

    /// Adds `delta` into the gradient accumulator.
    pub fn accumulate(&mut self, delta: &Tensor) -> Result<()> {
        self.accumulate_scaled(delta, 1.0)
    }

    /// Adds `scale * delta` into the gradient accumulator.
    pub fn accumulate_scaled(&mut self, delta: &Tensor, scale: f64) -> Result<()> {
        if delta.shape() != self.value.shape() {
            return Err(Error::shape(format!(
                "gradient {:?} for parameter {:?}",
                delta.shape(),
                self.value.shape()
            )));
        }
        for (g, d) in self.grad.data_mut().iter_mut().zip(delta.data()) {
            *g += scale * d;
        }
        Ok(())
    }

    pub fn zero_grad(&mut self) {
        self.grad.data_mut().iter_mut().for_each(|g| *g = 0.0);
    }
}

/// Moment estimates and hyperparameters of one Adam-optimized parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first_moment: Tensor,
    second_moment: Tensor,
    step: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state with `beta1 = 0.9`, `beta2 = 0.999`, `epsilon = 1e-8`.
    pub fn new(shape: &[usize], learning_rate: f64) -> Self {
        Self {
            first_moment: Tensor::zeros(shape),
            second_moment: Tensor::zeros(shape),
            step: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &Tensor {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &Tensor {
        &self.second_moment
    }
}

/// One bias-corrected Adam descent step on `param`, then clears its gradient.
///
/// For ascent, accumulate the negated gradient.
pub fn adam_step(param: &mut Parameter, state: &mut AdamState) -> Result<()> {
    if state.first_moment.shape() != param.value.shape() {
        return Err(Error::contract(format!(
            "optimizer state {:?} does not match parameter {:?}",
            state.first_moment.shape(),
            param.value.shape()
        )));
    }
    if !(state.learning_rate > 0.0) {
        return Err(Error::contract("learning rate must be positive"));
    }
    state.step += 1;
    let t = state.step as f64;
    let (b1, b2, eps, lr) = (state.beta1, state.beta2, state.epsilon, state.learning_rate);
    let c1 = 1.0 - b1.powf(t);
    let c2 = 1.0 - b2.powf(t);
    let grad = param.grad.data();
    let m = state.first_moment.data_mut();
    for (mi, &g) in m.iter_mut().zip(grad) {
        *mi = b1 * *mi + (1.0 - b1) * g;
    }
    let v = state.second_moment.data_mut();
    for (vi, &g) in v.iter_mut().zip(grad) {
        *vi = b2 * *vi + (1.0 - b2) * g * g;
    }
    let (m, v) = (state.first_moment.data(), state.second_moment.data());
    let value = param.value.data_mut();
    for i in 0..value.len() {
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        value[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    if !param.value.all_finite() {
        return Err(Error::NumericOverflow { primitive: "adam_step" });
    }
    param.zero_grad();
    Ok(())
}
