//! Dense tensors, a reverse-mode computation record and the Adam optimizer.

mod adam;
mod check;
mod tape;
mod tensor;

pub use adam::{adam_step, AdamState, Parameter};
pub use check::{gradient, gradient_check, numeric_gradient};
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;
