pub mod augmentation;
pub mod autodiff;
pub mod error;
pub mod exact_ot;
pub mod flow;
pub mod metrics;
pub mod rng;
pub mod samples;

pub use error::{Error, Result};
pub use samples::SampleSet;
