//! Learned injective augmentation `g(x) = [x, ReLU(x W + b)]` and the
//! augmented sliced Wasserstein distance built on it.

mod histogram;
mod network;
mod objective;
mod record;

pub use histogram::{shift_histograms, ShiftHistogramSetup};
pub use network::{injective_forward, phi_forward, AugmentationMode, AugmentationNetwork};
pub use objective::{
    augmented_swd, augmented_swd_on_tape, aswd, evaluation_seed, network_init_seed,
    objective_gradient, objective_on_tape, optimize_network, regularizer, spatial_radon_project,
    AswdConfig, NetworkTrainer, ObjectiveNodes, OptimizationReport,
};
