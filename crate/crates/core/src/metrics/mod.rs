//! Sample-based sliced distances: 1-D transport by sorting, SWD, GSWD with
//! polynomial and circular defining functions, max-SWD, GSWD-NN and the
//! per-direction distance histogram.

mod defining;
mod embedding;
mod histogram;
mod max_sliced;
mod nn;
mod one_dim;
mod projection;
mod sliced;

pub use defining::{enumerate_multi_indices, DefiningFunction};
pub use embedding::{Embedding, IdentityMap, MonomialMap};
pub use histogram::{projection_histogram, ProjectionHistogram};
pub use max_sliced::{
    max_swd, max_swd_direction, MaxSliced, DEFAULT_MAX_SWD_LR, DEFAULT_MAX_SWD_STEPS,
};
pub use nn::{gswd_nn, gswd_nn_on_tape, ProjectionNet};
pub use one_dim::{sliced_on_tape, sort_columns, wasserstein_1d};
pub use projection::{sample_unit_sphere, ProjectionSet};
pub use sliced::{gswd, gswd_on_tape, swd, swd_on_tape};
