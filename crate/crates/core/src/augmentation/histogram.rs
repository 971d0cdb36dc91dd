use super::network::AugmentationMode;
use super::objective::{aswd, evaluation_seed, AswdConfig};
use crate::error::Result;
use crate::flow::standard_normal_samples;
use crate::metrics::{projection_histogram, sample_unit_sphere, IdentityMap, ProjectionHistogram};
use crate::rng::{derive_seed, stream};

/// Two Gaussians `N(0, I_dim)` and `N(s, I_dim)`, with `s` spread evenly over
/// the coordinates and `|s| = shift`, compared direction by direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftHistogramSetup {
    pub dim: usize,
    pub shift: f64,
    pub samples: usize,
    pub projections: usize,
    pub bins: usize,
    pub k: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for ShiftHistogramSetup {
    fn default() -> Self {
        Self {
            dim: 100,
            shift: 5.0,
            samples: 500,
            projections: 1000,
            bins: 50,
            k: 2.0,
            lambda: 0.1,
            iterations: 10,
            lr: 0.002,
            seed: 0,
        }
    }
}

/// Per-direction distance histograms for plain linear projections and for
/// projections of a trained injective augmentation.
///
/// The second sample set is the first one translated by `s`, so with
/// `shift = 0` every distance is exactly zero.
pub fn shift_histograms(setup: &ShiftHistogramSetup) -> Result<(ProjectionHistogram, ProjectionHistogram)> {
    let s = setup;
    let x = standard_normal_samples(s.samples, s.dim, derive_seed(s.seed, &[stream::PARTICLES]))?;
    let y = x.translated(&vec![s.shift / (s.dim as f64).sqrt(); s.dim])?;
    let plain = sample_unit_sphere(s.projections, s.dim, evaluation_seed(s.seed))?;
    let swd = projection_histogram(&x, &y, &IdentityMap, &plain, s.k, s.bins)?;
    let cfg = AswdConfig {
        projections: s.projections,
        k: s.k,
        lambda: s.lambda,
        iterations: s.iterations,
        lr: s.lr,
        seed: s.seed,
        mode: AugmentationMode::InjectiveConcat,
    };
    let (_, net) = aswd(&x, &y, &cfg)?;
    let learned = sample_unit_sphere(s.projections, net.augmented_dim(), evaluation_seed(s.seed))?;
    let aswd = projection_histogram(&x, &y, &net, &learned, s.k, s.bins)?;
    Ok((swd, aswd))
}
