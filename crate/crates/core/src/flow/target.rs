use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::samples::SampleSet;

/// Synthetic 2-D target distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetKind {
    EightGaussian,
    TwentyFiveGaussian,
    SwissRoll,
    Moon,
    Knot,
}

impl TargetKind {
    pub const ALL: [TargetKind; 5] = [
        Self::EightGaussian,
        Self::TwentyFiveGaussian,
        Self::SwissRoll,
        Self::Moon,
        Self::Knot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::EightGaussian => "eight-gaussian",
            Self::TwentyFiveGaussian => "twentyfive-gaussian",
            Self::SwissRoll => "swiss-roll",
            Self::Moon => "moon",
            Self::Knot => "knot",
        }
    }

    /// Standard deviation of the isotropic Gaussian noise added to each point.
    pub fn default_noise(self) -> f64 {
        match self {
            Self::EightGaussian | Self::TwentyFiveGaussian => 0.2,
            Self::SwissRoll | Self::Moon => 0.1,
            Self::Knot => 0.05,
        }
    }

    /// Component means of the mixture targets.
    pub fn mixture_means(self) -> Option<Vec<[f64; 2]>> {
        match self {
            Self::EightGaussian => Some(
                (0..8)
                    .map(|i| {
                        let a = 2.0 * PI * i as f64 / 8.0;
                        [4.0 * a.cos(), 4.0 * a.sin()]
                    })
                    .collect(),
            ),
            Self::TwentyFiveGaussian => {
                let grid = [-4.0, -2.0, 0.0, 2.0, 4.0];
                Some(
                    grid.iter()
                        .flat_map(|&a| grid.iter().map(move |&b| [a, b]))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    fn clean_point(self, rng: &mut impl Rng, means: &[[f64; 2]]) -> [f64; 2] {
        match self {
            Self::EightGaussian | Self::TwentyFiveGaussian => means[rng.random_range(0..means.len())],
            Self::SwissRoll => {
                let t = rng.random_range(1.5 * PI..4.5 * PI);
                [t * t.cos() / 2.0, t * t.sin() / 2.0]
            }
            Self::Moon => {
                let t = rng.random_range(0.0..PI);
                if rng.random_bool(0.5) {
                    [2.0 * t.cos(), 2.0 * t.sin()]
                } else {
                    [2.0 - 2.0 * t.cos(), 1.0 - 2.0 * t.sin()]
                }
            }
            Self::Knot => {
                let t = rng.random_range(0.0..2.0 * PI);
                [
                    (t.sin() + 2.0 * (2.0 * t).sin()) / 1.5,
                    (t.cos() - 2.0 * (2.0 * t).cos()) / 1.5,
                ]
            }
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown target {s:?}, expected one of {}", names.join(", ")))
            })
    }
}

/// A target distribution with its noise level and sampling seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    /// Noise standard deviation.
    pub noise: f64,
    pub seed: u64,
}

impl TargetSpec {
    /// Target with the kind's default noise.
    pub fn new(kind: TargetKind, seed: u64) -> Self {
        Self {
            kind,
            noise: kind.default_noise(),
            seed,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Config(format!("noise must be >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Draws `n` points from the target; identical specs give identical samples.
pub fn sample_target(spec: &TargetSpec, n: usize) -> Result<SampleSet> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Config("target sample count must be >= 1".into()));
    }
    let mut rng = rng_from_seed(derive_seed(spec.seed, &[stream::TARGET]));
    let means = spec.kind.mixture_means().unwrap_or_default();
    let mut data = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let p = spec.kind.clean_point(&mut rng, &means);
        for c in p {
            let e: f64 = StandardNormal.sample(&mut rng);
            data.push(c + spec.noise * e);
        }
    }
    SampleSet::new(Tensor::matrix(n, 2, data)?)
}
