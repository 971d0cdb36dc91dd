use std::fmt;
use std::str::FromStr;

use crate::augmentation::AugmentationMode;
use crate::error::{Error, Result};
use crate::metrics::{DEFAULT_MAX_SWD_LR, DEFAULT_MAX_SWD_STEPS};

/// Distance driving a particle flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Swd,
    GswdLinear,
    GswdPoly3,
    GswdCircular,
    GswdNn,
    MaxSwd,
    /// Trained network, injective concatenation.
    Aswd,
    /// Randomly initialized network that is never trained.
    AswdVanilla,
    /// Trained network without the input concatenation.
    AswdNonInjective,
    AswdVanillaNonInjective,
    /// Identity augmentation; reproduces `Swd` exactly.
    AswdIdentity,
}

impl MetricId {
    pub const ALL: [MetricId; 11] = [
        Self::Swd,
        Self::GswdLinear,
        Self::GswdPoly3,
        Self::GswdCircular,
        Self::GswdNn,
        Self::MaxSwd,
        Self::Aswd,
        Self::AswdVanilla,
        Self::AswdNonInjective,
        Self::AswdVanillaNonInjective,
        Self::AswdIdentity,
    ];

    /// The metrics compared in the flow experiment.
    pub const FLOW: [MetricId; 6] = [
        Self::Swd,
        Self::GswdPoly3,
        Self::GswdCircular,
        Self::GswdNn,
        Self::MaxSwd,
        Self::Aswd,
    ];

    /// The augmentation variants compared in the ablation.
    pub const ABLATION: [MetricId; 4] = [
        Self::Aswd,
        Self::AswdVanilla,
        Self::AswdNonInjective,
        Self::AswdVanillaNonInjective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Swd => "swd",
            Self::GswdLinear => "gswd-linear",
            Self::GswdPoly3 => "gswd-poly3",
            Self::GswdCircular => "gswd-circular",
            Self::GswdNn => "gswd-nn",
            Self::MaxSwd => "max-swd",
            Self::Aswd => "aswd",
            Self::AswdVanilla => "aswd-vanilla",
            Self::AswdNonInjective => "aswd-non-injective",
            Self::AswdVanillaNonInjective => "aswd-vanilla-non-injective",
            Self::AswdIdentity => "aswd-identity",
        }
    }

    /// Network mode and whether it is trained, for the learned-augmentation variants.
    pub fn augmentation(self) -> Option<(AugmentationMode, bool)> {
        match self {
            Self::Aswd => Some((AugmentationMode::InjectiveConcat, true)),
            Self::AswdVanilla => Some((AugmentationMode::InjectiveConcat, false)),
            Self::AswdNonInjective => Some((AugmentationMode::Raw, true)),
            Self::AswdVanillaNonInjective => Some((AugmentationMode::Raw, false)),
            _ => None,
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|m| m.name()).collect();
            Error::Config(format!("unknown metric {s:?}, expected one of {}", names.join(", ")))
        })
    }
}

/// Settings of one particle flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub metric: MetricId,
    /// Particle count `N` (also the target sample count).
    pub particles: usize,
    /// Directions per evaluation `L`; the output width for `gswd-nn`.
    pub projections: usize,
    pub k: f64,
    /// Adam learning rate of the particle update.
    pub lr: f64,
    /// Outer iterations `T`.
    pub iterations: usize,
    pub lambda: f64,
    /// Network updates per outer iteration `M`.
    pub inner_iterations: usize,
    pub inner_lr: f64,
    pub poly_degree: u32,
    pub circular_radius: f64,
    pub max_steps: usize,
    pub max_lr: f64,
    pub seed: u64,
    /// Record elapsed wall-clock seconds; when off the column is all zeros
    /// and records are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            metric: MetricId::Swd,
            particles: 500,
            projections: 10,
            k: 2.0,
            lr: 0.002,
            iterations: 500,
            lambda: 0.1,
            inner_iterations: 10,
            inner_lr: 0.002,
            poly_degree: 3,
            circular_radius: 1.0,
            max_steps: DEFAULT_MAX_SWD_STEPS,
            max_lr: DEFAULT_MAX_SWD_LR,
            seed: 0,
            record_timing: false,
        }
    }
}

impl FlowConfig {
    pub fn with_metric(mut self, metric: MetricId) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if self.particles == 0 {
            return Err(Error::Config("particles must be >= 1".into()));
        }
        if self.projections == 0 {
            return Err(Error::Config("projections must be >= 1".into()));
        }
        if !(self.k >= 1.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("k must be >= 1, got {}", self.k)));
        }
        positive("lr", self.lr)?;
        positive("inner_lr", self.inner_lr)?;
        positive("circular_radius", self.circular_radius)?;
        positive("max_lr", self.max_lr)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.poly_degree % 2 == 0 {
            return Err(Error::Config(format!(
                "polynomial degree must be odd, got {}",
                self.poly_degree
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_names_round_trip() {
        for m in MetricId::ALL {
            assert_eq!(m.name().parse::<MetricId>().unwrap(), m);
        }
        assert!("dswd".parse::<MetricId>().is_err());
    }

    #[test]
    fn defaults_valid() {
        let c = FlowConfig::default();
        assert_eq!((c.particles, c.k, c.lr, c.lambda, c.inner_iterations), (500, 2.0, 0.002, 0.1, 10));
        c.validate().unwrap();
    }

    #[test]
    fn validation_names_field() {
        let c = FlowConfig {
            lr: -1.0,
            ..FlowConfig::default()
        };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("lr must be positive"), "{msg}");
        let c = FlowConfig {
            poly_degree: 2,
            ..FlowConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
