use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};

use super::config::{FlowConfig, MetricId};
use super::record::FlowRunRecord;
use super::target::{sample_target, TargetSpec};
use crate::augmentation::{augmented_swd_on_tape, network_init_seed, AugmentationNetwork, NetworkTrainer};
use crate::autodiff::{adam_step, AdamState, Parameter, Tape, Tensor, Var};
use crate::error::Result;
use crate::exact_ot::{exact_wasserstein_with, AssignmentSolver};
use crate::metrics::{
    gswd_nn_on_tape, gswd_on_tape, max_swd_direction, sample_unit_sphere, DefiningFunction,
    IdentityMap, ProjectionNet,
};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::samples::SampleSet;

/// `n` points from `N(0, I_dim)`.
pub fn standard_normal_samples(n: usize, dim: usize, seed: u64) -> Result<SampleSet> {
    let mut rng = rng_from_seed(seed);
    let data = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    SampleSet::from_flat(n, dim, data)
}

/// Initial particle positions of a flow with the given seed.
pub fn initial_particles(config: &FlowConfig) -> Result<SampleSet> {
    standard_normal_samples(config.particles, 2, derive_seed(config.seed, &[stream::PARTICLES]))
}

/// Per-metric state of the flow loss.
enum Loss {
    Sliced(DefiningFunction),
    Net,
    Max,
    Augmented { trainer: NetworkTrainer, train: bool },
    Identity,
}

impl Loss {
    fn new(config: &FlowConfig, dim: usize) -> Result<Self> {
        if let Some((mode, train)) = config.metric.augmentation() {
            let net = AugmentationNetwork::random(dim, mode, config.lambda, network_init_seed(config.seed))?;
            return Ok(Self::Augmented {
                trainer: NetworkTrainer::new(net, config.inner_lr),
                train,
            });
        }
        Ok(match config.metric {
            MetricId::Swd | MetricId::GswdLinear => Self::Sliced(DefiningFunction::Linear),
            MetricId::GswdPoly3 => Self::Sliced(DefiningFunction::polynomial(dim, config.poly_degree)?),
            MetricId::GswdCircular => Self::Sliced(DefiningFunction::circular(config.circular_radius)?),
            MetricId::GswdNn => Self::Net,
            MetricId::MaxSwd => Self::Max,
            MetricId::AswdIdentity => Self::Identity,
            _ => unreachable!("augmentation metrics handled above"),
        })
    }

    /// Records the loss at iteration `t` between the particle node `x` and target `y`.
    fn record(
        &mut self,
        tape: &mut Tape,
        x: Var,
        y: Var,
        particles: &SampleSet,
        target: &SampleSet,
        config: &FlowConfig,
        t: usize,
    ) -> Result<Var> {
        let seed = derive_seed(config.seed, &[stream::OUTER, t as u64]);
        let dim = particles.dim();
        let k = config.k;
        match self {
            Self::Sliced(func) => {
                let proj = sample_unit_sphere(config.projections, func.projection_dim(dim), seed)?;
                gswd_on_tape(tape, x, y, func, &proj, k)
            }
            Self::Net => {
                let net = ProjectionNet::random(dim, config.projections, seed);
                gswd_nn_on_tape(tape, x, y, &net, k)
            }
            Self::Max => {
                let best = max_swd_direction(particles, target, k, config.max_steps, config.max_lr, seed)?;
                gswd_on_tape(tape, x, y, &DefiningFunction::Linear, &best.direction, k)
            }
            Self::Augmented { trainer, train } => {
                if *train {
                    trainer.train(
                        particles,
                        target,
                        config.projections,
                        derive_seed(config.seed, &[stream::TRAIN, t as u64]),
                        k,
                        config.inner_iterations,
                    )?;
                }
                let net = trainer.network();
                let proj = sample_unit_sphere(config.projections, net.augmented_dim(), seed)?;
                augmented_swd_on_tape(tape, net, x, y, &proj, k)
            }
            Self::Identity => {
                let proj = sample_unit_sphere(config.projections, dim, seed)?;
                augmented_swd_on_tape(tape, &IdentityMap, x, y, &proj, k)
            }
        }
    }
}

/// Evolves `N(0, I_2)` particles toward a fixed target sample by Adam
/// descent on the configured distance, scoring every iterate with the exact
/// 2-Wasserstein distance.
///
/// Invalid configurations are errors. A numeric failure mid-run ends the run
/// and returns the trace so far with the failure recorded.
pub fn flow_run(config: &FlowConfig, target: &TargetSpec) -> Result<FlowRunRecord> {
    config.validate()?;
    let y = sample_target(target, config.particles)?;
    let mut particles = initial_particles(config)?;
    let mut solver = AssignmentSolver::new();
    let start = Instant::now();
    let elapsed = |start: &Instant| {
        if config.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    };

    let mut record = FlowRunRecord::new(config.clone(), *target);
    record.push(exact_wasserstein_with(&mut solver, &particles, &y, 2.0)?, elapsed(&start));

    let mut loss = Loss::new(config, particles.dim())?;
    let mut param = Parameter::new(particles.points().clone());
    let mut adam = AdamState::new(particles.points().shape(), config.lr);
    for t in 0..config.iterations {
        let mut step = || -> Result<(SampleSet, f64)> {
            let mut tape = Tape::new();
            let vx = tape.leaf(particles.points().clone());
            let vy = tape.constant(y.points().clone());
            let out = loss.record(&mut tape, vx, vy, &particles, &y, config, t)?;
            let grads = tape.backward(out)?;
            param.accumulate(grads.get(vx).expect("leaf"))?;
            adam_step(&mut param, &mut adam)?;
            let next = SampleSet::new(param.value().clone())?;
            let w2 = exact_wasserstein_with(&mut solver, &next, &y, 2.0)?;
            Ok((next, w2))
        };
        match step() {
            Ok((next, w2)) => {
                particles = next;
                record.push(w2, elapsed(&start));
            }
            Err(e) => {
                record.fail(format!("update to iteration {}: {e}", t + 1));
                break;
            }
        }
    }
    Ok(record)
}

/// Particle gradient of the configured flow loss at iteration 0, for
/// checking against finite differences.
pub fn flow_loss_gradient(
    config: &FlowConfig,
    particles: &SampleSet,
    target: &SampleSet,
) -> Result<(f64, Tensor)> {
    let mut loss = Loss::new(config, particles.dim())?;
    let mut tape = Tape::new();
    let vx = tape.leaf(particles.points().clone());
    let vy = tape.constant(target.points().clone());
    let out = loss.record(&mut tape, vx, vy, particles, target, config, 0)?;
    let value = tape.scalar(out).expect("scalar");
    let grads = tape.backward(out)?;
    Ok((value, grads.get(vx).expect("leaf").clone()))
}

