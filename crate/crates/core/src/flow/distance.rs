use super::config::{FlowConfig, MetricId};
use crate::augmentation::{
    aswd, augmented_swd, evaluation_seed, network_init_seed, AswdConfig, AugmentationNetwork,
};
use crate::error::Result;
use crate::metrics::{
    gswd, gswd_nn, max_swd, sample_unit_sphere, DefiningFunction, IdentityMap, ProjectionNet,
};
use crate::samples::{check_pair, SampleSet};

/// Evaluates the configured metric between two sample sets.
///
/// Uses the estimator settings of `config` (projections, order, network
/// settings) and its seed; the particle and iteration fields are ignored.
/// Returns the trained network for the learned-augmentation metrics.
pub fn metric_distance(
    config: &FlowConfig,
    x: &SampleSet,
    y: &SampleSet,
) -> Result<(f64, Option<AugmentationNetwork>)> {
    config.validate()?;
    check_pair(x, y)?;
    let d = x.dim();
    let (l, k, seed) = (config.projections, config.k, config.seed);
    let sliced = |func: DefiningFunction| -> Result<f64> {
        let proj = sample_unit_sphere(l, func.projection_dim(d), evaluation_seed(seed))?;
        gswd(x, y, &func, &proj, k)
    };
    if let Some((mode, train)) = config.metric.augmentation() {
        let cfg = AswdConfig {
            projections: l,
            k,
            lambda: config.lambda,
            iterations: if train { config.inner_iterations } else { 0 },
            lr: config.inner_lr,
            seed,
            mode,
        };
        let (value, net) = aswd(x, y, &cfg)?;
        return Ok((value, Some(net)));
    }
    let value = match config.metric {
        MetricId::Swd | MetricId::GswdLinear => sliced(DefiningFunction::Linear)?,
        MetricId::GswdPoly3 => sliced(DefiningFunction::polynomial(d, config.poly_degree)?)?,
        MetricId::GswdCircular => sliced(DefiningFunction::circular(config.circular_radius)?)?,
        MetricId::GswdNn => gswd_nn(x, y, &ProjectionNet::random(d, l, network_init_seed(seed)), k)?,
        MetricId::MaxSwd => max_swd(x, y, k, config.max_steps, config.max_lr, evaluation_seed(seed))?,
        MetricId::AswdIdentity => {
            let proj = sample_unit_sphere(l, d, evaluation_seed(seed))?;
            augmented_swd(&IdentityMap, x, y, &proj, k)?
        }
        _ => unreachable!("augmentation metrics handled above"),
    };
    Ok((value, None))
}
