use super::network::{AugmentationMode, AugmentationNetwork};
use crate::autodiff::{adam_step, AdamState, Parameter, Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::metrics::{sample_unit_sphere, sliced_on_tape, Embedding, ProjectionSet};
use crate::rng::{derive_seed, stream};
use crate::samples::{check_pair, SampleSet};

/// `<g(x_n), theta_l>` for every sample and direction, as an `N x L` tensor.
pub fn spatial_radon_project<E: Embedding + ?Sized>(
    map: &E,
    x: &SampleSet,
    proj: &ProjectionSet,
) -> Result<Tensor> {
    let mut tape = Tape::new();
    let v = tape.constant(x.points().clone());
    let out = project_on_tape(&mut tape, map, v, proj)?;
    Ok(tape.value(out).clone())
}

fn project_on_tape<E: Embedding + ?Sized>(
    tape: &mut Tape,
    map: &E,
    x: Var,
    proj: &ProjectionSet,
) -> Result<Var> {
    let g = map.embed(tape, x)?;
    project_embedded(tape, g, proj)
}

fn project_embedded(tape: &mut Tape, g: Var, proj: &ProjectionSet) -> Result<Var> {
    let dim = tape.value(g).cols();
    if dim != proj.dim() {
        return Err(Error::contract(format!(
            "augmented dimension {dim} but directions have dimension {}",
            proj.dim()
        )));
    }
    let theta = tape.constant(proj.directions().clone());
    let t = tape.transpose(theta)?;
    tape.matmul(g, t)
}

/// Records the sliced distance between `g(X)` and `g(Y)` for a fixed map.
pub fn augmented_swd_on_tape<E: Embedding + ?Sized>(
    tape: &mut Tape,
    map: &E,
    x: Var,
    y: Var,
    proj: &ProjectionSet,
    k: f64,
) -> Result<Var> {
    let px = project_on_tape(tape, map, x, proj)?;
    let py = project_on_tape(tape, map, y, proj)?;
    sliced_on_tape(tape, px, py, k)
}

/// Sliced distance between the pushed-forward samples `g(X)` and `g(Y)`.
pub fn augmented_swd<E: Embedding + ?Sized>(
    map: &E,
    x: &SampleSet,
    y: &SampleSet,
    proj: &ProjectionSet,
    k: f64,
) -> Result<f64> {
    check_pair(x, y)?;
    let mut tape = Tape::new();
    let vx = tape.constant(x.points().clone());
    let vy = tape.constant(y.points().clone());
    let out = augmented_swd_on_tape(&mut tape, map, vx, vy, proj, k)?;
    Ok(tape.scalar(out).expect("scalar"))
}

fn regularizer_on_tape(tape: &mut Tape, gx: Var, gy: Var, lambda: f64) -> Result<Var> {
    let nx = tape.row_norms(gx)?;
    let ny = tape.row_norms(gy)?;
    let mx = tape.mean(nx)?;
    let my = tape.mean(ny)?;
    let s = tape.add(mx, my)?;
    tape.scale(s, lambda)
}

/// `lambda * (1/N) sum_n (||g(x_n)|| + ||g(y_n)||)`.
pub fn regularizer(net: &AugmentationNetwork, x: &SampleSet, y: &SampleSet) -> Result<f64> {
    check_pair(x, y)?;
    let mut tape = Tape::new();
    let vx = tape.constant(x.points().clone());
    let vy = tape.constant(y.points().clone());
    let gx = net.embed(&mut tape, vx)?;
    let gy = net.embed(&mut tape, vy)?;
    let out = regularizer_on_tape(&mut tape, gx, gy, net.lambda())?;
    Ok(tape.scalar(out).expect("scalar"))
}

/// Nodes of one recorded training objective.
pub struct ObjectiveNodes {
    pub objective: Var,
    pub distance: Var,
    pub regularizer: Var,
}

/// Records `SWD_k(g(X), g(Y)) - L_lambda` with the network parameters
/// supplied as nodes `w`, `b`.
pub fn objective_on_tape(
    tape: &mut Tape,
    net: &AugmentationNetwork,
    w: Var,
    b: Var,
    x: Var,
    y: Var,
    proj: &ProjectionSet,
    k: f64,
) -> Result<ObjectiveNodes> {
    let gx = net.embed_with(tape, x, w, b)?;
    let gy = net.embed_with(tape, y, w, b)?;
    let px = project_embedded(tape, gx, proj)?;
    let py = project_embedded(tape, gy, proj)?;
    let distance = sliced_on_tape(tape, px, py, k)?;
    let regularizer = regularizer_on_tape(tape, gx, gy, net.lambda())?;
    let objective = tape.sub(distance, regularizer)?;
    Ok(ObjectiveNodes {
        objective,
        distance,
        regularizer,
    })
}

/// Objective value and its gradients with respect to `(W, b)`.
pub fn objective_gradient(
    net: &AugmentationNetwork,
    x: &SampleSet,
    y: &SampleSet,
    proj: &ProjectionSet,
    k: f64,
) -> Result<(f64, Tensor, Tensor)> {
    check_pair(x, y)?;
    let mut tape = Tape::new();
    let w = tape.leaf(net.weights().clone());
    let b = tape.leaf(net.biases().clone());
    let vx = tape.constant(x.points().clone());
    let vy = tape.constant(y.points().clone());
    let nodes = objective_on_tape(&mut tape, net, w, b, vx, vy, proj, k)?;
    let value = tape.scalar(nodes.objective).expect("scalar");
    let grads = tape.backward(nodes.objective)?;
    Ok((
        value,
        grads.get(w).expect("leaf").clone(),
        grads.get(b).expect("leaf").clone(),
    ))
}

/// Per-iteration trace of the network training.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    /// Objective value at the start of each iteration.
    pub objective: Vec<f64>,
    /// `L_lambda` at the final parameters.
    pub final_regularizer: f64,
    pub seed: u64,
}

/// A network together with persistent Adam state for its weights and biases.
#[derive(Debug, Clone)]
pub struct NetworkTrainer {
    net: AugmentationNetwork,
    weights: Parameter,
    biases: Parameter,
    weight_state: AdamState,
    bias_state: AdamState,
}

impl NetworkTrainer {
    pub fn new(net: AugmentationNetwork, lr: f64) -> Self {
        let weights = Parameter::new(net.weights().clone());
        let biases = Parameter::new(net.biases().clone());
        Self {
            weight_state: AdamState::new(weights.value().shape(), lr),
            bias_state: AdamState::new(biases.value().shape(), lr),
            weights,
            biases,
            net,
        }
    }

    pub fn network(&self) -> &AugmentationNetwork {
        &self.net
    }

    pub fn into_network(self) -> AugmentationNetwork {
        self.net
    }

    /// One Adam ascent step on the objective; returns the objective before the step.
    pub fn ascend(&mut self, x: &SampleSet, y: &SampleSet, proj: &ProjectionSet, k: f64) -> Result<f64> {
        let (value, gw, gb) = objective_gradient(&self.net, x, y, proj, k)?;
        if !value.is_finite() {
            return Err(Error::Numeric("non-finite objective".into()));
        }
        self.weights.accumulate_scaled(&gw, -1.0)?;
        self.biases.accumulate_scaled(&gb, -1.0)?;
        adam_step(&mut self.weights, &mut self.weight_state)?;
        adam_step(&mut self.biases, &mut self.bias_state)?;
        self.net
            .set_parameters(self.weights.value().clone(), self.biases.value().clone());
        Ok(value)
    }

    /// `iterations` ascent steps, drawing `projections` fresh directions per
    /// step from the stream rooted at `seed`.
    pub fn train(
        &mut self,
        x: &SampleSet,
        y: &SampleSet,
        projections: usize,
        seed: u64,
        k: f64,
        iterations: usize,
    ) -> Result<Vec<f64>> {
        let dim = self.net.augmented_dim();
        let mut trace = Vec::with_capacity(iterations);
        for m in 0..iterations {
            let proj = sample_unit_sphere(projections, dim, derive_seed(seed, &[stream::TRAIN, m as u64]))?;
            let value = self.ascend(x, y, &proj, k).map_err(|e| match e {
                e if e.is_numeric() => Error::Numeric(format!("network training iteration {m}: {e}")),
                e => e,
            })?;
            trace.push(value);
        }
        Ok(trace)
    }
}

/// Maximizes `SWD_k(g(X), g(Y)) - L_lambda` over the network parameters with
/// `iterations` Adam steps, redrawing the directions every iteration.
#[allow(clippy::too_many_arguments)]
pub fn optimize_network(
    net: AugmentationNetwork,
    x: &SampleSet,
    y: &SampleSet,
    projections: usize,
    seed: u64,
    k: f64,
    iterations: usize,
    lr: f64,
) -> Result<(AugmentationNetwork, OptimizationReport)> {
    check_pair(x, y)?;
    if !(lr > 0.0) {
        return Err(Error::contract("learning rate must be positive"));
    }
    let mut trainer = NetworkTrainer::new(net, lr);
    let objective = trainer.train(x, y, projections, seed, k, iterations)?;
    let net = trainer.into_network();
    let final_regularizer = regularizer(&net, x, y)?;
    Ok((
        net,
        OptimizationReport {
            objective,
            final_regularizer,
            seed,
        },
    ))
}

/// Settings of one ASWD evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AswdConfig {
    /// Directions per draw (`L`).
    pub projections: usize,
    pub k: f64,
    pub lambda: f64,
    /// Network training iterations (`M`).
    pub iterations: usize,
    pub lr: f64,
    pub seed: u64,
    pub mode: AugmentationMode,
}

impl Default for AswdConfig {
    fn default() -> Self {
        Self {
            projections: 10,
            k: 2.0,
            lambda: 0.1,
            iterations: 10,
            lr: 0.002,
            seed: 0,
            mode: AugmentationMode::InjectiveConcat,
        }
    }
}

/// Seed of the initial network weights for an ASWD run.
pub fn network_init_seed(seed: u64) -> u64 {
    derive_seed(seed, &[stream::NET_INIT])
}

/// Seed of the post-training evaluation directions for an ASWD run.
pub fn evaluation_seed(seed: u64) -> u64 {
    derive_seed(seed, &[stream::EVAL])
}

/// Trains a seeded network on `(X, Y)` and returns the sliced distance of the
/// augmented samples on a fresh direction draw, plus the trained network.
pub fn aswd(x: &SampleSet, y: &SampleSet, config: &AswdConfig) -> Result<(f64, AugmentationNetwork)> {
    check_pair(x, y)?;
    let net = AugmentationNetwork::random(
        x.dim(),
        config.mode,
        config.lambda,
        network_init_seed(config.seed),
    )?;
    let (net, _) = optimize_network(
        net,
        x,
        y,
        config.projections,
        config.seed,
        config.k,
        config.iterations,
        config.lr,
    )?;
    let proj = sample_unit_sphere(
        config.projections,
        net.augmented_dim(),
        evaluation_seed(config.seed),
    )?;
    let d = augmented_swd(&net, x, y, &proj, config.k)?;
    Ok((d, net))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::IdentityMap;

    fn sets() -> (SampleSet, SampleSet) {
        (
            SampleSet::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]]).unwrap(),
            SampleSet::from_rows(&[vec![1.0, 1.0], vec![-2.0, 0.0], vec![0.3, 2.0]]).unwrap(),
        )
    }

    #[test]
    fn regularizer_by_hand() {
        let x = SampleSet::from_rows(&[vec![3.0, 4.0]]).unwrap();
        let y = SampleSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let net = AugmentationNetwork::zeros(2, AugmentationMode::InjectiveConcat, 0.25).unwrap();
        assert_eq!(regularizer(&net, &x, &y).unwrap(), 0.25 * 5.0);
        let net0 = net.clone().with_lambda(0.0);
        assert_eq!(regularizer(&net0, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn regularizer_linear_in_lambda() {
        let (x, y) = sets();
        let net = AugmentationNetwork::random(2, AugmentationMode::InjectiveConcat, 0.3, 1).unwrap();
        let a = regularizer(&net, &x, &y).unwrap();
        let b = regularizer(&net.clone().with_lambda(0.6), &x, &y).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn zero_iterations_leave_network_unchanged() {
        let (x, y) = sets();
        let net = AugmentationNetwork::random(2, AugmentationMode::InjectiveConcat, 0.1, 2).unwrap();
        let (out, report) = optimize_network(net.clone(), &x, &y, 5, 0, 2.0, 0, 0.01).unwrap();
        assert_eq!(out, net);
        assert!(report.objective.is_empty());
    }

    #[test]
    fn identity_projection_is_plain_inner_product() {
        let (x, _) = sets();
        let p = sample_unit_sphere(4, 2, 9).unwrap();
        let s = spatial_radon_project(&IdentityMap, &x, &p).unwrap();
        for n in 0..3 {
            for l in 0..4 {
                let direct = x.point(n)[0] * p.direction(l)[0] + x.point(n)[1] * p.direction(l)[1];
                assert_eq!(s.get(n, l).to_bits(), direct.to_bits());
            }
        }
    }

    #[test]
    fn orthogonal_direction_projects_to_zero() {
        let x = SampleSet::from_rows(&[vec![2.0, 0.0]]).unwrap();
        let p = ProjectionSet::from_directions(Tensor::matrix(1, 2, vec![0.0, 1.0]).unwrap(), 0).unwrap();
        assert_eq!(spatial_radon_project(&IdentityMap, &x, &p).unwrap().data(), &[0.0]);
    }

    #[test]
    fn aswd_zero_on_identical_sets() {
        let (x, _) = sets();
        let (d, _) = aswd(&x, &x, &AswdConfig::default()).unwrap();
        assert_eq!(d, 0.0);
    }
}
