//! Plain-text run configuration: one `section.key = value` per line, `#`
//! starts a comment, absent keys take their defaults.

use std::path::Path;

use aswd::flow::{FlowConfig, MetricId, TargetKind, TargetSpec};

use crate::error::{CliError, CliResult};

/// Settings of the histogram command.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramConfig {
    pub dim: usize,
    /// Norm of the mean shift between the two Gaussians.
    pub shift: f64,
    pub samples: usize,
    pub projections: usize,
    pub bins: usize,
}

/// Settings of the timing benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub metrics: Vec<MetricId>,
    pub sizes: Vec<usize>,
    pub projections: Vec<usize>,
    pub dim: usize,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    /// Estimator and flow settings (`metric.*` and `flow.*` keys).
    pub flow: FlowConfig,
    pub target: TargetKind,
    /// Noise standard deviation; the target's default when absent.
    pub noise: Option<f64>,
    pub distance_metric: MetricId,
    pub metrics: Vec<MetricId>,
    pub targets: Vec<TargetKind>,
    pub repeats: usize,
    pub histogram: HistogramConfig,
    pub bench: BenchConfig,
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            flow: FlowConfig::default(),
            target: TargetKind::EightGaussian,
            noise: None,
            distance_metric: MetricId::Swd,
            metrics: MetricId::FLOW.to_vec(),
            targets: vec![
                TargetKind::EightGaussian,
                TargetKind::SwissRoll,
                TargetKind::Moon,
                TargetKind::Knot,
            ],
            repeats: 20,
            histogram: HistogramConfig {
                dim: 100,
                shift: 5.0,
                samples: 500,
                projections: 1000,
                bins: 50,
            },
            bench: BenchConfig {
                metrics: vec![MetricId::Swd],
                sizes: vec![250, 500, 1000, 2000],
                projections: vec![10, 100],
                dim: 2,
                repeats: 5,
            },
            timing: false,
        }
    }
}

impl Config {
    /// Target spec for `kind` with the configured noise and the given seed.
    pub fn target_spec(&self, kind: TargetKind, seed: u64) -> TargetSpec {
        let spec = TargetSpec::new(kind, seed);
        match self.noise {
            Some(n) => spec.with_noise(n),
            None => spec,
        }
    }

    /// The flow settings with the run seed and timing flag applied.
    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            seed: self.seed,
            record_timing: self.timing,
            ..self.flow.clone()
        }
    }

    /// Writes every key, in a form [`parse_config_str`] reads back to an equal config.
    pub fn emit(&self) -> String {
        let f = &self.flow;
        let names = |m: &[MetricId]| m.iter().map(|m| m.name()).collect::<Vec<_>>().join(",");
        let targets = self.targets.iter().map(|t| t.name()).collect::<Vec<_>>().join(",");
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("run.seed", self.seed.to_string());
        put("metric.projections", f.projections.to_string());
        put("metric.k", format!("{:?}", f.k));
        put("metric.lambda", format!("{:?}", f.lambda));
        put("metric.iterations", f.inner_iterations.to_string());
        put("metric.lr", format!("{:?}", f.inner_lr));
        put("metric.poly_degree", f.poly_degree.to_string());
        put("metric.circular_radius", format!("{:?}", f.circular_radius));
        put("metric.max_steps", f.max_steps.to_string());
        put("metric.max_lr", format!("{:?}", f.max_lr));
        put("flow.metric", f.metric.name().into());
        put("flow.particles", f.particles.to_string());
        put("flow.lr", format!("{:?}", f.lr));
        put("flow.iterations", f.iterations.to_string());
        put("flow.target", self.target.name().into());
        if let Some(n) = self.noise {
            put("flow.noise", format!("{n:?}"));
        }
        put("distance.metric", self.distance_metric.name().into());
        put("experiment.metrics", names(&self.metrics));
        put("experiment.targets", targets);
        put("experiment.repeats", self.repeats.to_string());
        put("histogram.dim", self.histogram.dim.to_string());
        put("histogram.shift", format!("{:?}", self.histogram.shift));
        put("histogram.samples", self.histogram.samples.to_string());
        put("histogram.projections", self.histogram.projections.to_string());
        put("histogram.bins", self.histogram.bins.to_string());
        put("bench.metrics", names(&self.bench.metrics));
        put("bench.sizes", join(&self.bench.sizes));
        put("bench.projections", join(&self.bench.projections));
        put("bench.dim", self.bench.dim.to_string());
        put("bench.repeats", self.bench.repeats.to_string());
        put("output.timing", self.timing.to_string());
        out
    }

    fn validate(&self) -> Result<(), String> {
        self.flow.validate().map_err(|e| match e {
            aswd::Error::Config(m) => m,
            other => other.to_string(),
        })?;
        if let Some(n) = self.noise {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(format!("noise must be >= 0, got {n}"));
            }
        }
        let nonzero = [
            ("experiment.repeats", self.repeats),
            ("histogram.dim", self.histogram.dim),
            ("histogram.samples", self.histogram.samples),
            ("histogram.projections", self.histogram.projections),
            ("histogram.bins", self.histogram.bins),
            ("bench.dim", self.bench.dim),
            ("bench.repeats", self.bench.repeats),
        ];
        if let Some((k, _)) = nonzero.iter().find(|(_, v)| *v == 0) {
            return Err(format!("{k} must be >= 1"));
        }
        if !(self.histogram.shift >= 0.0 && self.histogram.shift.is_finite()) {
            return Err(format!("histogram.shift must be >= 0, got {}", self.histogram.shift));
        }
        for (k, list) in [
            ("experiment.metrics", self.metrics.len()),
            ("experiment.targets", self.targets.len()),
            ("bench.metrics", self.bench.metrics.len()),
            ("bench.sizes", self.bench.sizes.len()),
            ("bench.projections", self.bench.projections.len()),
        ] {
            if list == 0 {
                return Err(format!("{k} must not be empty"));
            }
        }
        if self.bench.sizes.contains(&0) || self.bench.projections.contains(&0) {
            return Err("bench sizes and projections must be >= 1".into());
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, domain: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}: expected {domain}"))
}

fn parse_list<T>(key: &str, value: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if value.trim().is_empty() {
        return Err(format!("{key} must not be empty"));
    }
    value.split(',').map(|v| f(v.trim())).collect()
}

fn apply(c: &mut Config, key: &str, v: &str) -> Result<(), String> {
    let metric = |v: &str| v.parse::<MetricId>().map_err(|e| strip(e));
    let target = |v: &str| v.parse::<TargetKind>().map_err(|e| strip(e));
    const COUNT: &str = "a nonnegative integer";
    const REAL: &str = "a number";
    match key {
        "run.seed" => c.seed = parse_value(key, v, COUNT)?,
        "metric.projections" => c.flow.projections = parse_value(key, v, COUNT)?,
        "metric.k" => c.flow.k = parse_value(key, v, REAL)?,
        "metric.lambda" => c.flow.lambda = parse_value(key, v, REAL)?,
        "metric.iterations" => c.flow.inner_iterations = parse_value(key, v, COUNT)?,
        "metric.lr" => c.flow.inner_lr = parse_value(key, v, REAL)?,
        "metric.poly_degree" => c.flow.poly_degree = parse_value(key, v, "an odd positive integer")?,
        "metric.circular_radius" => c.flow.circular_radius = parse_value(key, v, REAL)?,
        "metric.max_steps" => c.flow.max_steps = parse_value(key, v, COUNT)?,
        "metric.max_lr" => c.flow.max_lr = parse_value(key, v, REAL)?,
        "flow.metric" => c.flow.metric = metric(v)?,
        "flow.particles" => c.flow.particles = parse_value(key, v, COUNT)?,
        "flow.lr" => c.flow.lr = parse_value(key, v, REAL)?,
        "flow.iterations" => c.flow.iterations = parse_value(key, v, COUNT)?,
        "flow.target" => c.target = target(v)?,
        "flow.noise" => c.noise = Some(parse_value(key, v, REAL)?),
        "distance.metric" => c.distance_metric = metric(v)?,
        "experiment.metrics" => c.metrics = parse_list(key, v, metric)?,
        "experiment.targets" => c.targets = parse_list(key, v, target)?,
        "experiment.repeats" => c.repeats = parse_value(key, v, COUNT)?,
        "histogram.dim" => c.histogram.dim = parse_value(key, v, COUNT)?,
        "histogram.shift" => c.histogram.shift = parse_value(key, v, REAL)?,
        "histogram.samples" => c.histogram.samples = parse_value(key, v, COUNT)?,
        "histogram.projections" => c.histogram.projections = parse_value(key, v, COUNT)?,
        "histogram.bins" => c.histogram.bins = parse_value(key, v, COUNT)?,
        "bench.metrics" => c.bench.metrics = parse_list(key, v, metric)?,
        "bench.sizes" => c.bench.sizes = parse_list(key, v, |s| parse_value(key, s, COUNT))?,
        "bench.projections" => c.bench.projections = parse_list(key, v, |s| parse_value(key, s, COUNT))?,
        "bench.dim" => c.bench.dim = parse_value(key, v, COUNT)?,
        "bench.repeats" => c.bench.repeats = parse_value(key, v, COUNT)?,
        "output.timing" => c.timing = parse_value(key, v, "true or false")?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn strip(e: aswd::Error) -> String {
    match e {
        aswd::Error::Config(m) => m,
        other => other.to_string(),
    }
}

pub fn parse_config_str(text: &str) -> CliResult<Config> {
    let mut config = Config::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| CliError::Config {
            line: Some(line_no),
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `section.key = value`, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !key.contains('.') {
            return Err(err(format!("key `{key}` is not of the form section.key")));
        }
        if seen.iter().any(|k| k == key) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        apply(&mut config, key, value).map_err(err)?;
    }
    config.validate().map_err(CliError::config)?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> CliResult<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}
