//! Flow run persistence.
//!
//! A record is a CSV file whose first line carries the run settings as
//! `# key=value` pairs, followed by the header `iteration,w2,seconds` and
//! one row per iterate. Floats use shortest round-trip formatting so a
//! reloaded record compares equal to the original.

use super::config::{FlowConfig, MetricId};
use super::target::{TargetKind, TargetSpec};
use crate::error::{Error, Result};

pub const RECORD_HEADER: &str = "iteration,w2,seconds";

/// Exact `W_2` after every flow iteration (index 0 is the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRunRecord {
    pub config: FlowConfig,
    pub target: TargetSpec,
    w2: Vec<f64>,
    seconds: Vec<f64>,
    failure: Option<String>,
}

impl FlowRunRecord {
    pub fn new(config: FlowConfig, target: TargetSpec) -> Self {
        Self {
            config,
            target,
            w2: Vec::new(),
            seconds: Vec::new(),
            failure: None,
        }
    }

    pub(crate) fn push(&mut self, w2: f64, seconds: f64) {
        self.w2.push(w2);
        self.seconds.push(seconds);
    }

    pub(crate) fn fail(&mut self, message: String) {
        self.failure = Some(message.replace(['\n', '\r'], " "));
    }

    pub fn w2(&self) -> &[f64] {
        &self.w2
    }

    pub fn seconds(&self) -> &[f64] {
        &self.seconds
    }

    /// Why the run stopped early, if it did.
    pub fn failure(&self) -> Option<&str> {
        self.failure.as_deref()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none() && self.w2.len() == self.config.iterations + 1
    }

    pub fn initial_w2(&self) -> f64 {
        self.w2[0]
    }

    pub fn final_w2(&self) -> f64 {
        *self.w2.last().expect("record holds the initial value")
    }

    /// `metric_target_seed.csv`.
    pub fn file_name(&self) -> String {
        format!(
            "{}_{}_{}.csv",
            self.config.metric, self.target.kind, self.config.seed
        )
    }

    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "# metric={},target={},noise={:?},target_seed={},seed={},particles={},projections={},\
k={:?},lr={:?},iterations={},lambda={:?},inner_iterations={},inner_lr={:?},poly_degree={},\
circular_radius={:?},max_steps={},max_lr={:?},record_timing={}",
            c.metric,
            self.target.kind,
            self.target.noise,
            self.target.seed,
            c.seed,
            c.particles,
            c.projections,
            c.k,
            c.lr,
            c.iterations,
            c.lambda,
            c.inner_iterations,
            c.inner_lr,
            c.poly_degree,
            c.circular_radius,
            c.max_steps,
            c.max_lr,
            c.record_timing,
        );
        match &self.failure {
            None => out.push_str(",status=ok\n"),
            Some(msg) => out.push_str(&format!(",status=failed,failure={msg}\n")),
        }
        out.push_str(RECORD_HEADER);
        out.push('\n');
        for (i, (w, s)) in self.w2.iter().zip(&self.seconds).enumerate() {
            out.push_str(&format!("{i},{w:?},{s:?}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, meta) = lines.next().ok_or_else(|| Error::parse(1, "empty record"))?;
        let meta = meta
            .strip_prefix("# ")
            .ok_or_else(|| Error::parse(1, "expected `# key=value,...` settings line"))?;
        let (record_config, target, failure) = parse_meta(meta)?;
        let mut record = Self::new(record_config, target);
        record.failure = failure;

        match lines.next() {
            Some((_, h)) if h == RECORD_HEADER => {}
            Some((n, _)) => return Err(Error::parse(n, format!("expected header {RECORD_HEADER:?}"))),
            None => return Err(Error::parse(2, "missing column header")),
        }
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(n, format!("expected 3 fields, got {}", fields.len())));
            }
            let i: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(n, format!("invalid iteration {:?}", fields[0])))?;
            if i != record.w2.len() {
                return Err(Error::parse(n, format!("expected iteration {}, got {i}", record.w2.len())));
            }
            let w = nonnegative(n, fields[1])?;
            let s = nonnegative(n, fields[2])?;
            record.push(w, s);
        }
        if record.w2.is_empty() {
            return Err(Error::parse(2, "record has no iterations"));
        }
        if record.w2.len() > record.config.iterations + 1 {
            return Err(Error::parse(1, "more rows than configured iterations"));
        }
        Ok(record)
    }
}

fn nonnegative(line: usize, s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("invalid nonnegative value {s:?}"))),
    }
}

fn parse_meta(meta: &str) -> Result<(FlowConfig, TargetSpec, Option<String>)> {
    let bad = |msg: String| Error::parse(1, msg);
    let (meta, failure) = match meta.split_once(",failure=") {
        Some((head, msg)) => (head, Some(msg.to_string())),
        None => (meta, None),
    };
    let mut c = FlowConfig::default();
    let mut target = TargetSpec::new(TargetKind::EightGaussian, 0);
    let mut seen = Vec::new();
    let mut status = None;
    for pair in meta.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {pair:?}")))?;
        if seen.contains(&key) {
            return Err(bad(format!("duplicate key {key:?}")));
        }
        seen.push(key);
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::parse(1, format!("invalid value {v:?} for {key}")))
        }
        match key {
            "metric" => c.metric = value.parse::<MetricId>().map_err(|e| bad(e.to_string()))?,
            "target" => target.kind = value.parse::<TargetKind>().map_err(|e| bad(e.to_string()))?,
            "noise" => target.noise = num(key, value)?,
            "target_seed" => target.seed = num(key, value)?,
            "seed" => c.seed = num(key, value)?,
            "particles" => c.particles = num(key, value)?,
            "projections" => c.projections = num(key, value)?,
            "k" => c.k = num(key, value)?,
            "lr" => c.lr = num(key, value)?,
            "iterations" => c.iterations = num(key, value)?,
            "lambda" => c.lambda = num(key, value)?,
            "inner_iterations" => c.inner_iterations = num(key, value)?,
            "inner_lr" => c.inner_lr = num(key, value)?,
            "poly_degree" => c.poly_degree = num(key, value)?,
            "circular_radius" => c.circular_radius = num(key, value)?,
            "max_steps" => c.max_steps = num(key, value)?,
            "max_lr" => c.max_lr = num(key, value)?,
            "record_timing" => c.record_timing = num(key, value)?,
            "status" => status = Some(value),
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    const KEYS: usize = 19;
    if seen.len() != KEYS {
        return Err(bad(format!("expected {KEYS} settings, got {}", seen.len())));
    }
    match (status, &failure) {
        (Some("ok"), None) | (Some("failed"), Some(_)) => {}
        _ => return Err(bad("inconsistent status".into())),
    }
    c.validate().map_err(|e| bad(e.to_string()))?;
    target.validate().map_err(|e| bad(e.to_string()))?;
    Ok((c, target, failure))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FlowRunRecord {
        let mut r = FlowRunRecord::new(
            FlowConfig {
                iterations: 3,
                lambda: 0.1,
                ..FlowConfig::default()
            }
            .with_metric(MetricId::AswdNonInjective)
            .with_seed(42),
            TargetSpec::new(TargetKind::SwissRoll, 9),
        );
        r.push(3.25, 0.0);
        r.push(1.0 / 3.0, 0.125);
        r
    }

    #[test]
    fn round_trip() {
        let r = sample();
        assert_eq!(FlowRunRecord::from_csv(&r.to_csv()).unwrap(), r);
        let mut f = sample();
        f.fail("iteration 1: numeric, overflow\nin powf".into());
        let back = FlowRunRecord::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back, f);
        assert!(back.failure().unwrap().contains("overflow"));
    }

    #[test]
    fn file_name_pattern() {
        assert_eq!(sample().file_name(), "aswd-non-injective_swiss-roll_42.csv");
    }

    #[test]
    fn rejects_malformed_rows() {
        let text = sample().to_csv().replace("1,0.3333333333333333,", "2,0.3333333333333333,");
        assert!(matches!(FlowRunRecord::from_csv(&text), Err(Error::Parse { line: 4, .. })));
        let text = sample().to_csv().replace("3.25", "-3.25");
        assert!(FlowRunRecord::from_csv(&text).is_err());
        let text = sample().to_csv().replace("lambda=", "lamda=");
        assert!(FlowRunRecord::from_csv(&text).is_err());
    }
}
