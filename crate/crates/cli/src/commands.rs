use std::path::Path;
use std::time::Instant;

use aswd::augmentation::{shift_histograms, ShiftHistogramSetup};
use aswd::flow::{
    flow_run, metric_distance, run_experiment_matrix, standard_normal_samples, summarize,
    summary_csv, CellOutcome, FlowRunRecord, MetricId, SummaryRow,
};
use aswd::metrics::ProjectionHistogram;
use aswd::rng::{derive_seed, stream};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::input::read_samples;
use crate::manifest::RunManifest;

pub const HISTOGRAM_HEADER: &str = "projector,bin_lower,bin_upper,count";
pub const BENCH_HEADER: &str = "metric,n,l,d,seconds";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const NETWORK_FILE: &str = "network.txt";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const BENCH_FILE: &str = "bench.csv";

/// Evaluates one metric between two sample files and returns the value as printed.
pub fn cmd_distance(
    manifest: &RunManifest,
    x_path: &Path,
    y_path: &Path,
    metric: Option<MetricId>,
) -> CliResult<String> {
    let config = manifest.load_config()?;
    let out = manifest.output()?;
    if let Some(out) = &out {
        out.check_free(&[NETWORK_FILE.into()])?;
    }
    let x = read_samples(x_path)?;
    let y = read_samples(y_path)?;
    if x.dim() != y.dim() {
        return Err(CliError::Input {
            source: y_path.display().to_string(),
            line: None,
            message: format!("dimension {} differs from {}", y.dim(), x.dim()),
        });
    }
    let flow = config
        .flow_config()
        .with_metric(metric.unwrap_or(config.distance_metric));
    let (value, net) = metric_distance(&flow, &x, &y)?;
    if let (Some(out), Some(net)) = (&out, &net) {
        out.write(NETWORK_FILE, &net.to_record())?;
    }
    Ok(format!("{value:?}"))
}

fn write_outcomes(manifest: &RunManifest, outcomes: &[CellOutcome]) -> CliResult<String> {
    let out = manifest.require_output()?;
    let mut log = String::new();
    let mut failed = 0;
    for o in outcomes {
        match &o.result {
            Ok(record) => {
                out.write(&record.file_name(), &record.to_csv())?;
                if let Some(msg) = record.failure() {
                    failed += 1;
                    eprintln!("{} {} seed {}: {msg}", o.metric, o.target, o.seed);
                }
            }
            Err(e) => {
                failed += 1;
                eprintln!("{} {} seed {}: {e}", o.metric, o.target, o.seed);
            }
        }
    }
    let rows: Vec<SummaryRow> = summarize(outcomes);
    out.write(SUMMARY_FILE, &summary_csv(&rows))?;
    if failed == outcomes.len() {
        return Err(match outcomes.iter().find_map(|o| o.result.as_ref().err()) {
            Some(e) => CliError::from(e.clone()),
            None => CliError::Numeric(format!("all {failed} runs failed")),
        });
    }
    for r in &rows {
        let m = r.median_final_w2.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
        log.push_str(&format!("{} {} median final W2 {m} over {} runs\n", r.metric, r.target, r.seeds));
    }
    Ok(log.trim_end().to_string())
}

fn planned_files(config: &Config, metrics: &[MetricId], repeats: usize) -> Vec<String> {
    let mut names = vec![SUMMARY_FILE.to_string()];
    for &m in metrics {
        for &t in &config.targets {
            for r in 0..repeats as u64 {
                let spec = config.target_spec(t, config.seed.wrapping_add(r));
                let flow = config.flow_config().with_metric(m).with_seed(spec.seed);
                names.push(FlowRunRecord::new(flow, spec).file_name());
            }
        }
    }
    names
}

fn run_matrix(manifest: &RunManifest, config: &Config, metrics: &[MetricId], repeats: usize) -> CliResult<String> {
    let out = manifest.require_output()?;
    out.check_free(&planned_files(config, metrics, repeats))?;
    let targets: Vec<_> = config
        .targets
        .iter()
        .map(|&t| config.target_spec(t, config.seed))
        .collect();
    let outcomes = run_experiment_matrix(&config.flow_config(), metrics, &targets, repeats, config.seed)?;
    write_outcomes(manifest, &outcomes)
}

/// A single flow of `flow.metric` towards `flow.target`.
pub fn cmd_flow(manifest: &RunManifest) -> CliResult<String> {
    let config = manifest.load_config()?;
    let flow = config.flow_config();
    let spec = config.target_spec(config.target, config.seed);
    let out = manifest.require_output()?;
    out.check_free(&[
        SUMMARY_FILE.into(),
        FlowRunRecord::new(flow.clone(), spec).file_name(),
    ])?;
    let outcome = CellOutcome {
        metric: flow.metric,
        target: spec.kind,
        seed: config.seed,
        result: flow_run(&flow, &spec),
    };
    write_outcomes(manifest, &[outcome])
}

/// Every `experiment.metrics` entry on every `experiment.targets` entry, `experiment.repeats` times.
pub fn cmd_matrix(manifest: &RunManifest) -> CliResult<String> {
    let config = manifest.load_config()?;
    run_matrix(manifest, &config, &config.metrics.clone(), config.repeats)
}

/// The four learned-augmentation variants on the configured targets.
pub fn cmd_ablation(manifest: &RunManifest) -> CliResult<String> {
    let config = manifest.load_config()?;
    run_matrix(manifest, &config, &MetricId::ABLATION, config.repeats)
}

/// The histogram experiment with the configured settings.
pub fn histograms(config: &Config) -> CliResult<(ProjectionHistogram, ProjectionHistogram)> {
    let (h, f) = (&config.histogram, &config.flow);
    Ok(shift_histograms(&ShiftHistogramSetup {
        dim: h.dim,
        shift: h.shift,
        samples: h.samples,
        projections: h.projections,
        bins: h.bins,
        k: f.k,
        lambda: f.lambda,
        iterations: f.inner_iterations,
        lr: f.inner_lr,
        seed: config.seed,
    })?)
}

pub fn histogram_csv(swd: &ProjectionHistogram, aswd: &ProjectionHistogram) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for (name, h) in [("swd", swd), ("aswd", aswd)] {
        for (i, c) in h.counts.iter().enumerate() {
            out.push_str(&format!("{name},{:?},{:?},{c}\n", h.edges[i], h.edges[i + 1]));
        }
    }
    out
}

pub fn cmd_histogram(manifest: &RunManifest) -> CliResult<String> {
    let config = manifest.load_config()?;
    let out = manifest.output()?;
    if let Some(out) = &out {
        out.check_free(&[HISTOGRAM_FILE.into()])?;
    }
    let (swd, aswd) = histograms(&config)?;
    let csv = histogram_csv(&swd, &aswd);
    match out {
        Some(out) => {
            out.write(HISTOGRAM_FILE, &csv)?;
            Ok(format!("swd mean {:.6}\naswd mean {:.6}", swd.mean(), aswd.mean()))
        }
        None => Ok(csv.trim_end().to_string()),
    }
}

/// One row of the timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub metric: MetricId,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    /// Median wall-clock seconds per evaluation.
    pub seconds: f64,
}

pub fn bench(config: &Config) -> CliResult<Vec<BenchRow>> {
    let b = &config.bench;
    let mut rows = Vec::new();
    for &metric in &b.metrics {
        for &n in &b.sizes {
            let x = standard_normal_samples(n, b.dim, derive_seed(config.seed, &[stream::PARTICLES]))?;
            let y = standard_normal_samples(n, b.dim, derive_seed(config.seed, &[stream::TARGET]))?;
            for &l in &b.projections {
                let mut flow = config.flow_config().with_metric(metric);
                flow.projections = l;
                let mut times = Vec::with_capacity(b.repeats);
                for _ in 0..b.repeats {
                    let start = Instant::now();
                    std::hint::black_box(metric_distance(&flow, &x, &y)?);
                    times.push(start.elapsed().as_secs_f64());
                }
                let seconds = aswd::flow::median(&times).unwrap_or(0.0);
                rows.push(BenchRow {
                    metric,
                    n,
                    l,
                    d: b.dim,
                    seconds,
                });
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{:?}\n", r.metric, r.n, r.l, r.d, r.seconds));
    }
    out
}

pub fn cmd_bench(manifest: &RunManifest) -> CliResult<String> {
    let config = manifest.load_config()?;
    let out = manifest.output()?;
    if let Some(out) = &out {
        out.check_free(&[BENCH_FILE.into()])?;
    }
    let csv = bench_csv(&bench(&config)?);
    if let Some(out) = out {
        out.write(BENCH_FILE, &csv)?;
    }
    Ok(csv.trim_end().to_string())
}
