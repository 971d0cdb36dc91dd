use rayon::prelude::*;

use super::config::{FlowConfig, MetricId};
use super::record::FlowRunRecord;
use super::run::flow_run;
use super::target::{TargetKind, TargetSpec};
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str = "metric,target,median_final_w2,seeds";

/// One `(metric, target, repeat)` cell of an experiment matrix.
#[derive(Debug)]
pub struct CellOutcome {
    pub metric: MetricId,
    pub target: TargetKind,
    pub seed: u64,
    pub result: Result<FlowRunRecord>,
}

impl CellOutcome {
    /// The record, if the run finished without a numeric failure.
    pub fn completed(&self) -> Option<&FlowRunRecord> {
        self.result.as_ref().ok().filter(|r| r.is_complete())
    }
}

/// Runs every metric on every target `repeats` times.
///
/// Repeat `r` uses seed `base_seed + r` for both the particles and the
/// target sample, so all metrics in a repeat start from the same state.
/// Cells run in parallel; the output order is metric, then target, then
/// repeat. A failing cell is recorded and the rest continue.
pub fn run_experiment_matrix(
    template: &FlowConfig,
    metrics: &[MetricId],
    targets: &[TargetSpec],
    repeats: usize,
    base_seed: u64,
) -> Result<Vec<CellOutcome>> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    let cells: Vec<(MetricId, TargetSpec, u64)> = metrics
        .iter()
        .flat_map(|&m| {
            targets.iter().flat_map(move |&t| {
                (0..repeats as u64).map(move |r| {
                    let seed = base_seed.wrapping_add(r);
                    (m, TargetSpec { seed, ..t }, seed)
                })
            })
        })
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(metric, target, seed)| {
            let config = template.clone().with_metric(metric).with_seed(seed);
            CellOutcome {
                metric,
                target: target.kind,
                seed,
                result: flow_run(&config, &target),
            }
        })
        .collect())
}

/// Median of the values; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Median final `W_2` of one metric on one target.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub metric: MetricId,
    pub target: TargetKind,
    /// `None` when no run of the cell completed.
    pub median_final_w2: Option<f64>,
    /// Completed runs contributing to the median.
    pub seeds: usize,
}

/// One row per `(metric, target)` in order of first appearance.
pub fn summarize(outcomes: &[CellOutcome]) -> Vec<SummaryRow> {
    let mut keys: Vec<(MetricId, TargetKind)> = Vec::new();
    for o in outcomes {
        if !keys.contains(&(o.metric, o.target)) {
            keys.push((o.metric, o.target));
        }
    }
    keys.into_iter()
        .map(|(metric, target)| {
            let finals: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.metric == metric && o.target == target)
                .filter_map(|o| o.completed().map(FlowRunRecord::final_w2))
                .collect();
            SummaryRow {
                metric,
                target,
                median_final_w2: median(&finals),
                seeds: finals.len(),
            }
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let m = r.median_final_w2.map(|v| format!("{v:?}")).unwrap_or_default();
        out.push_str(&format!("{},{},{m},{}\n", r.metric, r.target, r.seeds));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_by_hand() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn zero_repeats_rejected() {
        let t = [TargetSpec::new(TargetKind::Moon, 0)];
        assert!(run_experiment_matrix(&FlowConfig::default(), &[MetricId::Swd], &t, 0, 0).is_err());
    }
}
