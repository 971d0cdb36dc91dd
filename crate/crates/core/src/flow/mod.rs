//! Particle flows toward synthetic 2-D targets driven by sliced distances,
//! scored by the exact 2-Wasserstein distance.

mod config;
mod distance;
mod matrix;
mod record;
mod run;
mod target;

pub use config::{FlowConfig, MetricId};
pub use distance::metric_distance;
pub use matrix::{
    median, run_experiment_matrix, summarize, summary_csv, CellOutcome, SummaryRow, SUMMARY_HEADER,
};
pub use record::{FlowRunRecord, RECORD_HEADER};
pub use run::{flow_loss_gradient, flow_run, initial_particles, standard_normal_samples};
pub use target::{sample_target, TargetKind, TargetSpec};
