use std::path::PathBuf;
use std::process::ExitCode;

use aswd::flow::MetricId;
use aswd_cli::commands::{cmd_ablation, cmd_bench, cmd_distance, cmd_flow, cmd_histogram, cmd_matrix};
use aswd_cli::{CliResult, RunManifest, Subcommand};
use clap::{Args, Parser, Subcommand as ClapSubcommand};

#[derive(Parser)]
#[command(name = "aswd", version, about = "Sliced Wasserstein distances, flows and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file of `section.key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Distance between two sample files (CSV, one point per row).
    Distance {
        x: PathBuf,
        y: PathBuf,
        /// Overrides `distance.metric`.
        #[arg(long)]
        metric: Option<MetricId>,
        #[command(flatten)]
        common: Common,
    },
    /// One particle flow towards a synthetic target.
    Flow(Common),
    /// Flows for every configured metric, target and repeat.
    Matrix(Common),
    /// Flows for the four learned-augmentation variants.
    Ablation(Common),
    /// Per-direction distance histograms between two shifted Gaussians.
    Histogram(Common),
    /// Median evaluation time over a grid of sizes.
    Bench(Common),
}

fn manifest(subcommand: Subcommand, c: Common) -> RunManifest {
    RunManifest {
        subcommand,
        config: c.config,
        out: c.out,
        seed: c.seed,
        force: c.force,
    }
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Distance { x, y, metric, common } => {
            cmd_distance(&manifest(Subcommand::Distance, common), &x, &y, metric)
        }
        Command::Flow(c) => cmd_flow(&manifest(Subcommand::Flow, c)),
        Command::Matrix(c) => cmd_matrix(&manifest(Subcommand::Matrix, c)),
        Command::Ablation(c) => cmd_ablation(&manifest(Subcommand::Ablation, c)),
        Command::Histogram(c) => cmd_histogram(&manifest(Subcommand::Histogram, c)),
        Command::Bench(c) => cmd_bench(&manifest(Subcommand::Bench, c)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
