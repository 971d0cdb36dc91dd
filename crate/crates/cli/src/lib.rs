//! Command-line front end: config files, sample files, output directories and
//! the experiment subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod manifest;

pub use config::{parse_config, parse_config_str, Config};
pub use error::{CliError, CliResult};
pub use manifest::{OutputDir, RunManifest, Subcommand};
