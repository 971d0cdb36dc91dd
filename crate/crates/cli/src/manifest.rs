use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{parse_config, Config};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Distance,
    Flow,
    Matrix,
    Ablation,
    Histogram,
    Bench,
}

/// What to run, where its configuration comes from and where it writes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: Subcommand,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub force: bool,
}

impl RunManifest {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            config: None,
            out: None,
            seed: None,
            force: false,
        }
    }

    /// The parsed config file (defaults without one) with the seed override applied.
    pub fn load_config(&self) -> CliResult<Config> {
        let mut config = match &self.config {
            Some(p) => parse_config(p)?,
            None => Config::default(),
        };
        if let Some(s) = self.seed {
            config.seed = s;
        }
        Ok(config)
    }

    pub fn output(&self) -> CliResult<Option<OutputDir>> {
        self.out
            .as_ref()
            .map(|p| OutputDir::create(p, self.force))
            .transpose()
    }

    pub fn require_output(&self) -> CliResult<OutputDir> {
        self.output()?
            .ok_or_else(|| CliError::config("this subcommand needs an output directory (--out DIR)"))
    }
}

/// An output directory that refuses to replace files unless forced.
#[derive(Debug, Clone)]
pub struct OutputDir {
    path: PathBuf,
    force: bool,
}

impl OutputDir {
    pub fn create(path: &Path, force: bool) -> CliResult<Self> {
        std::fs::create_dir_all(path)
            .map_err(|e| CliError::Other(format!("cannot create {}: {e}", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            force,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn target(&self, name: &str) -> CliResult<PathBuf> {
        if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
            return Err(CliError::Other(format!("invalid output file name {name:?}")));
        }
        Ok(self.path.join(name))
    }

    /// Fails if any of the files exists and overwriting is not forced.
    pub fn check_free(&self, names: &[String]) -> CliResult<()> {
        if self.force {
            return Ok(());
        }
        for name in names {
            let p = self.target(name)?;
            if p.exists() {
                return Err(CliError::Other(format!(
                    "{} exists; pass --force to overwrite",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let p = self.target(name)?;
        let mut opts = OpenOptions::new();
        opts.write(true);
        if self.force {
            opts.create(true).truncate(true);
        } else {
            opts.create_new(true);
        }
        let mut file = opts.open(&p).map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                CliError::Other(format!("{} exists; pass --force to overwrite", p.display()))
            } else {
                CliError::Other(format!("cannot write {}: {e}", p.display()))
            }
        })?;
        file.write_all(contents.as_bytes())?;
        Ok(p)
    }
}
