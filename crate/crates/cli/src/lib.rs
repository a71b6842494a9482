//! Command-line driver for the `selfloc` solver: configuration, the
//! solve-to-lifetime pipeline and the files it leaves behind.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod pipeline;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use pipeline::run;
pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    /// A solver stage failed or did not converge.
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "selfloc", version, about = "Self-localized Dirac quasi-particle solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; defaults are used for anything left out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true, env = "SELFLOC_OUT_DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    /// Log every self-consistent iteration.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Ground state, energy integrals and constants; writes the profile and figure tables.
    Solve,
    /// Adds the excited level and the mass-ratio estimate.
    Muon,
    /// Tabulates the mixing coefficients of the moving state.
    Dispersion,
    /// Charge form factor and its fitted cutoff.
    Formfactor,
    /// Coherent-state overlap and lifetime estimate.
    Overlap,
    /// Every stage.
    All,
}

impl Cli {
    /// Configuration file merged with command-line overrides.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.grid_points {
            config.physics.scf.grid.n_points = n;
        }
        if let Some(x) = self.x_max {
            config.physics.scf.grid.x_max = x;
        }
        if let Some(dir) = &self.out {
            config.outputs.dir = dir.clone();
        }
        if self.verbose {
            config.verbosity = config.verbosity.max(config::Verbosity::Info);
        }
        config.validate()?;
        Ok(config)
    }
}
