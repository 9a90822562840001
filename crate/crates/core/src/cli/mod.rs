//! Command-line front end: flag and manifest resolution, parallel sweeps
//! and deterministic CSV output.

mod args;
mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;

use clap::Parser;

pub use args::Cli;
pub use config::ConfigFile;

use crate::continuum::ContinuumPotential;
use crate::dynamics::TransferSetup;
use crate::{Error, LatticeParams};

/// Failure of a run, carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "config", message: message.into() }
    }
}

impl fmt::Display for CliError {
    /// One line: `error=<kind> message=<text>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat: String = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error={} message={}", self.kind, flat)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NonConvergence(_) => (3, "non-convergence"),
            Error::EdgeContamination(_) => (4, "edge-contamination"),
            Error::Io(_) => (2, "io"),
            Error::InvalidParameter(_) => (2, "invalid"),
            Error::OutOfValidity(_) => (2, "out-of-validity"),
            Error::Degenerate(_) => (2, "degenerate"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

/// Fields at which a command is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Single(f64),
    /// Inclusive linear sweep of `1/F`.
    InverseSweep { min: f64, max: f64, count: usize },
}

impl FieldSpec {
    /// `1/F` values in sweep order.
    pub fn inv_f_points(&self) -> Vec<f64> {
        match *self {
            FieldSpec::Single(f) => vec![1.0 / f],
            FieldSpec::InverseSweep { min, max, count } => {
                (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect()
            }
        }
    }
}

/// Spectrum methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Truncated,
    Floquet,
    WuYang,
    Expansion,
    ExpansionFirst,
    Bm,
    Adiabatic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Truncated => "truncated",
            Method::Floquet => "floquet",
            Method::WuYang => "wu-yang",
            Method::Expansion => "expansion",
            Method::ExpansionFirst => "expansion-first",
            Method::Bm => "bm",
            Method::Adiabatic => "adiabatic",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        [
            Method::Truncated,
            Method::Floquet,
            Method::WuYang,
            Method::Expansion,
            Method::ExpansionFirst,
            Method::Bm,
            Method::Adiabatic,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| {
            CliError::config(format!(
                "unknown method `{s}`; use truncated, floquet, wu-yang, expansion, expansion-first, bm or adiabatic"
            ))
        })
    }
}

/// Fully resolved subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Bands { lattice: LatticeParams, n_points: usize },
    Spectrum { lattice: LatticeParams, field: FieldSpec, method: Method, scaled: bool, n_range: (i64, i64), n_sites: Option<usize> },
    Crossings { lattice: LatticeParams, range: (f64, f64), resolution: usize },
    GapEstimate { lattice: LatticeParams, field: FieldSpec },
    Resonances { lattice: LatticeParams, field: FieldSpec, periods: usize, kappa_grid: usize },
    Transfer { lattice: LatticeParams, setup: TransferSetup },
    ContinuumBands { potential: ContinuumPotential, cutoff: usize, n_k: usize, n_bands: usize },
    TbFit { potential: ContinuumPotential, cutoff: usize, n_k: usize },
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    /// Parses flags (first item is the program name) and merges the
    /// optional config file.
    pub fn from_args<I, S>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| {
            if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                return CliError::config("missing subcommand; see --help");
            }
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            CliError::config(first.trim_start_matches("error: ").to_string())
        })?;
        Self::resolve(cli)
    }

    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let output = file.pick(cli.output.clone(), "output")?;
        let workers = file.pick(cli.workers, "workers")?;
        if workers == Some(0) {
            return Err(CliError::config("worker count must be at least 1"));
        }
        let command = commands::resolve(cli.command, &file)?;
        Ok(Self { command, output, workers })
    }
}

/// Runs the command and writes its CSV output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| commands::execute(config))
}

/// Process entry point; returns the exit code.
pub fn main_entry() -> i32 {
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    match Cli::try_parse_from(&args) {
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            0
        }
        _ => match RunConfig::from_args(&args).and_then(|c| run(&c)) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{e}");
                e.code
            }
        },
    }
}
