//! Command-line front end. The binary only parses arguments and maps the
//! outcome to an exit code; everything else lives here so it can be tested.

use crate::config::{ConfigError, RunConfig, SchemaError, DEFAULT_OUTPUT_DIR};
use crate::hvz::{
    essential_spectrum, fibering_subspace, localize, localized_spectrum, noncommute_demo, pathology_demo,
    truncated_box, unclosed_union_demo, HvzError, TRUNCATION_EIGS,
};
use crate::report::{
    cells_csv, eigenvalues_csv, intervals_csv, refinement_csv, LocalizedSpecView, LocalizedSpectrumView, OutputDir,
    ReportError,
};
use crate::spectra::{GridSpec, SpectraError};
use crate::verify::{self, VerifyError};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use thiserror::Error;

pub const ENV_OUT: &str = "HVZLAB_OUT";
pub const ENV_THREADS: &str = "HVZLAB_THREADS";

/// Radii of the pathology demo.
pub const PATHOLOGY_RADII: [f64; 3] = [10.0, 20.0, 40.0];

#[derive(Debug, Parser)]
#[command(name = "hvzlab", version, about = "Essential spectra from localizations at infinity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON run configuration (optional for `verify` and `demo`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Direction as comma-separated coordinates, e.g. "1,-2".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Output directory (overrides the config and HVZLAB_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized suites (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (overrides HVZLAB_THREADS; default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write the localized Hamiltonian at a direction.
    Localize,
    /// Spectrum of the localization at `--alpha`, or low eigenvalues of
    /// the truncated Hamiltonian when no direction is given.
    Spectrum,
    /// Estimate the essential spectrum.
    Hvz,
    /// Run invariant suites.
    Verify {
        /// Comma-separated suite names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Reproduce one of the worked examples.
    Demo {
        #[arg(long, value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Pathology,
    UnclosedUnion,
    Noncommute,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Numeric(#[from] HvzError),
    #[error("{}", .0.join("\n"))]
    CellErrors(Vec<String>),
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot configure the thread pool: {0}")]
    Threads(String),
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Config(e.into())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        CliError::Numeric(e.into())
    }
}

impl CliError {
    /// 2 for anything wrong with the input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Verify(_) | CliError::Threads(_) => 2,
            CliError::Numeric(_) | CliError::CellErrors(_) | CliError::VerifyFailed(_) | CliError::Report(_) => 3,
        }
    }
}

/// Files written by a successful run.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
}

/// Parses `"1,-2.5"`.
pub fn parse_alpha(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("--alpha: `{}`: {e}", t.trim())))
        })
        .collect()
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

/// Thread count from the flag, then `HVZLAB_THREADS`.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match flag {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => Ok(Some(n)),
        None => match env_var(ENV_THREADS) {
            None => Ok(None),
            Some(v) => match v.parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(CliError::Usage(format!("{ENV_THREADS}: expected a positive integer, found `{v}`"))),
            },
        },
    }
}

/// Output directory: flag, then `HVZLAB_OUT`, then the config, then the default.
fn output_dir(common: &Common, cfg: Option<&RunConfig>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| env_var(ENV_OUT).map(PathBuf::from))
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = thread_count(cli.common.threads)? {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match &cli.common.config {
        Some(p) => Some(RunConfig::load(p)?),
        None => None,
    };
    let needs_config = || -> Result<RunConfig, CliError> {
        let mut c = cfg.clone().ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
        if let Some(s) = &cli.common.alpha {
            c.alpha = Some(parse_alpha(s)?);
            c.validate()?;
        }
        if let Some(seed) = cli.common.seed {
            c.seed = seed;
        }
        Ok(c)
    };
    let out = OutputDir::new(output_dir(&cli.common, cfg.as_ref()));
    let mut outcome = Outcome::default();
    let mut record = |p: PathBuf| outcome.written.push(p);

    match &cli.command {
        Command::Localize => {
            let c = needs_config()?;
            record(out.write_json("resolved_config.json", &c.resolved()?)?);
            let h = c.hamiltonian()?;
            let alpha = c
                .direction(c.alpha.as_deref().ok_or_else(|| CliError::Usage("localize needs --alpha".into()))?, "alpha")?;
            let loc = localize(&h, &alpha);
            record(out.write_json("localized.json", &LocalizedSpecView::new(&loc))?);
        }
        Command::Spectrum => {
            let c = needs_config()?;
            record(out.write_json("resolved_config.json", &c.resolved()?)?);
            let h = c.hamiltonian()?;
            match c.alpha.as_deref() {
                Some(a) => {
                    let alpha = c.direction(a, "alpha")?;
                    let (loc, _, spec) = localized_spectrum(&h, &alpha)?;
                    let fibering = fibering_subspace(&loc)?.basis_i64().unwrap_or_default();
                    record(out.write_text("spectrum.csv", &intervals_csv(spec.set.intervals()))?);
                    record(out.write_json("spectrum.json", &LocalizedSpectrumView::new(&alpha, fibering, spec))?);
                }
                None => {
                    let grid = GridSpec::default_for(c.dim)?;
                    let b = truncated_box(&h, &grid, TRUNCATION_EIGS)?;
                    record(out.write_text("eigenvalues.csv", &eigenvalues_csv(&b.eigenvalues))?);
                    record(out.write_json("eigenvalues.json", &b)?);
                }
            }
        }
        Command::Hvz => {
            let c = needs_config()?;
            record(out.write_json("resolved_config.json", &c.resolved()?)?);
            let est = essential_spectrum(&c.hamiltonian()?)?;
            record(out.write_json("hvz.json", &est)?);
            record(out.write_text("essential_spectrum.csv", &intervals_csv(est.essential_spectrum.intervals()))?);
            record(out.write_text("cells.csv", &cells_csv(&est))?);
            record(out.write_text("refinement.csv", &refinement_csv(&est))?);
            let errors = est.errors();
            if !errors.is_empty() {
                return Err(CliError::CellErrors(errors));
            }
        }
        Command::Verify { suite } => {
            let seed = cli.common.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            let reports = verify::run(Some(suite), seed)?;
            record(out.write_json("verify.json", &reports)?);
            let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.suite.clone()).collect();
            if !failed.is_empty() {
                return Err(CliError::VerifyFailed(failed));
            }
        }
        Command::Demo { name } => match name {
            DemoName::Pathology => {
                let rep = pathology_demo(&PATHOLOGY_RADII)?;
                record(out.write_json("pathology.json", &rep)?);
            }
            DemoName::UnclosedUnion => record(out.write_json("unclosed_union.json", &unclosed_union_demo())?),
            DemoName::Noncommute => record(out.write_json("noncommute.json", &noncommute_demo())?),
        },
    }
    Ok(outcome)
}
