//! Command-line frontend for the `opuclab` scans and experiments.
//!
//! A run is described by a [`RunConfig`], built from flags, a JSON config file
//! or both (flags win). Reports go to `--out` or standard output as CSV or JSON.

pub mod commands;
pub mod config;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use opuclab::MeasureSpec;
use serde_json::json;
use thiserror::Error;

pub use config::{Command, Format, RunConfig};
pub use report::{Cell, Report};

pub const THREADS_ENV: &str = "OPUCLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] opuclab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable description written to standard error.
    pub fn diagnostic(&self, cfg: Option<&RunConfig>) -> String {
        let kind = match self {
            CliError::Numeric(_) => "numeric",
            CliError::Config(_) => "config",
            _ => "io",
        };
        let detail = match self {
            CliError::Numeric(e) => format!("{e:?}"),
            _ => String::new(),
        };
        json!({
            "error": kind,
            "message": self.to_string(),
            "detail": detail,
            "config": cfg,
        })
        .to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "opuclab", version, about = "Derivative norms of orthogonal polynomials on the unit circle")]
pub struct Args {
    /// What to run; may come from --config instead.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Measure as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub measure: Option<String>,
    /// Largest degree (2..=512).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Mass of the added atom.
    #[arg(long)]
    pub t: Option<f64>,
    /// Sobolev weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Half-width of the gap of the arc measure.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Circular Jacobi parameter for `identities`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Angle of the added atom for `perturb`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_measure(arg: &str) -> Result<MeasureSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Config(format!("measure file {arg}: {e}")))?
    };
    MeasureSpec::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
}

impl Args {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, self.command) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
                let mut cfg: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
                if let Some(c) = self.command {
                    cfg.command = c;
                }
                cfg
            }
            (None, Some(c)) => RunConfig::new(c),
            (None, None) => return Err(CliError::Config("no command given".into())),
        };
        if let Some(m) = &self.measure {
            cfg.measure = Some(parse_measure(m)?);
        }
        cfg.n_max = self.n_max.unwrap_or(cfg.n_max);
        cfg.t = self.t.or(cfg.t);
        cfg.lambda = self.lambda.or(cfg.lambda);
        cfg.delta = self.delta.or(cfg.delta);
        cfg.a = self.a.or(cfg.a);
        cfg.theta0 = self.theta0.or(cfg.theta0);
        cfg.format = self.format.unwrap_or(cfg.format);
        cfg.output = self.out.or(cfg.output);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Renders the report for `cfg` without writing it.
pub fn render(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    commands::build(cfg)?.render(cfg)
}

/// Runs `cfg` and writes the report to its output path or to `stdout`.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let bytes = render(cfg)?;
    match &cfg.output {
        Some(path) => write_atomically(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// Thread cap from the environment; `None` leaves rayon's default.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}
