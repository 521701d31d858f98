use std::path::PathBuf;

use opuclab::MeasureSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const N_MAX_RANGE: std::ops::RangeInclusive<usize> = 2..=512;
pub const DEFAULT_N_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Scan,
    Perturb,
    Gap,
    Sobolev,
    Identities,
    Moments,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Perturb => "perturb",
            Command::Gap => "gap",
            Command::Sobolev => "sobolev",
            Command::Identities => "identities",
            Command::Moments => "moments",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Circular Jacobi parameter for `identities`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Location of the added atom for `perturb`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            measure: None,
            n_max: DEFAULT_N_MAX,
            t: None,
            lambda: None,
            delta: None,
            a: None,
            theta0: None,
            output: None,
            format: Format::Csv,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !N_MAX_RANGE.contains(&self.n_max) {
            return Err(CliError::Config(format!(
                "nMax must lie in [{}, {}], got {}",
                N_MAX_RANGE.start(),
                N_MAX_RANGE.end(),
                self.n_max
            )));
        }
        let need = |name: &str, v: Option<f64>| match v {
            Some(x) if x.is_finite() => Ok(x),
            Some(x) => Err(CliError::Config(format!("{name} must be finite, got {x}"))),
            None => Err(CliError::Config(format!("{} requires {name}", self.command.name()))),
        };
        let positive = |name: &str, v: Option<f64>| {
            let x = need(name, v)?;
            if x > 0.0 {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {x}")))
            }
        };
        match self.command {
            Command::Scan | Command::Moments => {
                self.measure()?;
            }
            Command::Perturb => {
                self.measure()?;
                positive("t", self.t)?;
                if let Some(th) = self.theta0 {
                    need("theta0", Some(th))?;
                }
            }
            Command::Gap => {
                positive("t", self.t)?;
                let d = need("delta", self.delta)?;
                if !(d > 0.0 && d < std::f64::consts::FRAC_PI_2) {
                    return Err(CliError::Config(format!("delta must lie in (0, π/2), got {d}")));
                }
            }
            Command::Sobolev => {
                self.measure()?;
                positive("lambda", self.lambda)?;
            }
            Command::Identities => {
                let a = need("a", self.a)?;
                if !(a > -0.5) {
                    return Err(CliError::Config(format!("a must exceed -1/2, got {a}")));
                }
            }
        }
        if let Some(m) = &self.measure {
            m.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub(crate) fn measure(&self) -> Result<&MeasureSpec, CliError> {
        self.measure
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{} requires a measure", self.command.name())))
    }
}
