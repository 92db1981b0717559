//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Usage(format!("unknown report format {other:?}"))),
        }
    }
}

/// Everything a suite run depends on. Unset fields take the suite's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    /// Number of seeded random instances.
    pub instances: Option<u64>,
    /// Monte Carlo trials.
    pub trials: Option<u64>,
    /// Enumeration budget passed to exact searches.
    pub budget: Option<u64>,
    /// Class file used instead of generated classes, where a suite supports it.
    pub class: Option<PathBuf>,
    pub tree: Option<PathBuf>,
    pub alpha: Option<String>,
    pub horizon: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
    /// Fill the runtime column of each row.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(suite: &str) -> Self {
        ExperimentConfig { suite: suite.into(), ..Default::default() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn alpha(&self) -> Result<Option<Rational>> {
        self.alpha.as_deref().map(parse_rational).transpose()
    }

    pub(crate) fn instances_or(&self, default: u64) -> u64 {
        self.instances.unwrap_or(default)
    }

    pub(crate) fn trials_or(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }
}
