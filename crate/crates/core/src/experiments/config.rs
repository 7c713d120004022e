use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensembles::registry::Params;
use crate::ensembles::{EnsembleSpec, SpectrumSpec};
use crate::error::{PerturbError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = PerturbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(PerturbError::Config(format!(
                "unknown format `{other}` (csv or json)"
            ))),
        }
    }
}

/// Directory receiving `records.{csv,json}` and `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Declarative description of a Monte Carlo campaign.
///
/// ```json
/// {"kind": "upper_bound", "spectrum": {"family": "multiscale", "params": {"epsilon": 1}},
///  "ensemble": {"tag": "goe"}, "n_list": [64, 128], "trials": 20, "seed": 7}
/// ```
///
/// Omitted `spectrum`, `ensemble` and `n_list` take the kind's defaults.
/// Kind-specific knobs (`theta`, `tau`, `c`, `restarts`, ...) go in `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    pub trials: usize,
    /// Master seed; trial streams are derived from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_p", with = "crate::exponent")]
    pub p: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn default_p() -> f64 {
    2.0
}

fn default_tol() -> f64 {
    1e-12
}

impl ExperimentConfig {
    pub fn new(kind: &str, trials: usize) -> Self {
        Self {
            kind: kind.into(),
            spectrum: None,
            ensemble: None,
            n_list: None,
            trials,
            seed: 0,
            p: default_p(),
            tol: default_tol(),
            params: Params::new(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn with_n_list(mut self, n_list: &[usize]) -> Self {
        self.n_list = Some(n_list.to_vec());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_spectrum(mut self, spectrum: SpectrumSpec) -> Self {
        self.spectrum = Some(spectrum);
        self
    }

    pub fn with_ensemble(mut self, ensemble: EnsembleSpec) -> Self {
        self.ensemble = Some(ensemble);
        self
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    /// Real-valued entry of `params`, or `default` when absent.
    pub fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                PerturbError::Config(format!("param `{key}` must be a finite number, got {v}"))
            }),
        }
    }

    pub fn param_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| {
                PerturbError::Config(format!(
                    "param `{key}` must be a non-negative integer, got {v}"
                ))
            }),
        }
    }

    pub(crate) fn check_basic(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(PerturbError::Config("trials must be at least 1".into()));
        }
        if let Some(ns) = &self.n_list {
            if ns.is_empty() {
                return Err(PerturbError::Config("n_list is empty".into()));
            }
            if let Some(n) = ns.iter().find(|&&n| n < 2) {
                return Err(PerturbError::Config(format!(
                    "every n must be at least 2, got {n}"
                )));
            }
        }
        if !(self.p >= 1.0) {
            return Err(PerturbError::Config(format!(
                "p must be at least 1, got {}",
                self.p
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(PerturbError::Config(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}
