use std::path::PathBuf;

use logid_core::quadrature::IntervalPair;
use logid_core::LevySpectrum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Moment,
    Verify,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Quad,
    Binom,
    Sim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Recurrence,
    Binom,
    PoissonLowmoments,
    Reductions,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    MeanMass,
    SecondMoment,
    Moment,
    LogCov,
    Scaling,
}

/// Command-specific parameters; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// integer exponent for the binomial sums
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morris: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<IntervalPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_spectrum")]
    pub spectrum: LevySpectrum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn default_spectrum() -> LevySpectrum {
    LevySpectrum::gaussian(1.0).expect("unit variance is valid")
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            spectrum: default_spectrum(),
            method: None,
            parameters: Parameters::default(),
            output: None,
            format: Format::Csv,
            seed: None,
            threads: None,
            tol: None,
        }
    }

    /// Parses without the per-command checks, since flags may still fill gaps.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Schema checks that need no computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.parameters;
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(CliError::Invalid(what.to_string())) };
        if let Some(tol) = self.tol {
            need(tol > 0.0 && tol.is_finite(), "tol must be positive")?;
        }
        if let Some(t) = self.threads {
            need(t > 0, "threads must be at least 1")?;
        }
        if let Some(mu) = p.mu {
            need(mu > 0.0 && mu.is_finite(), "mu must be positive")?;
        }
        match self.command {
            Command::Spectrum => {
                need(self.method.is_none(), "spectrum takes no method")?;
                need(p.mu.is_some(), "spectrum needs mu")?;
            }
            Command::Moment => {
                let method = self.method.ok_or_else(|| CliError::Invalid("moment needs a method".into()))?;
                need(p.n.is_some(), "moment needs n")?;
                match method {
                    Method::Binom => need(p.lambda.is_some(), "method binom needs an integer lambda")?,
                    _ => need(p.mu.is_some(), "moment needs mu")?,
                }
                if method == Method::Sim {
                    need(p.m.is_none(), "method sim estimates single moments; use simulate for other quantities")?;
                }
            }
            Command::Verify => {
                need(self.method.is_none(), "verify takes no method")?;
            }
            Command::Simulate => {
                need(matches!(self.method, None | Some(Method::Sim)), "simulate only supports method sim")?;
                need(p.mu.is_some(), "simulate needs mu")?;
                need(p.quantity.is_some(), "simulate needs a quantity")?;
            }
        }
        Ok(())
    }
}
