//! The run report: every scalar of the pipeline, or the reason it is absent.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A reported number or the reason it was not computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Value(f64),
    Skipped { skipped: String },
}

impl Scalar {
    pub fn skipped(reason: impl Into<String>) -> Self {
        Scalar::Skipped { skipped: reason.into() }
    }

    /// Non-finite numbers are stored as skipped, since JSON cannot carry them.
    pub fn of(value: f64) -> Self {
        if value.is_finite() {
            Scalar::Value(value)
        } else {
            Scalar::skipped(format!("non-finite result ({value})"))
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Scalar::Value(v) => Some(*v),
            Scalar::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalars {
    pub a0: Scalar,
    #[serde(rename = "T")]
    pub t: Scalar,
    #[serde(rename = "Pi")]
    pub pi: Scalar,
    pub virial_residual: Scalar,
    pub alpha0: Scalar,
    pub e0: Scalar,
    pub xi: Scalar,
    #[serde(rename = "C")]
    pub c: Scalar,
    pub m0_over_m: Scalar,
    #[serde(rename = "Z0")]
    pub z0: Scalar,
    #[serde(rename = "L0_over_m")]
    pub l0_over_m: Scalar,
    /// Rest energy in units of the bare mass, closed form.
    #[serde(rename = "E0_units_m0")]
    pub rest_energy: Scalar,
    #[serde(rename = "E0_functional_units_m0")]
    pub rest_energy_functional: Scalar,
    pub epsilon1: Scalar,
    pub epsilon2: Scalar,
    #[serde(rename = "I_mu")]
    pub i_mu: Scalar,
    #[serde(rename = "I_1mu")]
    pub i_1mu: Scalar,
    pub mass_ratio: Scalar,
    pub level_difference_ratio: Scalar,
    pub orthogonality: Scalar,
    #[serde(rename = "L0_fit")]
    pub l0_fit: Scalar,
    #[serde(rename = "Lambda")]
    pub lambda: Scalar,
    pub log10_lifetime_seconds: Scalar,
}

impl Scalars {
    pub fn all_skipped(reason: &str) -> Self {
        let s = || Scalar::skipped(reason);
        Self {
            a0: s(),
            t: s(),
            pi: s(),
            virial_residual: s(),
            alpha0: s(),
            e0: s(),
            xi: s(),
            c: s(),
            m0_over_m: s(),
            z0: s(),
            l0_over_m: s(),
            rest_energy: s(),
            rest_energy_functional: s(),
            epsilon1: s(),
            epsilon2: s(),
            i_mu: s(),
            i_1mu: s(),
            mass_ratio: s(),
            level_difference_ratio: s(),
            orthogonality: s(),
            l0_fit: s(),
            lambda: s(),
            log10_lifetime_seconds: s(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub n_points: usize,
    pub x_max: f64,
    pub scheme: String,
    pub iterations: usize,
    pub tol_residual: f64,
    pub final_residual: Option<f64>,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub artifact_version: String,
    pub config_sha256: String,
    pub subcommand: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub convergence: Convergence,
    pub scalars: Scalars,
    /// Diagnostics worth reading next to the numbers.
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Io(format!("cannot parse report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Io(format!("cannot parse report: {e}")))
    }

    /// Writes `<stem>.toml` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), CliError> {
        crate::output::write_file(&dir.join(format!("{stem}.toml")), &self.to_toml()?)?;
        crate::output::write_file(&dir.join(format!("{stem}.json")), &self.to_json()?)
    }
}
