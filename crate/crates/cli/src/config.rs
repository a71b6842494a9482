//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use selfloc::muon::MuonMode;
use selfloc::observables::ALPHA;
use selfloc::scf::ScfConfig;

use crate::CliError;

/// Everything that influences the computed numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub scf: ScfConfig,
    pub alpha: f64,
    /// Observed mass in the units the report uses for `m`.
    pub mass: f64,
    /// `1/m` expressed in seconds; converts the overlap exponent to a lifetime.
    pub inverse_mass_seconds: f64,
    pub muon_mode: MuonMode,
    /// Logarithmic momentum samples of the form factor between `0.01 m0` and `10 m0`.
    pub form_factor_points: usize,
    /// Momenta, in units of `m`, at which the dispersion coefficients are tabulated.
    pub dispersion_momenta: Vec<f64>,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            scf: ScfConfig::default(),
            alpha: ALPHA,
            mass: 1.0,
            inverse_mass_seconds: 1.288e-21,
            muon_mode: MuonMode::Adiabatic,
            form_factor_points: 60,
            dispersion_momenta: vec![0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0],
        }
    }
}

/// Output file names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    pub profile: String,
    /// Stem of the report; `.toml` and `.json` are appended.
    pub report: String,
    pub wavefunction_figure: String,
    pub potential_figure: String,
    pub form_factor: String,
    pub dispersion: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("selfloc-out"),
            profile: "profile.csv".into(),
            report: "report".into(),
            wavefunction_figure: "figure_wavefunctions.csv".into(),
            potential_figure: "figure_potential.csv".into(),
            form_factor: "form_factor.csv".into(),
            dispersion: "dispersion.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Error,
    #[default]
    Warn,
    Info,
    Debug,
}

impl Verbosity {
    pub fn filter(self) -> log::LevelFilter {
        match self {
            Verbosity::Error => log::LevelFilter::Error,
            Verbosity::Warn => log::LevelFilter::Warn,
            Verbosity::Info => log::LevelFilter::Info,
            Verbosity::Debug => log::LevelFilter::Debug,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(flatten)]
    pub physics: Physics,
    pub outputs: Outputs,
    pub verbosity: Verbosity,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.physics;
        if let Err(e) = p.scf.validate() {
            return Err(match e {
                selfloc::Error::InvalidConfig { field, reason } => CliError::Config(format!("invalid configuration field `scf.{field}`: {reason}")),
                other => CliError::Config(other.to_string()),
            });
        }
        let bad = |field: &str, reason: String| Err(CliError::Config(format!("invalid configuration field `{field}`: {reason}")));
        if !(p.alpha > 0.0 && p.alpha < 0.1) {
            return bad("alpha", format!("must lie in (0, 0.1), got {}", p.alpha));
        }
        if !(p.mass > 0.0 && p.mass.is_finite()) {
            return bad("mass", format!("must be positive, got {}", p.mass));
        }
        if !(p.inverse_mass_seconds > 0.0 && p.inverse_mass_seconds.is_finite()) {
            return bad("inverse_mass_seconds", format!("must be positive, got {}", p.inverse_mass_seconds));
        }
        if p.form_factor_points < 2 {
            return bad("form_factor_points", "must be at least 2".into());
        }
        if let Some(q) = p.dispersion_momenta.iter().find(|q| !(**q >= 0.0 && q.is_finite())) {
            return bad("dispersion_momenta", format!("momenta must be finite and non-negative, got {q}"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of [`Physics`].
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.physics).expect("physics section serializes");
        Sha256::digest(canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}
