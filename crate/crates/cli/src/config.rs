//! Run configuration: config-file merging, validation diagnostics, and the
//! reproducibility manifest.
//!
//! Precedence is flags over config file over defaults; the manifest records
//! the fully resolved values, so re-running a manifest reproduces the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use arena_ratings::data_io::{FileFormat, SchemaMapping};
use arena_ratings::prequential::{TreatmentKind, WlMode};
use arena_ratings::rating::{
    BradleyTerryConfig, EloConfig, Glicko2Config, SystemConfig, TrueSkillConfig,
};
use arena_ratings::{Error, Result};

/// Decision margin: a fixed value or "calibrate" for the swept grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Fixed(f64),
    Named(EpsilonName),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonName {
    Calibrate,
}

impl std::str::FromStr for EpsilonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "calibrate" {
            return Ok(EpsilonSpec::Named(EpsilonName::Calibrate));
        }
        s.parse::<f64>().map(EpsilonSpec::Fixed).map_err(|_| {
            Error::invalid(format!(
                "epsilon must be a number or \"calibrate\", got {s:?}"
            ))
        })
    }
}

/// Optional-field run configuration as read from `--config`; unset fields
/// fall back to flags and then defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfigFile {
    pub input: Option<PathBuf>,
    pub format: Option<FileFormat>,
    pub schema_path: Option<PathBuf>,
    pub schema: Option<SchemaMapping>,
    pub drop_bothbad: Option<bool>,
    pub system: Option<SystemConfig>,
    pub systems: Option<Vec<String>>,
    pub treatments: Option<Vec<TreatmentKind>>,
    pub epsilon: Option<EpsilonSpec>,
    pub calibration_fraction: Option<f64>,
    pub wl_mode: Option<WlMode>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub report_format: Option<String>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfigFile = serde_json::from_str(&text)?;
        Ok(config)
    }
}

/// Builds a system config from a name, honoring a config-file system block
/// when its name matches.
pub fn system_by_name(name: &str, from_config: Option<&SystemConfig>) -> Result<SystemConfig> {
    let canonical = match name {
        "elo" => SystemConfig::Elo(EloConfig::default()),
        "glicko2" | "glicko-2" => SystemConfig::Glicko2(Glicko2Config::default()),
        "bradley_terry" | "bradley-terry" | "bt" => {
            SystemConfig::BradleyTerry(BradleyTerryConfig::default())
        }
        "trueskill" => SystemConfig::Trueskill(TrueSkillConfig::default()),
        other => return Err(Error::invalid(format!("unknown rating system {other:?}"))),
    };
    match from_config {
        Some(config) if config.name() == canonical.name() => Ok(config.clone()),
        _ => Ok(canonical),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        }
    }

    fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        }
    }
}

/// Everything a replay-style run needs, fully resolved.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedRun {
    pub input: PathBuf,
    pub format: FileFormat,
    pub schema: SchemaMapping,
    pub systems: Vec<SystemConfig>,
    pub treatments: Vec<TreatmentKind>,
    pub epsilon: EpsilonSpec,
    pub calibration_fraction: f64,
    pub wl_mode: WlMode,
    pub seed: u64,
}

/// Collects every violation (never just the first). The run may proceed
/// only when no error-severity diagnostics are present.
pub fn validate_config(resolved: &ResolvedRun) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    if !resolved.input.exists() {
        diagnostics.push(Diagnostic::error(format!(
            "input path {} does not exist",
            resolved.input.display()
        )));
    }
    if let Err(e) = resolved.schema.validate() {
        diagnostics.push(Diagnostic::error(format!("schema: {e}")));
    }
    if resolved.systems.is_empty() {
        diagnostics.push(Diagnostic::error("no rating system selected"));
    }
    for system in &resolved.systems {
        if let Err(e) = system.validate() {
            diagnostics.push(Diagnostic::error(format!("system {}: {e}", system.name())));
        }
    }
    if resolved.treatments.is_empty() {
        diagnostics.push(Diagnostic::error("treatment list is empty"));
    }
    match resolved.epsilon {
        EpsilonSpec::Fixed(value) => {
            if !value.is_finite() || value < 0.0 {
                diagnostics.push(Diagnostic::error(format!(
                    "decision margin must be non-negative, got {value}"
                )));
            } else if !(0.05..=0.45).contains(&value) {
                diagnostics.push(Diagnostic::warning(format!(
                    "decision margin {value} is outside the swept range [0.05, 0.45]"
                )));
            }
        }
        EpsilonSpec::Named(EpsilonName::Calibrate) => {}
    }
    if !(0.0..1.0).contains(&resolved.calibration_fraction) {
        diagnostics.push(Diagnostic::error(format!(
            "calibration fraction must be in [0, 1), got {}",
            resolved.calibration_fraction
        )));
    }

    diagnostics
}

/// Reproduction record written next to every run's outputs.
#[derive(Serialize)]
pub struct Manifest {
    pub artifact_version: &'static str,
    pub command: String,
    pub resolved: serde_json::Value,
    /// Output files keyed by role.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, resolved: impl Serialize) -> Result<Self> {
        Ok(Manifest {
            artifact_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            resolved: serde_json::to_value(resolved)?,
            outputs: BTreeMap::new(),
        })
    }

    pub fn with_output(mut self, role: &str, path: &Path) -> Self {
        self.outputs
            .insert(role.to_string(), path.display().to_string());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

/// Default manifest path: alongside the primary output.
pub fn manifest_path(explicit: Option<&Path>, primary_output: &Path) -> PathBuf {
    match explicit {
        Some(path) => path.to_path_buf(),
        None => {
            let mut name = primary_output.as_os_str().to_os_string();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
    }
}
