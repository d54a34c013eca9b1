//! Job configuration: a JSON document, optionally overridden field by field from the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qhj_core::catalog::{BoundStateCount, CatalogError, PotentialKind, PotentialSpec};

/// Environment variable holding the number of significant digits in CSV output.
pub const PRECISION_VAR: &str = "QHJ_CSV_DIGITS";
pub const DEFAULT_DIGITS: usize = 15;
pub const DEFAULT_ORACLE_COUNT: usize = 4001;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{PRECISION_VAR}={value}: expected an integer between 1 and 17")]
    Precision { value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Spectrum,
    Wavefunctions,
    Qmf,
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectrum" => Ok(Self::Spectrum),
            "wavefunctions" => Ok(Self::Wavefunctions),
            "qmf" => Ok(Self::Qmf),
            other => Err(format!("unknown output `{other}` (expected spectrum, wavefunctions or qmf)")),
        }
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spectrum => "spectrum",
            Self::Wavefunctions => "wavefunctions",
            Self::Qmf => "qmf",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl OracleConfig {
    pub fn is_overridden(&self) -> bool {
        self.x_min.is_some() || self.x_max.is_some()
    }
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Spectrum, OutputKind::Wavefunctions]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub potential: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub levels: usize,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Field overrides collected from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub potential: Option<String>,
    pub params: Vec<(String, f64)>,
    pub levels: Option<usize>,
    pub oracle_x_min: Option<f64>,
    pub oracle_x_max: Option<f64>,
    pub oracle_count: Option<usize>,
    pub outputs: Option<Vec<OutputKind>>,
    pub output_dir: Option<PathBuf>,
}

impl JobConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.potential {
            self.potential = p.clone();
        }
        for (k, v) in &o.params {
            self.params.insert(k.clone(), *v);
        }
        if let Some(l) = o.levels {
            self.levels = l;
        }
        if o.oracle_x_min.is_some() {
            self.oracle.x_min = o.oracle_x_min;
        }
        if o.oracle_x_max.is_some() {
            self.oracle.x_max = o.oracle_x_max;
        }
        if o.oracle_count.is_some() {
            self.oracle.count = o.oracle_count;
        }
        if let Some(out) = &o.outputs {
            self.outputs = out.clone();
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
    }

    /// Checks the fields and builds the potential.
    pub fn resolve(&mut self) -> Result<PotentialSpec, ConfigError> {
        let field = |field: &str, message: String| ConfigError::Field { field: field.into(), message };
        let kind: PotentialKind = self.potential.parse()?;
        let spec = PotentialSpec::instantiate(kind, &self.params)?;
        if self.levels == 0 {
            return Err(field("levels", "must be at least 1".into()));
        }
        if let BoundStateCount::Finite(count) = spec.bound_state_count() {
            if self.levels > count {
                return Err(field(
                    "levels",
                    format!("{} has only {count} bound states, {} requested", kind, self.levels),
                ));
            }
        }
        if self.oracle.count.is_some_and(|c| c < 3) {
            return Err(field("oracle.count", "must be at least 3".into()));
        }
        if let (Some(lo), Some(hi)) = (self.oracle.x_min, self.oracle.x_max) {
            if hi <= lo || hi.is_nan() || lo.is_nan() {
                return Err(field("oracle", format!("x_max = {hi} must exceed x_min = {lo}")));
            }
        }
        self.outputs.sort();
        self.outputs.dedup();
        Ok(spec)
    }
}

/// Significant digits for CSV values, from the environment when set.
pub fn csv_digits() -> Result<usize, ConfigError> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(DEFAULT_DIGITS),
        Ok(value) => match value.trim().parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(d),
            _ => Err(ConfigError::Precision { value }),
        },
    }
}

/// Parses `NAME=VALUE`.
pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("{name}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_document() {
        let cfg = JobConfig::from_json(
            r#"{"potential": "rosen_morse", "params": {"A": 4, "alpha": 1}, "levels": 4}"#,
            Path::new("job.json"),
        )
        .unwrap();
        assert_eq!(cfg.outputs, default_outputs());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert_eq!(cfg.params["A"], 4.0);
    }

    #[test]
    fn parse_error_reports_position() {
        let err = JobConfig::from_json("{\n  \"potential\": \"harmonic\",\n  \"levels\": x\n}", Path::new("j.json"))
            .unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        let err =
            JobConfig::from_json(r#"{"potential": "harmonic", "levels": 1, "levles": 2}"#, Path::new("j")).unwrap_err();
        assert!(err.to_string().contains("levles"));
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = JobConfig::from_json(
            r#"{"potential": "scarf1", "params": {"A": 3, "B": 1, "alpha": 1}, "levels": 2}"#,
            Path::new("j"),
        )
        .unwrap();
        cfg.apply(&Overrides {
            params: vec![("B".into(), -2.0)],
            levels: Some(5),
            oracle_count: Some(801),
            ..Default::default()
        });
        assert_eq!(cfg.params["B"], -2.0);
        assert_eq!(cfg.levels, 5);
        assert_eq!(cfg.oracle.count, Some(801));
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn invalid_jobs() {
        let load = |s: &str| JobConfig::from_json(s, Path::new("j")).unwrap();
        let mut boundary = load(r#"{"potential": "scarf1", "params": {"A": 1, "B": 1, "alpha": 1}, "levels": 1}"#);
        assert!(matches!(boundary.resolve(), Err(ConfigError::Catalog(CatalogError::PhaseBoundary(_)))));
        let mut zero = load(r#"{"potential": "harmonic", "levels": 0}"#);
        assert!(matches!(zero.resolve(), Err(ConfigError::Field { .. })));
        let mut too_many = load(r#"{"potential": "rosen_morse", "params": {"A": 4, "alpha": 1}, "levels": 5}"#);
        assert!(matches!(too_many.resolve(), Err(ConfigError::Field { .. })));
        let mut unknown = load(r#"{"potential": "morse", "levels": 1}"#);
        assert!(matches!(unknown.resolve(), Err(ConfigError::Catalog(CatalogError::UnknownPotential(_)))));
    }

    #[test]
    fn param_flag() {
        assert_eq!(parse_param("alpha=0.5").unwrap(), ("alpha".to_string(), 0.5));
        assert!(parse_param("alpha").is_err());
        assert!(parse_param("A=x").is_err());
    }
}
