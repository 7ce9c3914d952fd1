//! `run` configuration: a TOML file with flag overrides on top.

use std::fmt;
use std::path::PathBuf;

use dwset::experiments::{TargetSizes, DEFAULT_HORIZON, DEFAULT_SAMPLES, DEFAULT_TOL, DEFAULT_VISITS};
use dwset::mapfab::build_sequence;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Share of boundary angles whose orbit follows the interior orbit.
    DwFraction,
    /// Orbit density over equal arcs.
    Density,
    /// Overlaps and visit counts for shrinking targets of the doubling map.
    ShrinkingTarget,
    /// Hyperbolic classification from sample points.
    Classify,
    /// Boundary distance series and condition sums of an interior orbit.
    Convergence,
    /// Escape ledger of the rotated-pull construction.
    EscapeLedger,
    /// Euclidean proximity bound on random pairs.
    Proximity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::DwFraction => "dw-fraction",
            Experiment::Density => "density",
            Experiment::ShrinkingTarget => "shrinking-target",
            Experiment::Classify => "classify",
            Experiment::Convergence => "convergence",
            Experiment::EscapeLedger => "escape-ledger",
            Experiment::Proximity => "proximity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Sequence ID; ignored by `shrinking-target`.
    #[serde(default = "default_sequence")]
    pub sequence: String,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of equal arcs for `density`.
    #[serde(default = "default_arcs")]
    pub arcs: usize,
    #[serde(default = "default_visits")]
    pub min_visits: usize,
    #[serde(default)]
    pub seed: u64,
    /// Working precision in bits; the planned precision when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    /// Thread cap; all available cores when absent. Never changes results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Interior base point `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<[f64; 2]>,
    /// Sample points for `classify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    /// Target sizes for `shrinking-target`: `1/n`, `2^-n` or a constant.
    #[serde(default = "default_targets")]
    pub targets: String,
    /// Largest index in the overlap table for `shrinking-target`.
    #[serde(default = "default_max_index")]
    pub max_index: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_sequence() -> String {
    "ex8.3:a=1-1/n".into()
}
fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_arcs() -> usize {
    16
}
fn default_visits() -> usize {
    DEFAULT_VISITS
}
fn default_targets() -> String {
    "1/n".into()
}
fn default_max_index() -> usize {
    20
}
fn default_out_dir() -> PathBuf {
    "out".into()
}

/// A configuration error, with the position in the file when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let (l, c) = position(text, span.start);
                    (Some(l), Some(c))
                }
                None => (None, None),
            };
            ConfigError { line, column, message: e.message().trim().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical TOML text: fixed key order, defaults written out.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("a run configuration always serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples == 0 && self.experiment != Experiment::Classify && self.experiment != Experiment::Convergence {
            return Err(ConfigError::invalid("samples must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(ConfigError::invalid("horizon must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::invalid(format!("tol = {} must be positive", self.tol)));
        }
        if self.arcs < 2 {
            return Err(ConfigError::invalid("arcs must be at least 2"));
        }
        if self.min_visits == 0 {
            return Err(ConfigError::invalid("min_visits must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::invalid("workers must be at least 1"));
        }
        if let Some(p) = self.precision {
            if !(16..=1 << 20).contains(&p) {
                return Err(ConfigError::invalid(format!("precision = {p} bits outside 16..=1048576")));
            }
        }
        if self.experiment == Experiment::ShrinkingTarget {
            TargetSizes::parse(&self.targets).map_err(|e| ConfigError::invalid(e.to_string()))?;
            if self.max_index < 2 {
                return Err(ConfigError::invalid("max_index must be at least 2"));
            }
        } else {
            build_sequence(&self.sequence).map_err(|e| ConfigError::invalid(e.to_string()))?;
        }
        Ok(())
    }
}
