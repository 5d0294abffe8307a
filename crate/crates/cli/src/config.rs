//! Line-oriented `key = value` configuration files.

use std::fmt;
use std::path::PathBuf;

use mwgfem::adapt::AdaptMode;

/// A parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Built-in problem name (`square_sine`, `lshape`, `checkerboard`) or a
    /// path to a mesh file.
    pub problem: String,
    pub theta: f64,
    pub tol: f64,
    pub max_iterations: usize,
    pub mode: AdaptMode,
    pub output: PathBuf,
    /// Large coefficient of the checkerboard problem.
    pub coefficient_k: f64,
    /// Constant source used for mesh-file problems (built-ins carry their
    /// own source).
    pub source_constant: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: String::new(),
            theta: 0.3,
            tol: 1e-3,
            max_iterations: 40,
            mode: AdaptMode::Adaptive,
            output: PathBuf::from("history.csv"),
            coefficient_k: 100.0,
            source_constant: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    MalformedLine { line: usize, content: String },
    UnknownKey(String),
    InvalidValue { key: String, value: String },
    MissingProblem,
    InvalidTheta,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::MalformedLine { line, content } => {
                write!(f, "malformed line {line}: {content:?} (expected key = value)")
            }
            ConfigError::UnknownKey(key) => write!(f, "unknown key: {key}"),
            ConfigError::InvalidValue { key, value } => {
                write!(f, "invalid value for {key}: {value:?}")
            }
            ConfigError::MissingProblem => write!(f, "missing key: problem"),
            ConfigError::InvalidTheta => write!(f, "theta must be in (0,1)"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses a config file. Unknown keys are errors; missing keys take their
/// defaults; `problem` is required.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut have_problem = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::MalformedLine {
            line: idx + 1,
            content: raw.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let invalid = || ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "problem" => {
                cfg.problem = value.to_string();
                have_problem = !value.is_empty();
            }
            "theta" => cfg.theta = value.parse().map_err(|_| invalid())?,
            "tol" => cfg.tol = value.parse().map_err(|_| invalid())?,
            "max_iterations" => cfg.max_iterations = value.parse().map_err(|_| invalid())?,
            "mode" => {
                cfg.mode = match value {
                    "adaptive" => AdaptMode::Adaptive,
                    "uniform" => AdaptMode::Uniform,
                    _ => return Err(invalid()),
                }
            }
            "output" => cfg.output = PathBuf::from(value),
            "coefficient_K" => cfg.coefficient_k = value.parse().map_err(|_| invalid())?,
            "f" => cfg.source_constant = value.parse().map_err(|_| invalid())?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
    }
    if !have_problem {
        return Err(ConfigError::MissingProblem);
    }
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(ConfigError::InvalidTheta);
    }
    if cfg.tol <= 0.0 || cfg.tol.is_nan() || cfg.max_iterations == 0 {
        return Err(ConfigError::InvalidValue {
            key: if cfg.tol > 0.0 { "max_iterations" } else { "tol" }.to_string(),
            value: if cfg.tol > 0.0 {
                cfg.max_iterations.to_string()
            } else {
                cfg.tol.to_string()
            },
        });
    }
    Ok(cfg)
}
