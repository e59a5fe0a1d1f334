//! Experiment orchestration for `glq`: configuration, the subcommands, the
//! on-disk bundle and the report.
//!
//! Exit codes: 0 success, 1 a hard verdict failed, 2 configuration or schema,
//! 3 solver divergence, 4 geometry, 5 missing or corrupt artifacts and I/O.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod report;

use glq_core::analysis::AnalysisError;
use glq_core::gl::GlError;
use glq_core::homotopy::AlgebraError;
use glq_core::loops::LoopError;
use glq_core::manifold::ManifoldError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use experiment::{analyze_bundle, run_experiment, solve_schedule, Bundle, RunRecord};
pub use report::{emit_report, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("solver divergence: {0}")]
    Divergence(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("missing artifacts: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("corrupt artifact: {0}")]
    Corrupt(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Divergence(_) => 3,
            Self::Geometry(_) => 4,
            Self::Missing(_) | Self::Corrupt(_) | Self::Io(_) => 5,
        }
    }
}

impl From<GlError> for CliError {
    fn from(e: GlError) -> Self {
        match e {
            GlError::Config(m) => Self::Config(m),
            GlError::Divergence { .. } => Self::Divergence(e.to_string()),
            GlError::Missing(m) => Self::Missing(vec![m]),
            GlError::Corrupt(m) => Self::Corrupt(m),
            GlError::Json(e) => Self::Corrupt(e.to_string()),
            GlError::Io(e) => Self::Io(e.to_string()),
            GlError::Csv(e) => Self::Io(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Geometry(m) => Self::Geometry(m),
            AnalysisError::Interface(_) | AnalysisError::Config(_) | AnalysisError::Precondition(_) => {
                Self::Config(e.to_string())
            }
            AnalysisError::Io(_) | AnalysisError::Csv(_) => Self::Io(e.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<ManifoldError> for CliError {
    fn from(e: ManifoldError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<LoopError> for CliError {
    fn from(e: LoopError) -> Self {
        match e {
            LoopError::Io(_) => Self::Io(e.to_string()),
            LoopError::Format(_) | LoopError::Csv(_) => Self::Corrupt(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Pretty JSON with a trailing newline; keys of maps are sorted and floats
/// are printed in shortest round-trip form.
pub fn to_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn write_file(path: &std::path::Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
