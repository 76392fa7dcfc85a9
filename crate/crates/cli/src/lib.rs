//! Command-line driver for the coexact toolkit: experiment configuration,
//! mesh file formats, report writers and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod formats;
pub mod report;

use serde::Serialize;
use thiserror::Error;

pub use commands::run;
pub use config::{Args, CommandKind, ExperimentConfig, ModelName};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("{module} failed: {message}")]
    Numerical { module: &'static str, message: String },
    #[error("{failed} of {total} acceptance criteria failed")]
    Acceptance { failed: usize, total: usize },
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: &'a str,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    module: Option<&'a str>,
    exit_code: i32,
}

impl CliError {
    /// 2 for bad configuration or input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 2,
            CliError::Numerical { .. } | CliError::Acceptance { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Numerical { .. } => "numerical",
            CliError::Acceptance { .. } => "acceptance",
        }
    }

    /// Single-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        let message = self.to_string();
        let module = match self {
            CliError::Numerical { module, .. } => Some(*module),
            _ => None,
        };
        serde_json::to_string(&ErrorObject {
            error: &message,
            kind: self.kind(),
            module,
            exit_code: self.exit_code(),
        })
        .expect("error object serializes")
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Wraps a module error as a numerical failure.
pub(crate) fn num<E: std::fmt::Display>(module: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Numerical {
        module,
        message: e.to_string(),
    }
}
