//! Error taxonomy mapped onto the process exit codes: 0 success with all
//! acceptance bands met, 1 success with a band missed, 2 usage/config
//! errors, 3 runtime IO or numeric failures.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration: unknown experiment, unknown key,
    /// malformed config file, type mismatch, invalid parameter combination.
    Config(String),
    /// Filesystem failure (unwritable output directory, write error).
    Io { context: String, source: std::io::Error },
    /// Numeric failure while running an experiment.
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn numeric(msg: impl fmt::Display) -> Self {
        Self::Numeric(msg.to_string())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io { .. } | Self::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "configuration error: {msg}"),
            Self::Io { context, source } => write!(f, "io error: {context}: {source}"),
            Self::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
