use std::fmt;
use std::process::ExitCode;

use schmidt_core::Error;

/// Exit status 2 for unusable input, 1 for anything that failed while
/// running.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
}

pub fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Config(_) => ExitCode::from(2),
            Failure::Run(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Run(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Parse(_) | Error::DimensionMismatch { .. } | Error::InvalidRounds => {
                Failure::Config(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Run(e.to_string())
    }
}
