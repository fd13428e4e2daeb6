//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// All failure modes of the library and the command line tool.
#[derive(Debug, Error)]
pub enum Error {
    // Configuration and invocation problems (exit code 1).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    // Input data problems (exit code 2).
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    InvalidData(String),
    #[error("dimension mismatch: {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // Numerical failures during fitting (exit code 3).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code for this error: 1 for usage and configuration
    /// errors, 2 for data errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) => 1,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::InvalidData(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(Error::InvalidConfig("x".into()).exit_code(), 1);
        assert_eq!(Error::InvalidData("x".into()).exit_code(), 2);
        assert_eq!(
            Error::DimensionMismatch {
                context: "c",
                expected: 3,
                got: 4
            }
            .exit_code(),
            2
        );
        assert_eq!(Error::Numerical("x".into()).exit_code(), 3);
    }

    #[test]
    fn messages_carry_location_for_parse_errors() {
        let err = Error::Parse {
            path: PathBuf::from("a.tsv"),
            line: 7,
            message: "expected 0 or 1".into(),
        };
        assert_eq!(err.to_string(), "a.tsv:7: expected 0 or 1");
    }
}
