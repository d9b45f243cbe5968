//! Exit-code-oriented error type for the command-line tool.
//!
//! Every failure is mapped onto the documented exit codes: `2` for I/O
//! problems, `3` for parse and validation problems (bad flags, malformed CSV
//! or config files, contract violations), `4` for numerical failures inside
//! an otherwise valid computation.

use std::fmt;

/// Convenience alias used throughout the binary.
pub type Result<T> = std::result::Result<T, CliError>;

/// A failure, categorized by the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or unwritable files. Exit code 2.
    Io(String),
    /// Malformed input: flags, CSV contents, config schema, contract
    /// violations. Exit code 3.
    Validation(String),
    /// Numerical failure during an otherwise valid computation. Exit code 4.
    Numerical(String),
}

impl CliError {
    /// The process exit code this failure maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) | CliError::Validation(msg) | CliError::Numerical(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<svdshrink::Error> for CliError {
    fn from(e: svdshrink::Error) -> Self {
        if e.is_input_error() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        // The csv error's display already carries byte/line positions where
        // the reader knows them.
        match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Validation(format!("config file: {}", e.message()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        assert_eq!(CliError::Validation("x".into()).exit_code(), 3);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 4);
    }

    #[test]
    fn library_errors_split_by_input_class() {
        let input = svdshrink::Error::InvalidInput("bad".into());
        assert_eq!(CliError::from(input).exit_code(), 3);
        let numerical = svdshrink::Error::NonFinite("overflow".into());
        assert_eq!(CliError::from(numerical).exit_code(), 4);
    }
}
