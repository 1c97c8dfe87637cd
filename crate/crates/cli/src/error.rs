use std::path::Path;

use thiserror::Error;

/// Failures surfaced by the command-line tool. Each variant maps to a
/// distinct process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Shape(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<bae::Error> for CliError {
    fn from(e: bae::Error) -> Self {
        use bae::Error as E;
        let msg = e.to_string();
        match e {
            E::ParameterDomain(_) | E::Format(_) => CliError::Parse(msg),
            E::Shape(_) | E::Index { .. } | E::Data(_) => CliError::Shape(msg),
            E::NotPositiveDefinite | E::NumericalDegeneracy { .. } => CliError::Numeric(msg),
            E::Io(_) => CliError::Io(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
