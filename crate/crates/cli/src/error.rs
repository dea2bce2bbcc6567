use std::path::PathBuf;

use lengthen::farey::Slope;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(lengthen::Error),
    #[error("{0}")]
    SuiteFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<lengthen::Error> for CliError {
    fn from(e: lengthen::Error) -> Self {
        use lengthen::Error::*;
        match e {
            PrecisionExhausted { .. } | Degenerate(_) | Singular(_) | CertificateFailed { .. } => CliError::Numeric(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailed(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// The slope at which a numeric failure happened.
    pub fn slope(&self) -> Option<&Slope> {
        use lengthen::Error::*;
        match self {
            CliError::Numeric(PrecisionExhausted { slope, .. } | CertificateFailed { slope, .. }) => Some(slope),
            CliError::Numeric(Degenerate(slope) | Singular(slope)) => Some(slope),
            _ => None,
        }
    }
}
