use std::path::Path;

use thiserror::Error;

/// Failure of a command, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or conflicting flags. Exit status 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or incompatible inputs. Exit status 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn in_file(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

macro_rules! data_error_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}

data_error_from!(
    strent::gbm::BoostError,
    strent::structure::StructureError,
    strent::partition::PartitionError,
    strent::entropy::EntropyError,
    strent::loss::LossError
);
