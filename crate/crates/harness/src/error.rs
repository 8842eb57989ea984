use std::io;
use std::path::PathBuf;

use lattice_itc::ItcError;
use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed netpbm data: {0}")]
    MalformedHeader(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("shape does not fit the grid: {0}")]
    ShapeOverflow(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Itc(#[from] ItcError),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for bad flags or parameters, 2 for unreadable or unwritable files,
    /// 3 for numerical failures during clustering.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Usage(_) | HarnessError::ShapeOverflow(_) => 1,
            HarnessError::Io { .. }
            | HarnessError::MalformedHeader(_)
            | HarnessError::UnsupportedFormat(_)
            | HarnessError::Csv(_) => 2,
            HarnessError::Itc(e) => match e {
                ItcError::InvalidM { .. } | ItcError::InvalidParams(_) | ItcError::InvalidSigma(_) => 1,
                // problems with the content of an input file
                ItcError::EmptyImage
                | ItcError::NotBinary { .. }
                | ItcError::EmptyGrid { .. }
                | ItcError::LengthMismatch { .. }
                | ItcError::DimensionMismatch(..)
                | ItcError::NegativeWeight { .. } => 2,
                ItcError::NonFinite(_)
                | ItcError::EmptyCodebook
                | ItcError::DegenerateCodebook
                | ItcError::DisjointSupport
                | ItcError::StrandedVector(_)
                | ItcError::StrandedRetriesExhausted(_) => 3,
            },
        }
    }
}
