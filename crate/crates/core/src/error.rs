use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample {sample}, point {point}: coordinate {value} on axis {axis} lies outside [-1, 1]")]
    CoordinateOutOfRange {
        sample: usize,
        point: usize,
        axis: usize,
        value: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("responses are negative after shifting in samples {samples:?}")]
    NegativeResponse { samples: Vec<usize> },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("truncated container: needed {needed} bytes, {available} available")]
    Truncated { needed: usize, available: usize },

    #[error("malformed container: {0}")]
    Malformed(String),

    #[error("writing f64 data as f32 requires explicit narrowing")]
    NarrowingNotRequested,

    #[error("csv schema: {0}")]
    Schema(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// `2` input validation, `3` container or schema format, `4` anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CoordinateOutOfRange { .. }
            | Error::InvalidInput(_)
            | Error::ShapeMismatch(_)
            | Error::NegativeResponse { .. } => 2,
            Error::BadMagic { .. }
            | Error::UnsupportedVersion(_)
            | Error::Checksum { .. }
            | Error::Truncated { .. }
            | Error::Malformed(_)
            | Error::NarrowingNotRequested
            | Error::Schema(_)
            | Error::Csv(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
