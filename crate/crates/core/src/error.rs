use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the entropy model, the statistics routines and the
/// data loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown manufacturer `{0}` (not present in the compatibility matrix)")]
    UnknownManufacturer(String),

    #[error("invalid machine `{machine}`: {reason}")]
    InvalidMachine { machine: String, reason: String },

    #[error("invalid component: {0}")]
    InvalidComponent(String),

    #[error("invalid compatibility matrix: {0}")]
    InvalidMatrix(String),

    #[error("asymmetric matrix: C({a},{b}) = {ab} but C({b},{a}) = {ba}")]
    AsymmetricMatrix {
        a: String,
        b: String,
        ab: f64,
        ba: f64,
    },

    #[error("score C({a},{b}) = {value} is outside [0, 1]")]
    Range { a: String, b: String, value: f64 },

    #[error("cluster `{0}` contains no machines")]
    EmptyCluster(String),

    #[error("penalty input must be nonnegative, got {0}")]
    NegativeInput(f64),

    #[error("invalid penalty parameters: {0}")]
    InvalidPenalty(String),

    #[error("series `{0}` has zero variance")]
    DegenerateSeries(String),

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least 3 paired observations, got {0}")]
    InsufficientData(usize),

    #[error("correlation coefficient {0} is outside [-1, 1]")]
    InvalidR(f64),

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error("parse error in {source_name}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: Option<u64>,
        message: String,
    },

    #[error("schema error in {source_name}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Schema {
        source_name: String,
        line: Option<u64>,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Broad category used by front ends to pick an exit status.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Parse { .. }
            | Error::Schema { .. }
            | Error::Validation(_)
            | Error::InvalidMachine { .. }
            | Error::InvalidComponent(_)
            | Error::InvalidMatrix(_)
            | Error::AsymmetricMatrix { .. }
            | Error::Range { .. }
            | Error::EmptyCluster(_)
            | Error::InvalidPenalty(_)
            | Error::UnknownBenchmark(_)
            | Error::LengthMismatch(..) => ErrorKind::Validation,
            Error::UnknownManufacturer(_)
            | Error::NegativeInput(_)
            | Error::DegenerateSeries(_)
            | Error::InsufficientData(_)
            | Error::InvalidR(_) => ErrorKind::Domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Domain,
}
