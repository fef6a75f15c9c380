use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Runtime,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields or images live on different grids")]
    GridMismatch,

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("degenerate initial front: {0}")]
    DegenerateFront(String),

    #[error("time step {dt} s exceeds the stable limit {limit} s")]
    CflViolation { dt: f64, limit: f64 },

    #[error("domain too small: front came within 2 cells of the grid boundary at t = {time} s; enlarge the grid")]
    DomainTooSmall { time: f64 },

    #[error("level-set field has no zero crossing")]
    NoZeroCrossing,

    #[error("particle {index}: {source}")]
    Particle { index: usize, source: Box<Error> },

    #[error("member {index}: {source}")]
    Member { index: usize, source: Box<Error> },

    #[error("assimilation cycle {index} (t = {time} s): {source}")]
    Observation {
        index: usize,
        time: f64,
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidGrid(_)
            | Error::GridMismatch
            | Error::InvalidArgument { .. }
            | Error::DegenerateFront(_)
            | Error::Config(_)
            | Error::Format { .. } => ErrorKind::Validation,
            Error::CflViolation { .. } | Error::DomainTooSmall { .. } | Error::NoZeroCrossing => {
                ErrorKind::Runtime
            }
            Error::Io { .. } => ErrorKind::Io,
            Error::Particle { source, .. }
            | Error::Member { source, .. }
            | Error::Observation { source, .. } => source.kind(),
        }
    }
}
