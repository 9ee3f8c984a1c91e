use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by policies, environments, partitions and the runner.
#[derive(Debug, Error)]
pub enum BanditError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("value {value} outside [{lo}, {hi}]: {what}")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability {0} for the selected arm")]
    InvalidProbability(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid partition: {0}")]
    Structure(String),

    #[error("point outside the metric space: {0}")]
    Domain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("time {t} outside the recorded range [{first}, {last}]")]
    OutOfRange { t: u64, first: u64, last: u64 },

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<BanditError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BanditError {
    pub(crate) fn range(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        BanditError::Range {
            what,
            value,
            lo,
            hi,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BanditError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with a description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        BanditError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors that stem from a bad configuration rather than a
    /// failure while running.
    pub fn is_config_error(&self) -> bool {
        match self {
            BanditError::Config(_) | BanditError::Structure(_) | BanditError::Parse { .. } => true,
            BanditError::Context { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub type Result<T, E = BanditError> = std::result::Result<T, E>;
