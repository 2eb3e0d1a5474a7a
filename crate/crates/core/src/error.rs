use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero has no inverse (index {index})")]
    ZeroInverse { index: usize },

    #[error("work budget exceeded: instance needs {required} operations, budget is {budget}")]
    Budget { required: u128, budget: u64 },

    #[error("coefficient bound {bound} exceeds the capacity of {strategy}")]
    Overflow { bound: String, strategy: &'static str },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable code, used for skipped sweep points.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) | Error::ZeroInverse { .. } => "domain",
            Error::Budget { .. } => "budget",
            Error::Overflow { .. } => "overflow",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Invariant(_) => "invariant",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Refuses work above `budget`.
pub(crate) fn check_budget(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        Err(Error::Budget { required, budget })
    } else {
        Ok(())
    }
}
