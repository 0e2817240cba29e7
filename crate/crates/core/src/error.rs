use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("{routine} did not reach tolerance after {refinements} refinements (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        routine: &'static str,
        refinements: usize,
        estimate: f64,
        error: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("{metric}: quadrature ({quadrature:e}) and Meijer-G ({meijer:e}) disagree")]
    CrossCheck {
        metric: &'static str,
        quadrature: f64,
        meijer: f64,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Degenerate(_) => "degenerate",
            Error::InvalidParam { .. } => "validation",
            Error::CrossCheck { .. } => "cross_check",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    /// Dotted config path of the offending field, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::InvalidParam { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
