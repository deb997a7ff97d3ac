// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Which part of the objective produced a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    R,
    F,
    G,
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Term::R => write!(f, "r"),
            Term::F => write!(f, "f"),
            Term::G => write!(f, "g"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value produced by {term}_{index}")]
    NonFinite { term: Term, index: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("one-dimensional inner solve did not converge within {0} steps")]
    Convergence(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("problem is incompatible with {solver}: {reason}")]
    Incompatible { solver: &'static str, reason: String },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
