use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a physical relation.
    #[error("{quantity} = {value} is outside the valid domain ({domain})")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("line {line}: invalid {field} = {value}")]
    Validation {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            domain,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(line: usize, field: &'static str, value: impl ToString) -> Self {
        Error::Validation {
            line,
            field,
            value: value.to_string(),
        }
    }

    /// Attach the file the error came from.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
