use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("series `{label}`: {message}")]
    Series { label: String, message: String },
    #[error("no observation for rebase month {month}")]
    RebaseMissing { month: String },
    #[error(transparent)]
    Model(#[from] singularity_core::error::Error),
}
