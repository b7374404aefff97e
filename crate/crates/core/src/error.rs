use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("no such file or directory: {}", .0.display())]
    MissingPath(PathBuf),

    #[error("{}: line {line}: {reason}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("corpus contains no documents")]
    EmptyCorpus,

    #[error("corpus contains no tokens after normalization")]
    NoTokens,

    #[error("matrix has no rows")]
    EmptyMatrix,

    #[error("at least {needed} distinct terms are required, found {found}")]
    TooFewTerms { needed: usize, found: usize },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("seed range [{lo}, {hi}] contains no items")]
    EmptySeedRange { lo: u64, hi: u64 },

    #[error("no rows fall inside the frequency band [{min}, {max}]")]
    EmptyBand { min: f64, max: f64 },

    #[error("no links survive the reduction")]
    EmptyGraph,

    #[error("row `{0}` has no nonzero entries")]
    ZeroRow(String),

    #[error("unsupported language `{0}`")]
    UnsupportedLanguage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the input files rather than by the analysis.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::MissingPath(_)
                | Error::MalformedLine { .. }
                | Error::DuplicateId(_)
        )
    }
}
