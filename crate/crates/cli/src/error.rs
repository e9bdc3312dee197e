use thiserror::Error;

/// A command failure, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, bad config, unreadable file: exit code 2.
    #[error("{0}")]
    User(String),
    /// Degenerate geometry or a numeric failure: exit code 3.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    /// Prefixes the message with `context: `, keeping the class.
    pub fn context(self, context: impl std::fmt::Display) -> Self {
        match self {
            CliError::User(m) => CliError::User(format!("{context}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{context}: {m}")),
        }
    }
}

impl From<gensphere::Error> for CliError {
    fn from(e: gensphere::Error) -> Self {
        use gensphere::Error::*;
        match e {
            InvalidArgument(_) | UnsupportedFormat(_) => CliError::User(e.to_string()),
            DegenerateGeometry(_) | NumericDomain(_) | ContourUnbounded(_) | DegenerateContour(_) | NoConvergence(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::User(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn write_file(path: &std::path::Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))
}
