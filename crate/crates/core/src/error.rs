use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("contour is unbounded in direction {0:?}")]
    ContourUnbounded(Vec<f64>),
    #[error("degenerate contour: {0}")]
    DegenerateContour(String),
    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
