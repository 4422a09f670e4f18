use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input polygon violates convexity, orientation or vertex separation.
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A caller asked for something the data cannot certify, e.g. a Riesz
    /// mean above the completeness threshold of a spectrum.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// FEM error estimate for eigenvalue `index` (1-based) stayed above the
    /// requested tolerance at the finest admissible mesh.
    #[error("accuracy target unreachable at eigenvalue {index}: {detail}")]
    Accuracy { index: usize, detail: String },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
