use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },

    #[error(transparent)]
    Core(#[from] shapelab_core::Error),

    #[error("domain `{id}`: {source}")]
    Domain { id: String, source: Box<CliError> },

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

impl CliError {
    /// 1 for bad input, 2 for a failed verification, 3 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        use shapelab_core::Error as E;
        match self {
            CliError::Verification { .. } => 2,
            CliError::Domain { source, .. } => source.exit_code(),
            CliError::Core(E::Numeric(_) | E::Accuracy { .. } | E::Optimization(_) | E::Resource(_)) => 3,
            _ => 1,
        }
    }
}
