use effgap_core::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(Error),
    #[error("solver failures exceeded the threshold: {0}")]
    SolverThreshold(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) | CliError::Io(_) => 2,
            CliError::SolverThreshold(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::InvalidParameter(_)
            | Error::InvalidLevel(_)
            | Error::MissingLevel(_)
            | Error::EmptyList(_)
            | Error::UnknownEquation(_)
            | Error::Parse { .. }
            | Error::NotNormalized { .. } => CliError::Config(e.to_string()),
            Error::MleNoConvergence => CliError::SolverThreshold(e.to_string()),
            _ => CliError::Numeric(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
