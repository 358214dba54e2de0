use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("grid of {cells} cells exceeds the limit of {limit}")]
    Oversize { cells: usize, limit: usize },
    #[error("{0}")]
    NoTransition(String),
    #[error("insufficient statistics: {0}")]
    Statistics(String),
    #[error("singular surface at theta={theta}, segment {segment}")]
    Singular { theta: f64, segment: usize },
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Oversize { .. } => 3,
            CliError::NoTransition(_) => 4,
            CliError::Statistics(_) => 5,
            CliError::Singular { .. } => 6,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<geophase::Error> for CliError {
    fn from(e: geophase::Error) -> Self {
        use geophase::Error as E;
        match e {
            E::Domain(_) => CliError::Config(e.to_string()),
            E::NoTransition(_) => CliError::NoTransition(e.to_string()),
            E::SingularSurface { theta, segment } => CliError::Singular { theta, segment },
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
