use thiserror::Error;

/// Errors raised by the simulator and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity does not exist for this input (zero overlap,
    /// vanishing qubit component, antipodal geodesic endpoints).
    #[error("undefined: {0}")]
    Undefined(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("{what} did not converge (residual {residual:e})")]
    Numeric { what: String, residual: f64 },

    /// Winding number undefined for this curve.
    #[error("Chern number undefined: {0}")]
    UndefinedChern(String),

    /// The reconstructed trajectory surface contains an undefined geodesic.
    #[error("singular surface at theta={theta}, segment {segment}")]
    SingularSurface { theta: f64, segment: usize },

    /// No Chern flip was found while scanning the strength range.
    #[error("no topological transition found: {0}")]
    NoTransition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
