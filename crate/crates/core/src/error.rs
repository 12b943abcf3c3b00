use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path has {got} beads but {expected} were expected")]
    BeadCountMismatch { expected: usize, got: usize },

    #[error("dividing surface is singular on this path: {0}")]
    SingularSurface(&'static str),

    #[error("sampler did not converge: {0}")]
    NonConvergence(String),

    #[error("delta-window extrapolation is not monotone in the window width: {0}")]
    DivergentWindow(String),

    #[error("grid quadrature not converged: refinement changed the result by {change:.3e} (limit {limit:.1e})")]
    GridNotConverged { change: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
