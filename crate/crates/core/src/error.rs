use thiserror::Error;

/// Errors shared across the numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An adaptive or extrapolated procedure failed to reach its tolerance.
    /// Usually signals a singular integrand handed to a plain routine.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// Input outside an operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An orbit landed exactly on 0, where the maps are undefined.
    /// The offending point is a measure-zero exception, not a bug.
    #[error("orbit hit zero at step {step}")]
    OrbitHitsZero { step: usize },

    /// A truncated series tail could not be certified below the requested
    /// tolerance for the given input.
    #[error("series tail not controlled: bound {bound:e} exceeds tolerance {tol:e}")]
    TailNotControlled { bound: f64, tol: f64 },

    /// Unregistered verification campaign id.
    #[error("unknown campaign {id:?}; valid ids: {known}")]
    UnknownCampaign { id: String, known: String },
}

pub type Result<T> = std::result::Result<T, Error>;
