use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {evaluations} evaluations")]
    NonConvergence {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("integrand returned a non-finite value at x = {at:e}")]
    NonFinite { at: f64 },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("signature admits no hyperbolic structure: 2g-2+p+sum(1-1/q) = {0}")]
    Signature(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("alpha = {0} coincides with a listed small eigenvalue")]
    AlphaCollision(f64),

    #[error("test function is not admissible: {0}")]
    Admissibility(String),

    #[error("scattering model rejected: {0}")]
    ModelValidation(String),

    #[error("continuation needs Re(s) + n > 0, got Re(s) = {re_s} with n = {n}")]
    InsufficientSubtractions { re_s: f64, n: usize },

    #[error("pole at s = {0}")]
    Pole(String),

    #[error("Re(z) = {re_z} lies outside the admissible strip Re(z) > {bound}")]
    StripViolation { re_z: f64, bound: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("series diverges: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for failures caused by numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NonFinite { .. } | Error::IllConditioned(_)
        )
    }
}
