use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{what} did not converge: refinement changed the result by {change:.3e} (tolerance {tol:.3e})")]
    NonConvergence {
        what: String,
        change: f64,
        tol: f64,
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{what} vanishes near omega = {omega:.6}; choose an interval avoiding it")]
    ZeroCrossing { what: String, omega: f64 },

    #[error("Chebyshev fit unresolved: trailing coefficient ratio {ratio:.3e} exceeds {tol:.3e}")]
    Unresolved { ratio: f64, tol: f64 },

    #[error("inadmissible deformation: {0}")]
    Inadmissible(String),

    #[error("finite-difference step too large: h vs h/2 disagree by {change:.3e} (tolerance {tol:.3e})")]
    StepTooLarge { change: f64, tol: f64 },

    #[error("eigensolver failed to converge after {0} iterations")]
    EigenNonConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
