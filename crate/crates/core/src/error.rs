use thiserror::Error;

/// Errors produced by the library.
///
/// Variants split into two families: bad caller input (shapes, indices,
/// preconditions) and numerical failures (non-convergence, negative
/// spectra, decompositions that fail their reconstruction gate).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("total dimension {total} exceeds the supported cap of {cap}")]
    SizeCap { total: usize, cap: usize },

    #[error("{routine} did not converge within {sweeps} sweeps")]
    NoConvergence {
        routine: &'static str,
        sweeps: usize,
    },

    #[error("eigenvalue {value:e} is below the clipping tolerance -{tol:e}")]
    NegativeEigenvalue { value: f64, tol: f64 },

    #[error("decomposition does not reproduce the state (residual {residual:e} > {tol:e})")]
    DecompositionMismatch { residual: f64, tol: f64 },

    #[error("state file: {0}")]
    StateFile(String),
}

impl Error {
    /// True for failures of the numerical layer rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::NegativeEigenvalue { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
