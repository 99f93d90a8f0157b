use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KahlerError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The matrix is not of the form [[X, -Y], [Y, X]] and therefore not the
    /// lift of any complex operator.
    #[error("block structure violated: residual {residual:e} exceeds tolerance {tol:e}")]
    StructureViolation { residual: f64, tol: f64 },

    #[error("operator is not Hermitian: residual {residual:e} exceeds tolerance {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("operator is not a projector: idempotence residual {idempotence:e}, hermiticity residual {hermiticity:e}, tolerance {tol:e}")]
    NotAProjector {
        idempotence: f64,
        hermiticity: f64,
        tol: f64,
    },

    #[error("state is not normalized: g-norm squared {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("measurement branch has probability {probability:e}; post-measurement state undefined")]
    ZeroProbabilityBranch { probability: f64 },

    #[error("linear solve failed: residual {residual:e}")]
    SolverFailure { residual: f64 },

    #[error("search space of size {size} exceeds budget {budget}")]
    SearchSpaceTooLarge { size: u128, budget: u128 },

    #[error("test state does not vanish near the boundary: |psi| = {magnitude:e} at index {index}")]
    BoundarySupport { index: usize, magnitude: f64 },
}

pub type Result<T, E = KahlerError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(KahlerError::DimensionMismatch { expected, found })
    }
}
