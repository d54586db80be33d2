use thiserror::Error;

/// Errors raised by the operator, tableau and integrator routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular (pivot {pivot:e} below {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("invalid stage count {stages} for {family}")]
    InvalidStageCount { family: String, stages: usize },

    #[error("nodes are not pairwise distinct")]
    DuplicateNodes,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("SAT matrix D + M⁻¹ t_L t_Lᵀ is singular: min |eigenvalue| = {min_abs_eigenvalue:e}")]
    SingularSatMatrix { min_abs_eigenvalue: f64 },

    #[error("operator violates the SBP property (residual {residual:e})")]
    SbpViolation { residual: f64 },

    #[error("tableau matrix A is not invertible")]
    SingularTableau,

    #[error("Newton iteration diverged{} after {iterations} iterations (residual {residual:e})",
        .block.map(|b| format!(" in block {b}")).unwrap_or_default())]
    NewtonDivergence {
        block: Option<usize>,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
