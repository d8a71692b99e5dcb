use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("block signatures differ: {left:?} vs {right:?}")]
    SignatureMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("malformed element: {0}")]
    Malformed(String),
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),
    #[error("element is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },
    #[error("element is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("element is not a projection (residual {residual:e})")]
    NotProjection { residual: f64 },
    #[error("element is not normal (commutator norm {residual:e})")]
    NotNormal { residual: f64 },
    #[error("generators do not commute (commutator norm {residual:e})")]
    NotCommuting { residual: f64 },
    #[error("subalgebra is not contained in the ambient subalgebra (residual {residual:e})")]
    NotContained { residual: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NonConvergence { sweeps: usize, off: f64 },
    #[error("sequence term at index {index} violates the declared tail bound ({distance:e} > {bound:e})")]
    EnvelopeViolation {
        index: u64,
        distance: f64,
        bound: f64,
    },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("point {0} is not in the spectrum")]
    UnknownPoint(String),
    #[error("spectral function is not defined at {0}")]
    IncompleteFunction(String),
    #[error("ordering does not enumerate the spectrum exactly once")]
    IncompleteOrdering,
    #[error("spectrum has {0} points; subset enumeration is limited to 12")]
    TooManyPoints(usize),
    #[error("element is zero")]
    ZeroElement,
    #[error("cut point {mu} outside (0, {norm})")]
    BadCut { mu: f64, norm: f64 },
    #[error("regularized sequence gap {gap:e} exceeds the rate bound {bound:e} at n = {n}")]
    SlowConvergence { n: u64, gap: f64, bound: f64 },
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;
