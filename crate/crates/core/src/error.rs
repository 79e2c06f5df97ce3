use alloc::string::String;

/// Every failure mode of the library. Variants line up one-to-one with the
/// CLI exit-code classes. Block and step indices are one-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("matrix is not block circulant: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    Structure { deviation: f64, tolerance: f64 },
    #[error("slice index {index} out of range 1..={count}")]
    SliceIndex { index: usize, count: usize },
    #[error("singular Fourier block {block}")]
    Singular { block: usize },
    #[error("T-index {index} too large: {reason}")]
    TIndex { index: usize, reason: &'static str },
    #[error("zero pivot in Fourier block {block} at elimination step {step}")]
    Pivot { block: usize, step: usize },
    #[error("T-eigenvalue modulus {modulus} is outside the convergence radius {radius}")]
    Radius { modulus: f64, radius: f64 },
    #[error("spectrum outside the function domain: {0}")]
    Domain(String),
    #[error("ill-conditioned spectral structure: {0}")]
    IllConditioned(String),
    #[error("iteration did not converge: {0}")]
    Convergence(String),
    #[error("tensors do not commute: commutator norm {norm:.3e}")]
    NotCommuting { norm: f64 },
    #[error("tensor is not F-diagonalizable (Fourier block {block})")]
    NotDiagonalizable { block: usize },
    #[error("tensor is not Hermitian: deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("dense oracle input too large: n*p = {size} exceeds {limit}")]
    OracleTooLarge { size: usize, limit: usize },
}

pub type Result<T> = core::result::Result<T, TensorError>;

pub(crate) fn shape_err(msg: impl Into<String>) -> TensorError {
    TensorError::Shape(msg.into())
}
