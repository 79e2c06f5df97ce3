use std::path::PathBuf;

use ttensor::TensorError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const SHAPE: i32 = 3;
    pub const SINGULAR: i32 = 4;
    pub const RADIUS: i32 = 5;
    pub const ILL_CONDITIONED: i32 = 6;
    pub const VERIFY: i32 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("bad tensor file: {0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("verification failed: {0}")]
    Verify(String),
}

/// Exit code of a library error.
pub fn tensor_exit_code(e: &TensorError) -> i32 {
    use TensorError::*;
    match e {
        NonFinite(_) | Structure { .. } => exit::INPUT,
        Shape(_) | SliceIndex { .. } | OracleTooLarge { .. } | NotHermitian { .. } => exit::SHAPE,
        Singular { .. } | TIndex { .. } | Pivot { .. } => exit::SINGULAR,
        Radius { .. } | Domain(_) => exit::RADIUS,
        IllConditioned(_) | Convergence(_) | NotCommuting { .. } | NotDiagonalizable { .. } => exit::ILL_CONDITIONED,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Format(_) | CliError::Usage(_) => exit::INPUT,
            CliError::Tensor(e) => tensor_exit_code(e),
            CliError::Verify(_) => exit::VERIFY,
        }
    }
}
