use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("triangular factor is singular at index {index}")]
    SingularR { index: usize },
    #[error("singular linear system{}", .mode.map(|(m, j)| format!(" for mode (m={m}, j={j})")).unwrap_or_default())]
    SingularSystem { mode: Option<(usize, usize)> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid mode index (n={n}, m={m}, j={j})")]
    InvalidMode { n: usize, m: usize, j: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("mesh error: {0}")]
    MeshError(String),
    #[error("unknown right-hand side id '{0}'")]
    UnknownRhs(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
