use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("matrix is numerically singular (smallest pivot {pivot:e}, threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("SVD did not converge")]
    SvdNonConvergence,

    #[error("eigenvalue computation did not converge")]
    EigenNonConvergence,

    #[error("matrix exponential overflowed (norm {0:e})")]
    Overflow(f64),

    #[error(
        "no principal logarithm: eigenvalue {re:e}{im:+e}i lies on the closed negative real axis"
    )]
    NoPrincipalLog { re: f64, im: f64 },

    #[error("rank condition not met: numerical rank {rank} < state dimension {n}")]
    RankDeficient { rank: usize, n: usize },

    #[error("initial value is not in the data span (perpendicular norm {perp_norm:e})")]
    OutsideDataSpan { perp_norm: f64 },

    #[error("unknown tableau '{name}', expected one of: {options}")]
    UnknownTableau { name: String, options: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for the CLI: 1 assertion failure, 2 input/format
    /// error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CheckFailed(_) => 1,
            Error::DimensionMismatch(_)
            | Error::NonFinite { .. }
            | Error::Empty(_)
            | Error::InsufficientData(_)
            | Error::UnknownTableau { .. }
            | Error::InvalidArgument(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Parse(_) => 2,
            Error::Singular { .. }
            | Error::SvdNonConvergence
            | Error::EigenNonConvergence
            | Error::Overflow(_)
            | Error::NoPrincipalLog { .. }
            | Error::RankDeficient { .. }
            | Error::OutsideDataSpan { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
