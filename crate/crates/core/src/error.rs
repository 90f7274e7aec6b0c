use thiserror::Error;

use crate::group::GroupKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group kinds differ: {left} vs {right}")]
    KindMismatch { left: GroupKind, right: GroupKind },

    #[error("matrix dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("non-finite values in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature band {available} is below the required {required}")]
    InsufficientBand { required: u32, available: u32 },

    #[error("irrep {0} is outside the symbol's irrep set")]
    IrrepNotInSet(String),

    #[error("point is not a node of the sampled grid")]
    NotOnGrid,

    #[error("characteristics violate an assumption: {0}")]
    Assumption(String),

    #[error("kernel is not a contraction: operator norm {norm}")]
    NotContraction { norm: f64 },

    #[error("ODE step size underflow at v = {at}")]
    StepUnderflow { at: f64 },

    #[error("subordination tail bound cannot be met: {0}")]
    DivergentQuadrature(String),

    #[error("estimate error bar {error_bar:e} exceeds tolerance {tol:e}")]
    ErrorBarTooLarge { error_bar: f64, tol: f64 },

    #[error("operator evaluation failed: {0}")]
    Operator(String),

    #[error("sampler failure: {0}")]
    Sampler(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
