use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::exterior::MAX_DIMENSION)]
    DimensionTooLarge(usize),

    #[error("form mixes grades {0:?}; dispatch per grade instead")]
    MixedGrade(Vec<usize>),

    #[error("expected a form of grade {expected}, found grade {found}")]
    GradeMismatch { expected: usize, found: usize },

    #[error("coefficient matrices have different sizes ({0} vs {1})")]
    MatrixSizeMismatch(usize, usize),

    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("finite-difference stencil of reach {reach} at {point:?} leaves the chart")]
    StencilOutsideChart { point: Vec<f64>, reach: f64 },

    #[error("point is not on the unit sphere (|p| = {0})")]
    NotOnSphere(f64),

    #[error("no eigenvalue within {tolerance} of -1 (closest: {closest})")]
    NoInstantonSubspace { closest: f64, tolerance: f64 },

    #[error("unknown structure `{0}` (expected `nk6` or `npg2`)")]
    UnknownStructure(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
