use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hermite recurrence overflow at order {order} (|value| = {magnitude:e})")]
    HermiteOverflow { order: usize, magnitude: f64 },

    #[error("Pochhammer factor (c)_{k} vanishes for c = {c}")]
    VanishingPochhammer { c: f64, k: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("non-finite {what} value at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("sequence is not J-orthonormal: [phi_{index}, phi_{index}] = {value} (tolerance {tolerance:e})")]
    NotJOrthonormal {
        index: usize,
        value: Complex64,
        tolerance: f64,
    },

    #[error("signs have not been certified for this system")]
    SignsAbsent,

    #[error("grid half-width {half_width} too small for the requested order; try L >= {suggested}")]
    GridTooSmall { half_width: f64, suggested: f64 },

    #[error("span of phi is numerically rank deficient (Gram condition number {condition:e})")]
    RankDeficientSpan { condition: f64 },

    #[error("finite section of the metric is not positive (eigenvalue {eigenvalue:e})")]
    NonPositiveSection { eigenvalue: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("parity defect {defect:e} of state {index} exceeds tolerance")]
    ParityDefect { index: usize, defect: f64 },

    #[error("grid does not resolve the requested states: {0}")]
    Unresolved(String),

    #[error("grid-side expansion coefficients disagree with span coefficients by {defect:e}")]
    CoefficientMismatch { defect: f64 },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
