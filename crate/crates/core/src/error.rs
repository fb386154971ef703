use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is singular or badly scaled (|det| = {det_modulus:e})")]
    SingularGroupElement { det_modulus: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the principal-logarithm disk |z - 1| < 1")]
    SpectrumOutOfDomain { eigenvalue: String },

    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("form of degree {expected} evaluated on a frame of {got} vectors")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("quadrature degree {requested} on the {q}-simplex exceeds the supported maximum {max}")]
    UnsupportedDegree { q: usize, requested: usize, max: usize },

    #[error("point left the log chart: |log g| = {norm:.4} >= radius {radius}")]
    ChartOverflow { norm: f64, radius: f64 },

    #[error("Richardson disagreement {disagreement:e} exceeds allowance {allowance:e}")]
    StepTooLarge { disagreement: f64, allowance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("output error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
