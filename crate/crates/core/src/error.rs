use thiserror::Error;

/// Errors produced by the calibration pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite probability entry at index {index}")]
    NonFinite { index: usize },

    #[error("negative probability mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("probability vector has no mass (sum = {sum})")]
    ZeroMass { sum: f64 },

    #[error("a probability vector needs at least 2 classes, got {got}")]
    TooFewClasses { got: usize },

    #[error("dimension mismatch: {left} vs {right} classes")]
    DimensionMismatch { left: usize, right: usize },

    #[error("grid would hold {requested} points, cap is {cap}")]
    ResourceLimit { requested: u128, cap: u128 },

    #[error("calibration set is empty")]
    EmptyCalibrationSet,

    #[error("miscoverage rate must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid credal bounds: {0}")]
    InvalidBounds(String),

    #[error("no input records")]
    EmptyInput,

    #[error("record {x_id} has no label")]
    MissingLabel { x_id: String },

    #[error("record {x_id} has no cloud distribution")]
    MissingCloud { x_id: String },

    #[error("label {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },

    #[error("optimizer stopped after {iterations} iterations with gradient norm {grad_norm:e}")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("posterior precision matrix is not positive definite")]
    SingularHessian,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by the run configuration rather than by the
    /// input data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ResourceLimit { .. }
                | Error::InvalidEpsilon(_)
                | Error::ConfigMismatch(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
