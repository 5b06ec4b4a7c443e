use thiserror::Error;

use crate::translate_frame::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid interval [{0}, {1})")]
    InvalidInterval(f64, f64),

    #[error("exponent p = {0} must satisfy 1 < p < inf")]
    InvalidExponent(f64),

    #[error("coefficient vector has l2 norm {0}, expected 1")]
    NotUnitNorm(f64),

    #[error("coefficient vector is empty")]
    EmptyCoefficients,

    #[error("resolution {resolution} cannot hold {active} distinct Rademacher functions")]
    ResolutionTooSmall { resolution: u32, active: usize },

    #[error("generator rejected: {0}")]
    GeneratorRejected(Box<ValidationReport>),

    #[error("invalid wavelet system: {0}")]
    InvalidWavelet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
