use thiserror::Error;

/// Errors raised by the numerical routines and the PSF loader.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tolerance:e} within {evaluations} evaluations")]
    QuadratureFailure { tolerance: f64, evaluations: usize },

    #[error("optimization failure: {0}")]
    OptimizationFailure(String),

    #[error("point-spread function is not mirror symmetric about the y-axis (max deviation {0:e})")]
    AsymmetricPsf(f64),

    #[error("point-spread function is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("point-spread function has complex amplitudes (max imaginary part {0:e})")]
    ComplexAmplitude(f64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
