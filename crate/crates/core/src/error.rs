use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset `{0}` (run `list-presets` for the catalog)")]
    UnknownPreset(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {constraint}")]
    InvalidValue { key: String, constraint: String },

    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),

    #[error("{operation} is not supported for the {variant} model")]
    UnsupportedModel {
        operation: &'static str,
        variant: &'static str,
    },

    #[error("integration diverged at t = {t} (non-finite state)")]
    Diverged { t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e}, |state| = {norm:e}); the solution is blowing up or too stiff for the explicit solver")]
    StepUnderflow { t: f64, h: f64, norm: f64 },

    #[error("non-Hermitian mechanical force at t = {t}: Im(dp) = {imag:e}")]
    NonHermitian { t: f64, imag: f64 },

    #[error("physicality violation: {quantity} = {value:e} at t = {t}")]
    Physicality {
        quantity: &'static str,
        value: f64,
        t: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient oscillation: {0}")]
    InsufficientOscillation(String),

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(key: &str, constraint: impl Into<String>) -> Self {
        Error::InvalidValue {
            key: key.to_string(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
