use thiserror::Error;

use crate::funcs::Interval;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} is outside the domain {domain} ({reason})")]
    Domain {
        t: f64,
        domain: Interval,
        reason: &'static str,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },

    #[error("eigenvalue {eigenvalue} leaves the domain {domain}")]
    Spectrum { eigenvalue: f64, domain: Interval },

    #[error("sampling gave up after {rejections} rejections: {reason}")]
    Sampling { rejections: usize, reason: String },

    #[error("unknown implication `{0}`")]
    UnknownImplication(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
