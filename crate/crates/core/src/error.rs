use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::scattering::Channel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("mode expression failed at z = {z}: {source}")]
    ModeEval {
        z: f64,
        #[source]
        source: EvalError,
    },

    #[error("channel {channel} at k/kappa = {k}: unitarity defect {defect:.3e} exceeds {tol:.1e}")]
    Unitarity {
        channel: Channel,
        k: f64,
        defect: f64,
        tol: f64,
    },

    #[error("channel {channel} at k/kappa = {k}: {source}")]
    InChannel {
        channel: Channel,
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no amplitudes for channel {0}")]
    MissingChannel(Channel),

    #[error("state has norm {norm:.15}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True when the failure came from input validation rather than numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation(_)
            | Error::Parse(_)
            | Error::NotNormalized { .. }
            | Error::MissingChannel(_)
            | Error::Json(_) => true,
            Error::Stage { source, .. } | Error::InChannel { source, .. } => source.is_validation(),
            Error::ModeEval { .. } | Error::Unitarity { .. } => false,
        }
    }
}
