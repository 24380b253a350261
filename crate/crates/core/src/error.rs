use std::fmt;

use serde::{Deserialize, Serialize};

/// Where a divergent integral blows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Origin,
    Infinity,
    Singularity,
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Origin => "the origin",
            End::Infinity => "infinity",
            End::Singularity => "an interior singularity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integral diverges at {end} (fitted exponent {exponent:.4}, partial value {partial:e})")]
    Divergent { end: End, exponent: f64, partial: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Precondition(String),

    #[error("index {index} outside the valid range {valid}")]
    Range { index: i64, valid: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
