use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("channel truncated to {num_taps} taps carries no energy above the floor")]
    DegenerateTruncation { num_taps: usize },

    #[error("tap {0} has zero norm")]
    DegenerateTap(usize),

    #[error("paths {0} and {1} share the same angle of arrival")]
    CoincidentAngles(usize, usize),

    #[error("input is all zeros")]
    ZeroInput,

    #[error("input is empty")]
    Empty,

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
