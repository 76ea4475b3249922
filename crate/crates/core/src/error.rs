use thiserror::Error;

/// Domain errors raised by the library. Every variant is a caller mistake;
/// none of them depends on the numerical path taken.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} must be positive")]
    NotPositive(&'static str),

    #[error("{name} must be at least {min}, got {value}")]
    TooSmall {
        name: &'static str,
        min: u64,
        value: u64,
    },

    #[error("precision must be at least {min} bits, got {value}")]
    Precision { min: u32, value: u32 },

    #[error("unsupported exponent s = {s}: {reason}")]
    UnsupportedExponent { s: i64, reason: &'static str },

    #[error("unsupported sequence: {0}")]
    UnsupportedSequence(String),

    #[error("{0} is not applicable to this identity")]
    NotApplicable(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn at_least(name: &'static str, min: u64, value: u64) -> Result<()> {
    if value < min {
        Err(Error::TooSmall { name, min, value })
    } else {
        Ok(())
    }
}
