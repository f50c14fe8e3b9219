use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Malformed or inconsistent input (unknown ids, parameter out of range,
    /// non-neighboring election pair, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An enumeration or state-space cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// A condition that is supposed to be impossible was observed.
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
