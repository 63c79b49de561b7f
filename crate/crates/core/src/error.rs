use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Exhaustive enumeration would visit more configurations than allowed.
    #[error("enumeration of {states}^{sites} configurations exceeds the cap of {cap}")]
    ResourceLimit { states: usize, sites: usize, cap: u64 },

    /// Coupling from the past did not coalesce within the allowed horizon.
    #[error("coupling from the past did not coalesce; last horizon tried was {last_horizon} sweeps")]
    NoCoalescence { last_horizon: u64 },

    #[error("grid point {param} = {value}: {source}")]
    GridPoint {
        param: String,
        value: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Strips any grid-point wrapping and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::GridPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
