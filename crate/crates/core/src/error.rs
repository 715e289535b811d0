use alloc::string::String;
use core::fmt;

/// Failure of one of the layout stages.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates an operation's precondition.
    InvalidArgument(String),
    /// The routing graph cannot host a port.
    ConstructionFailure(String),
    /// No path joins the two ports of an edge.
    RoutingFailure { edge: u32 },
    /// A bug: an invariant the algorithm maintains was found broken.
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ConstructionFailure(msg) => write!(f, "routing graph construction failed: {msg}"),
            Error::RoutingFailure { edge } => write!(f, "edge {edge} cannot be routed"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
