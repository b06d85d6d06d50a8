use core::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter violated a construction invariant.
    Parameter(&'static str),
    /// Arguments outside the domain of an operation (e.g. unordered times).
    Domain(&'static str),
    /// A solver produced non-finite values or refused to run.
    Numerical(&'static str),
    /// A solver was requested for a noise/coupling case it does not handle.
    Incompatible(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::Incompatible(msg) => write!(f, "incompatible solver/case: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
