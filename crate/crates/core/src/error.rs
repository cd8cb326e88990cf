use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration field violates its invariant. `field` is the dotted
    /// path of the offending field relative to its config struct.
    InvalidConfig { field: &'static str, reason: &'static str },
    /// A scalar input fell outside its documented domain.
    OutOfRange { what: &'static str, value: f64 },
    /// An operation that needs at least one element got none.
    Empty(&'static str),
    /// POI placement could not satisfy the minimum separation.
    PlacementFailed { placed: usize, attempts: u32 },
    /// A lower module was called in a state its contract forbids.
    ContractViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig { field, reason } => write!(f, "{field}: {reason}"),
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::Empty(what) => write!(f, "{what} must not be empty"),
            Error::PlacementFailed { placed, attempts } => {
                write!(f, "could not place POI #{placed} after {attempts} attempts (min separation too large?)")
            }
            Error::ContractViolation(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { what, value })
    }
}
