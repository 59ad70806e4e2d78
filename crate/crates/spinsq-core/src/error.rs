use alloc::string::String;
use core::fmt;

/// Errors reported by this crate.
///
/// `InvalidArgument`, `NonHermitian` and `InconsistentMoments` signal bad
/// inputs; `Capacity` and `Numeric` signal resource or floating-point trouble.
/// The CLI maps the first group to exit code 2 and the second to 3.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested system size exceeds the configured qubit cap.
    Capacity { qubits: usize, cap: usize },
    /// A precondition on an argument failed.
    InvalidArgument(String),
    /// Input operator is not Hermitian within tolerance.
    NonHermitian { asymmetry: f64 },
    /// Moments violate a bound that holds for every quantum state.
    InconsistentMoments { margin: f64 },
    /// A numerical routine failed (non-finite values, no convergence).
    Numeric(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capacity { qubits, cap } => {
                write!(f, "{qubits} qubit sites exceed the configured cap of {cap}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonHermitian { asymmetry } => {
                write!(
                    f,
                    "operator is not Hermitian (max asymmetry {asymmetry:.3e})"
                )
            }
            Error::InconsistentMoments { margin } => write!(
                f,
                "moments are inconsistent with any quantum state (margin {margin:.3e})"
            ),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Error {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than numeric/capacity limits.
    pub fn is_argument_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::NonHermitian { .. }
                | Error::InconsistentMoments { .. }
        )
    }
}
