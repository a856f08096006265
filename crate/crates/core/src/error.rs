use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the documented domain of an operation.
    InvalidParameter {
        /// Parameter name.
        name: &'static str,
        /// Why it was rejected.
        reason: String,
    },
    /// The scale function vanishes where it has to be positive.
    DegenerateScale {
        /// Point at which `g` was evaluated.
        at: f64,
    },
    /// The requested law has an infinite second moment.
    InfiniteVariance,
    /// A tail grid cannot support the trailing-window limits.
    GridTooShort {
        /// What was missing.
        reason: String,
    },
    /// The tilting equation has no root: the target lies beyond what the
    /// bounded summands can reach.
    TiltUnreachable {
        /// Required per-summand mean.
        required_mean: f64,
        /// Supremum of the summand support.
        support_max: f64,
    },
    /// A hypothesis of the triangular-array estimator failed.
    ArrayHypothesis {
        /// Which hypothesis failed.
        reason: String,
    },
    /// Exhaustive enumeration would exceed the configured limit.
    EnumerationTooLarge {
        /// Number of outcomes requested.
        outcomes: u128,
        /// Configured maximum.
        limit: u128,
    },
    /// Inputs fall outside the validity window of an inequality.
    OutsideValidityWindow {
        /// Description of the violated condition.
        reason: String,
    },
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::DegenerateScale { at } => {
                write!(f, "scale function is not positive at {at}")
            }
            Error::InfiniteVariance => write!(f, "law has infinite second moment"),
            Error::GridTooShort { reason } => write!(f, "tail grid too short: {reason}"),
            Error::TiltUnreachable {
                required_mean,
                support_max,
            } => write!(
                f,
                "tilting target unreachable: per-summand mean {required_mean} \
                 is not below the support maximum {support_max}"
            ),
            Error::ArrayHypothesis { reason } => {
                write!(f, "triangular array hypothesis violated: {reason}")
            }
            Error::EnumerationTooLarge { outcomes, limit } => {
                write!(
                    f,
                    "enumeration of {outcomes} outcomes exceeds limit {limit}"
                )
            }
            Error::OutsideValidityWindow { reason } => {
                write!(f, "outside validity window: {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
