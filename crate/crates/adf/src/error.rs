use std::fmt;

/// Errors reported by filter construction, streaming and the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument violated its documented range. The message
    /// names the parameter and the constraint.
    InvalidParam(&'static str),
    /// A sample arrived with a timestamp not strictly greater than the
    /// previous one. The filter state is unchanged.
    NonMonotonicTime { prev: f64, next: f64 },
    /// A filter configured for a fixed sample period received a sample
    /// whose spacing disagrees with that period.
    UnevenSampling { expected: f64, got: f64 },
    /// A simulator or experiment configuration field is unusable. The
    /// message names the field and why it was rejected.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonMonotonicTime { prev, next } => {
                write!(f, "time must increase strictly: got {next} after {prev}")
            }
            Error::UnevenSampling { expected, got } => {
                write!(
                    f,
                    "uneven sampling: expected period {expected}, got {got}; \
                     use the irregular time base for non-uniform streams"
                )
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
