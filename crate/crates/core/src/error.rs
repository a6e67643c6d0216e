use thiserror::Error;

use crate::params::Device;

/// Errors raised by the library surface.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("configuration is for {found:?}, operation expects {expected:?}")]
    DeviceMismatch { expected: Device, found: Device },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("table does not cover entry (i={i}, k={k}, n={n})")]
    Coverage { i: i64, k: i64, n: i64 },

    #[error("{what} did not converge (remaining bound {bound:e} at cutoff {cutoff})")]
    NotConverged {
        what: &'static str,
        bound: f64,
        cutoff: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
