//! Error type shared across the crate.

use std::fmt;

/// Errors produced by pricing, simulation and configuration code.
#[derive(Debug)]
pub enum Error {
    /// An argument violates a documented precondition (ordering, sign, range).
    Domain(String),
    /// Adaptive quadrature exhausted its panel budget before reaching tolerance.
    QuadratureNonConvergence {
        integral: f64,
        error_estimate: f64,
        tolerance: f64,
        panels: usize,
    },
    /// A configuration file is missing, malformed or inconsistent. `key` is
    /// the fully qualified `section.field` path when one applies.
    Config { key: String, message: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::QuadratureNonConvergence {
                integral,
                error_estimate,
                tolerance,
                panels,
            } => write!(
                f,
                "quadrature failed to converge: integral={integral:e} \
                 error={error_estimate:e} tolerance={tolerance:e} after {panels} panels"
            ),
            Error::Config { key, message } => {
                if key.is_empty() {
                    write!(f, "config error: {message}")
                } else {
                    write!(f, "config error at `{key}`: {message}")
                }
            }
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
