//! First-order XVA pricing of European calls when both counterparties'
//! default intensities follow CIR processes correlated with the underlying,
//! plus a full-truncation Euler Monte Carlo benchmark of the exact price
//! representation.

pub mod blackscholes;
pub mod cir;
pub mod cli;
pub mod config;
pub mod curve;
pub mod error;
pub mod mc;
pub mod quad;
pub mod tables;
pub mod xva;

pub use error::{Error, Result};
