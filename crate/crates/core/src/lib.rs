//! Secure transmission over sparse angle-domain massive MIMO channels.
//!
//! Alice sends a few streams on selected dominant beams and artificial noise
//! on the non-dominant ones; Bob and a passive, noiseless Eve observe the
//! result through RF-chain-limited receivers. The crate simulates the chain
//! and computes ergodic secrecy rates by Monte Carlo and in closed form.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod experiments;
pub mod config;
pub mod error;
pub mod linalg;
pub mod rates;
pub mod scheme;

pub use config::{SystemConfig, ValidationReport, Violation};
pub use error::{Error, Result};
pub use rates::{Method, RateReport, SparsityMetrics};
