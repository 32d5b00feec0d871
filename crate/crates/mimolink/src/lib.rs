//! Link-level Monte Carlo simulator for a 2x2 MIMO OFDM downlink.
//!
//! Compares spatial multiplexing against SFBC transmit diversity over a
//! Kronecker-correlated Rayleigh/Rician multipath channel: per-subframe
//! CRC-gated throughput fraction, ergodic capacity, parameter sweeps with
//! CSV output, and statistical self-validation.

pub mod capacity;
pub mod cli;
pub mod corrchan;
pub mod error;
pub mod linalg;
pub mod linkctl;
pub mod phy;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
pub use rng::Stream;
