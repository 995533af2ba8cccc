//! Simulation and configuration search for RIS-assisted multi-user SISO
//! interference networks.
//!
//! The crate is split along the data flow of one Monte-Carlo trial:
//!
//! * [`channel`] draws Rician Tx→RIS and Rayleigh RIS→Rx channels, plus
//!   optional additive CSI estimation error.
//! * [`ris`] turns switch patterns (S-RIS, interconnected I-RIS, b-bit
//!   phase shifters) into the effective M×M transfer matrix.
//! * [`metrics`] evaluates per-user SINR, rates and network objectives.
//! * [`optimizer`] searches the configuration space (exhaustive oracle,
//!   greedy bit flips, block-coordinate cell search, simulated annealing).
//! * [`harness`] runs seeded parameter sweeps and writes CSV result rows.
//!
//! User, receiver and element indices are 1-based on every public
//! interface that accepts them, matching the usual j, k, m notation.

pub mod channel;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod optimizer;
pub mod ris;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
