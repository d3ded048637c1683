//! Numerical analysis of a distributed fault-tolerant architecture built from
//! four-qubit nodes joined by noisy entangling channels.
//!
//! The pipeline runs in the Pauli-diagonal probability representation:
//!
//! 1. [`purify`] pumps noisy channel pairs into a high-fidelity pair.
//! 2. [`ttg`] turns the purified pair and local noise into the error table of
//!    a teleportation-based two-qubit gate.
//! 3. [`threshold`] aggregates gate tables into the error model of the
//!    topological code and checks the fault-tolerance conditions.
//! 4. [`resource`] counts the cost per teleported gate and the total overhead.

pub mod cli;
pub mod error;
pub mod pauli;
pub mod purify;
pub mod resource;
pub mod threshold;
pub mod ttg;
pub mod verify;

pub use error::{Error, Result};
pub use pauli::{ChannelParams, FidelityVector, NoiseConvention, NoiseParams, PauliLabel};
pub use purify::{PumpResult, PumpSchedule};

/// Crate version embedded in every emitted file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
