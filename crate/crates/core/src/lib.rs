//! Simulator and reinforcement-learning environment for a wireless network
//! assisted by two reconfigurable intelligent surfaces: one fixed on a
//! building and one carried by a UAV.
//!
//! The crate is layered bottom-up:
//!
//! * [`scenario`]: configuration, unit conversion, geometry, UAV mobility.
//! * [`channel`]: per-slot Rician channels with jittered line-of-sight angles.
//! * [`signal`]: phase-shift matrices, cascaded channels, SINR and rates.
//! * [`env`]: the slot-stepped decision process with reward and lifecycle.
//! * [`bridge`]: wire protocol server, baseline policies, exhaustive oracle,
//!   metrics and sweeps used by the command-line tool.

pub mod bridge;
pub mod channel;
pub mod cli;
pub mod env;
mod error;
pub mod scenario;
pub mod signal;
pub mod stats;

pub use error::{Error, Result};
