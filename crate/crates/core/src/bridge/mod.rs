//! Everything that sits between the environment and the outside world: the
//! line-oriented JSON protocol and its server, baseline policies, the
//! exhaustive grid oracle, per-slot metrics and parameter sweeps.

pub mod metrics;
pub mod oracle;
pub mod policy;
pub mod protocol;
pub mod server;
pub mod sweep;
