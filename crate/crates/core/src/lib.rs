//! Simulation and bounds for two-step in-network coding over erasure
//! channels with a random directed graph code.

pub mod bitlinalg;
pub mod bounds;
pub mod channel;
pub mod experiments;
pub mod protocol;
pub mod stats;
pub mod topology;
