//! Trust models, a continuous grid-world search-and-rescue simulator and a
//! tabular Q-learning task allocator for multi-human multi-robot teams.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration files and
//! the experiment harness live in the `sartrust` crate.
//!
//! Layout:
//!
//! - [`trust`]: the five trust models (NoTrust, Monir, Xu–Dudek, Guo–Yang,
//!   expectation-confirmation) as pure update functions, plus the
//!   [`trust::TrustEstimator`] wrapper the engine holds per human/robot pair.
//! - [`environment`]: arena, POIs, terrain, agent kinematics and sensing.
//! - [`allocation`]: Q-table, epsilon-greedy policy, rewards and greedy
//!   trust-and-distance task assignment.
//! - [`engine`]: one seeded episode from team construction to result.
//! - [`metrics`]: task success rate, average completion time, run summaries.
//! - [`rng`]: named deterministic random substreams.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod allocation;
pub mod engine;
pub mod environment;
mod error;
pub mod metrics;
pub mod rng;
pub mod trust;

pub use error::{Error, Result};

/// Episode length cap in one-second steps.
pub const EPISODE_STEP_CAP: u32 = 500;
