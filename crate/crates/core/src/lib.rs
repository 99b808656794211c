//! Permutation diffusion auctions over social networks.
//!
//! A seller sells either `k` homogeneous units or a set of heterogeneous
//! items to buyers who can only join the market through reported social
//! ties. This crate provides:
//!
//! - [`model`]: agents, valuations, reported profiles and feasible sets,
//! - [`welfare`]: constrained welfare maximization with irrevocable prior
//!   allocations, plus an exhaustive oracle,
//! - [`shapley`]: exact and sampled Shapley contributions,
//! - [`mechanism`]: PDA and CPDA per order, their exact and sampled
//!   expectations, and a Clarke-pivot VCG baseline,
//! - [`analysis`]: fairness, incentive, participation, unsold-rate and
//!   revenue audits,
//! - [`harness`]: random instance generation, the batch experiment, and
//!   JSON / CSV file formats.
//!
//! All values are exact rationals. Floats only appear in sampled
//! estimates and in CSV output.

pub mod analysis;
mod error;
pub mod fixtures;
pub mod harness;
pub mod mechanism;
pub mod model;
mod orders;
pub mod rational;
pub mod shapley;
pub mod welfare;

pub use error::{Error, Result};
pub use rational::Rational;

/// Largest number of agents (seller included) for exact order enumeration.
pub const EXACT_ORDER_LIMIT: usize = 9;

/// Largest number of agents (seller included) for exact coalition enumeration.
pub const EXACT_COALITION_LIMIT: usize = 12;
