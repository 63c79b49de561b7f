//! Discrete Markov random fields on lattice graphs.
//!
//! The crate covers the whole path from a neighborhood graph to a response
//! curve:
//!
//! * [`graph`]: first- and second-order lattice neighborhood graphs.
//! * [`model`]: physics-Ising, autologistic, centered autologistic, Ising,
//!   Potts, flexible Potts and ordinal Potts formulations with constant,
//!   covariate-linear or per-site external fields.
//! * [`exact`]: brute-force enumeration for small graphs (partition function,
//!   exact moments, gradient identities, total variation).
//! * [`samplers`]: systematic-scan Gibbs, Swendsen-Wang and monotone
//!   coupling from the past.
//! * [`stats`]: configuration summaries used by response functions.
//! * [`response`]: Monte Carlo response and prior predictive response
//!   functions over a parameter grid.
//!
//! The crate is `no_std` and only needs `alloc`. All randomness flows through
//! [`rng::RandomSource`], whose streams are derived from a seed and a split
//! path so that results never depend on scheduling.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact;
pub mod graph;
pub(crate) mod math;
pub mod model;
pub mod response;
pub mod rng;
pub mod samplers;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Nug, Order};
pub use model::{Configuration, ExternalField, Model, PairwiseSpec};
pub use rng::RandomSource;
