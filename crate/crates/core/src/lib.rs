#![allow(clippy::excessive_precision)] // literals carry full published digits
#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0) deliberately catches NaN

//! Simulation laboratory for proportional treatment effect estimators.
//!
//! The crate pairs each proportional-effect model with its linear competitor
//! and drives both through a deterministic Monte Carlo harness:
//!
//! - [`xfit`]: single-visit proportional NLS vs the two-sample t-test;
//! - [`lfit`]: proportional mixed model vs the linear-slope mixed model,
//!   both with participant random intercepts, shared-baseline means, and
//!   REML variance components;
//! - [`harness`]: replication engine producing power, Type I error,
//!   rejection-direction, and convergence-rate summaries plus per-replicate
//!   records for zipper plots.
//!
//! Replicates are keyed by `(master_seed, replicate_index)` counter streams,
//! so results are byte-identical for any worker count. The `parallel`
//! feature (default) maps replicates across a rayon pool; without it the
//! same loops run sequentially.

pub mod datagen;
pub mod dist;
pub mod error;
pub mod fit;
pub mod harness;
pub mod lfit;
pub mod linalg;
mod optim;
pub mod parallel;
pub mod report;
pub mod rng;
pub mod xfit;

pub use error::{Error, Result};
