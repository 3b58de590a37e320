//! Path-constrained last-passage percolation.
//!
//! Points are sampled in a space-time box (or a planar disk), and one asks for
//! the largest subset a path can collect when its increments are limited by a
//! Hölder norm or by an `(a, b)`-entropy budget. The crate ships exact solvers
//! at laptop scale, annealing heuristics for the non-directed problems,
//! closed-form volumes and tail bounds, and a replica engine for Monte Carlo
//! studies.

pub mod error;
pub mod constraints;
pub mod model;
pub mod rng;
pub mod analytics;
pub mod solvers;
pub mod experiments;
pub mod cli;

pub use error::{Error, Result};
