//! Exact and heuristic maximisers.
//!
//! Directed problems are solved exactly by dynamic programming over the
//! time-sorted cloud. The non-directed problems are exact up to twenty points
//! (Held–Karp) and annealed beyond.

mod anneal;
mod brute;
mod entropy;
mod greedy;
mod heavy;
mod holder;
mod nondir;
mod polymer;

pub use anneal::AnnealConfig;
pub use brute::{brute_force_heavy_tail, brute_force_lpp, brute_force_polymer, BRUTE_DIRECTED_CAP, BRUTE_HEAVY_CAP, BRUTE_NONDIR_CAP};
pub use entropy::solve_entropy_exact;
pub use greedy::greedy_box_lower_bound;
pub use heavy::{solve_heavy_tail_anneal, HEAVY_REFINE_CAP};
pub use holder::solve_holder_exact;
pub use nondir::{solve_nondir_anneal, solve_nondir_heldkarp, HELD_KARP_CAP};
pub use polymer::solve_polymer_directed;

use serde::{Deserialize, Serialize};

use crate::constraints::Chain;

/// How a solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    HeldKarp,
    Anneal {
        cooling: f64,
        sweeps: f64,
        restarts: u32,
    },
    Greedy,
    BruteForce,
}

impl Method {
    /// Heuristic answers are only lower bounds on the optimum.
    pub fn is_exact(&self) -> bool {
        matches!(self, Method::Exact | Method::HeldKarp | Method::BruteForce)
    }
}

/// Operation counts of a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    /// Pairwise segment evaluations.
    pub evaluations: u64,
    /// DP states or annealing moves.
    pub states: u64,
}

/// Maximum compatible cardinality with a witness chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LppSolution {
    pub cardinality: usize,
    pub chain: Chain,
    /// Norm or entropy of `chain`.
    pub achieved: f64,
    pub method: Method,
    pub work: Work,
}

/// Optimum of an energy–entropy problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    /// `beta * energy - entropy`.
    pub value: f64,
    pub chain: Chain,
    pub energy: f64,
    pub entropy: f64,
    pub method: Method,
}
