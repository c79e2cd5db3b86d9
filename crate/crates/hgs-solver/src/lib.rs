//! Hybrid genetic search (HGS) for the capacitated VRP.
//!
//! The solver keeps a population of route-set solutions, recombines parents
//! through a pluggable [`Crossover`] operator, educates every offspring with
//! repair and a granular local search, and manages diversity through
//! biased-fitness survivor selection. [`SrexCrossover`] is the native
//! selective route exchange operator.

mod config;
mod crossover;
mod local_search;
mod penalty;
mod population;
mod solver;
mod srex;

pub use config::HgsConfig;
pub use crossover::{Crossover, CrossoverContext, OperatorFault};
pub use local_search::{local_search, LocalSearch, MoveCounts};
pub use penalty::adapt_penalty;
pub use population::{broken_pairs_distance, survivor_selection, Individual};
pub use solver::{reference_evaluator, solve, HgsError, SolveStats};
pub use srex::{sort_routes_by_angle, srex_crossover, AngleOrder, SrexCrossover, SrexError};

/// Deterministic generator used for every stochastic choice in the solver.
pub type SolverRng = rand_chacha::ChaCha8Rng;
