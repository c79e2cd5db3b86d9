use cvrp_core::{CostEvaluator, Instance, Solution};
use thiserror::Error;

use crate::SolverRng;

/// Everything a crossover operator may look at for one recombination.
pub struct CrossoverContext<'a> {
    pub parents: (&'a Solution, &'a Solution),
    pub start_indices: (usize, usize),
    pub num_moved_routes: usize,
    pub rng: &'a mut SolverRng,
}

/// Raised by an operator that cannot produce an offspring.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct OperatorFault(pub String);

/// A recombination operator plugged into the solver.
///
/// Offspring may leave clients unplanned; the solver repairs them before
/// local search.
pub trait Crossover: Sync {
    fn crossover(
        &self,
        ctx: &mut CrossoverContext<'_>,
        inst: &Instance,
        cost: &CostEvaluator,
    ) -> Result<Solution, OperatorFault>;
}

impl<T: Crossover + ?Sized> Crossover for &T {
    fn crossover(
        &self,
        ctx: &mut CrossoverContext<'_>,
        inst: &Instance,
        cost: &CostEvaluator,
    ) -> Result<Solution, OperatorFault> {
        (**self).crossover(ctx, inst, cost)
    }
}
