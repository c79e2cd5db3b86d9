use std::time::Instant;

use cvrp_core::{validate_solution, CostEvaluator, Instance, Solution, Violation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::population::biased_fitness;
use crate::{
    adapt_penalty, survivor_selection, Crossover, CrossoverContext, HgsConfig, Individual,
    LocalSearch, MoveCounts, SolverRng,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HgsError {
    #[error("invalid solver configuration: {0}")]
    ConfigInvalid(String),
    #[error("crossover failed at iteration {iteration}: {message}")]
    OperatorRuntimeFailure { iteration: usize, message: String },
}

/// Per-run diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Reference penalized cost of the incumbent after each iteration.
    pub best_costs: Vec<f64>,
    /// Offspring that, after education, duplicated a population member.
    pub crossover_failures: usize,
    pub moves: MoveCounts,
    pub elapsed_secs: f64,
    pub final_penalty_weight: f64,
}

/// Fixed evaluator used to rank incumbents across the whole run.
///
/// Both weights equal the cost of serving every client on its own route plus
/// one, so any solution with capacity excess or an unplanned client ranks
/// behind the optimal feasible solution. The adaptive weight inside the
/// search only steers exploration.
pub fn reference_evaluator(inst: &Instance) -> CostEvaluator {
    let depot = inst.depot();
    let trivial: i64 = inst.clients().map(|c| 2 * inst.dist(depot, c)).sum();
    let w = (trivial + 1) as f64;
    CostEvaluator::new(w, w.max(CostEvaluator::default_unplanned_weight(inst)))
}

fn random_solution(inst: &Instance, rng: &mut SolverRng) -> Solution {
    let mut clients: Vec<usize> = inst.clients().collect();
    clients.shuffle(rng);
    let mut routes: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut load = 0;
    for c in clients {
        let d = inst.demand(c);
        if load + d > inst.capacity() && !current.is_empty() {
            routes.push(std::mem::take(&mut current));
            load = 0;
        }
        current.push(c);
        load += d;
    }
    if !current.is_empty() {
        routes.push(current);
    }
    Solution::new(inst, routes)
}

fn tournament(fitness: &[f64], rng: &mut SolverRng) -> usize {
    let a = rng.gen_range(0..fitness.len());
    let b = rng.gen_range(0..fitness.len());
    if fitness[b] < fitness[a] {
        b
    } else {
        a
    }
}

/// Runs hybrid genetic search for `cfg.iterations` crossover rounds and
/// returns the best solution under [`reference_evaluator`].
pub fn solve(
    inst: &Instance,
    cfg: &HgsConfig,
    crossover: &dyn Crossover,
) -> Result<(Solution, SolveStats), HgsError> {
    cfg.validate().map_err(HgsError::ConfigInvalid)?;
    let started = Instant::now();
    let mut rng = SolverRng::seed_from_u64(cfg.seed);
    let ls = LocalSearch::new(inst, cfg.local_search_neighborhood);
    let reference = reference_evaluator(inst);
    let mut eval = CostEvaluator::for_instance(inst, cfg.penalty_init);
    let mut stats = SolveStats::default();

    let mut population: Vec<Individual> = Vec::with_capacity(cfg.population_max + 1);
    let mut best: Option<(f64, Solution)> = None;
    let consider = |sol: &Solution, best: &mut Option<(f64, Solution)>| {
        let c = reference.penalized_cost(sol, inst);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            *best = Some((c, sol.clone()));
        }
    };

    for _ in 0..cfg.population_min {
        let raw = random_solution(inst, &mut rng);
        let sol = ls.run(&raw, eval.penalty_weight, Some(&mut rng), &mut stats.moves);
        consider(&sol, &mut best);
        population.push(Individual::new(inst, sol));
    }

    let mut window_total = 0usize;
    let mut window_feasible = 0usize;

    for iteration in 0..cfg.iterations {
        let fitness = biased_fitness(&population, cfg, &eval);
        let ia = tournament(&fitness, &mut rng);
        let mut ib = tournament(&fitness, &mut rng);
        if ib == ia && population.len() > 1 {
            ib = (ia + 1 + rng.gen_range(0..population.len() - 1)) % population.len();
        }
        let parent_a = population[ia].solution.clone();
        let parent_b = population[ib].solution.clone();
        let (n_a, n_b) = (parent_a.num_routes(), parent_b.num_routes());
        let start_a = rng.gen_range(0..n_a);
        let start_b = rng.gen_range(0..n_b);
        let moved = rng.gen_range(1..=n_a.min(n_b));

        let mut ctx = CrossoverContext {
            parents: (&parent_a, &parent_b),
            start_indices: (start_a, start_b),
            num_moved_routes: moved,
            rng: &mut rng,
        };
        let offspring = crossover
            .crossover(&mut ctx, inst, &eval)
            .map_err(|fault| HgsError::OperatorRuntimeFailure {
                iteration,
                message: fault.0,
            })?;
        check_structure(&offspring, inst)
            .map_err(|message| HgsError::OperatorRuntimeFailure { iteration, message })?;

        let educated = ls.run(&offspring, eval.penalty_weight, Some(&mut rng), &mut stats.moves);
        consider(&educated, &mut best);
        let child = Individual::new(inst, educated);
        window_total += 1;
        window_feasible += usize::from(child.is_feasible());
        let canonical = child.solution.canonical_routes();
        if population
            .iter()
            .any(|m| m.solution.canonical_routes() == canonical)
        {
            stats.crossover_failures += 1;
        }
        population.push(child);
        if population.len() > cfg.population_max {
            survivor_selection(&mut population, cfg, &eval);
        }

        if (iteration + 1) % cfg.penalty_adapt_period == 0 {
            let fraction = window_feasible as f64 / window_total.max(1) as f64;
            eval.penalty_weight =
                adapt_penalty(eval.penalty_weight, fraction, cfg.target_feasible_fraction);
            window_total = 0;
            window_feasible = 0;
        }

        let (cost, _) = best.as_ref().expect("population is never empty");
        stats.best_costs.push(*cost);
    }

    stats.elapsed_secs = started.elapsed().as_secs_f64();
    stats.final_penalty_weight = eval.penalty_weight;
    let (_, sol) = best.expect("population is never empty");
    Ok((sol, stats))
}

/// Offspring may leave clients out, but may not repeat them or visit
/// non-client locations.
fn check_structure(sol: &Solution, inst: &Instance) -> Result<(), String> {
    for v in validate_solution(sol, inst).violations {
        match v {
            Violation::DuplicateClient { client } => {
                return Err(format!("offspring visits client {client} more than once"))
            }
            Violation::NotAClient { location, .. } => {
                return Err(format!("offspring visits non-client location {location}"))
            }
            _ => {}
        }
    }
    Ok(())
}
