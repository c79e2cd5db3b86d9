use serde::{Deserialize, Serialize};

/// Knobs of one solver run. `iterations` is the crossover budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HgsConfig {
    pub population_min: usize,
    pub population_max: usize,
    pub num_elite: usize,
    pub num_close: usize,
    pub iterations: usize,
    pub seed: u64,
    pub penalty_init: f64,
    pub penalty_adapt_period: usize,
    pub target_feasible_fraction: f64,
    /// Granularity of the local search: each client only considers moves
    /// towards its `local_search_neighborhood` nearest clients.
    pub local_search_neighborhood: usize,
}

impl Default for HgsConfig {
    fn default() -> Self {
        HgsConfig {
            population_min: 25,
            population_max: 65,
            num_elite: 4,
            num_close: 5,
            iterations: 1000,
            seed: 0,
            penalty_init: 100.0,
            penalty_adapt_period: 100,
            target_feasible_fraction: 0.4,
            local_search_neighborhood: 20,
        }
    }
}

impl HgsConfig {
    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Returns a description of the first violated invariant.
    pub fn validate(&self) -> Result<(), String> {
        if self.population_min == 0 {
            return Err("population_min must be at least 1".into());
        }
        if self.population_min > self.population_max {
            return Err(format!(
                "population_min ({}) exceeds population_max ({})",
                self.population_min, self.population_max
            ));
        }
        if self.iterations == 0 {
            return Err("iterations must be at least 1".into());
        }
        if !(self.penalty_init > 0.0 && self.penalty_init.is_finite()) {
            return Err("penalty_init must be positive".into());
        }
        if self.penalty_adapt_period == 0 {
            return Err("penalty_adapt_period must be at least 1".into());
        }
        if !(self.target_feasible_fraction > 0.0 && self.target_feasible_fraction < 1.0) {
            return Err("target_feasible_fraction must lie in (0, 1)".into());
        }
        if self.local_search_neighborhood == 0 {
            return Err("local_search_neighborhood must be at least 1".into());
        }
        if self.num_close == 0 {
            return Err("num_close must be at least 1".into());
        }
        Ok(())
    }
}
