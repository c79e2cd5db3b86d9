#![allow(dead_code)]

use cvrp_core::{generate, Instance};
use hgs_solver::HgsConfig;
use oplang::ExecBudget;
use reward_engine::{reference_bks, EvalSuite};
use rfthgs::{RunConfig, RIGGED_LOGITS};

pub fn quick_hgs() -> HgsConfig {
    HgsConfig {
        population_min: 8,
        population_max: 16,
        ..HgsConfig::default()
    }
}

/// Three generated instances with 20 to 40 clients and a 50-iteration probe.
pub fn training_suite() -> EvalSuite {
    let instances: Vec<Instance> = (0..3)
        .map(|k| generate::random_uniform(format!("train{k}"), 20 + 10 * k, 50, 10, 300 + k as u64))
        .collect();
    let bks = instances.iter().map(|i| reference_bks(i, 500, 1)).collect();
    let budget = ExecBudget {
        max_steps: 200_000,
        ..ExecBudget::default()
    };
    EvalSuite::new(instances, bks, vec![1, 2, 3], 50, quick_hgs(), budget).unwrap()
}

/// Rigged run: syntax errors dominate the starting policy.
pub fn rigged_config(seed: u64, steps: usize) -> RunConfig {
    RunConfig {
        steps,
        batch_size: 4,
        group_size: 8,
        seed,
        learning_rate: 2.0,
        initial_logits: Some(RIGGED_LOGITS.to_vec()),
        ..RunConfig::default()
    }
}
