#![allow(dead_code)]

use cvrp_core::{generate, Instance};
use hgs_solver::HgsConfig;
use oplang::ExecBudget;
use reward_engine::{reference_bks, EvalSuite};

/// Depot at the origin and one client 99 units away, so every solution
/// costs exactly 198 and phi is exactly 198 / bks.
pub fn out_and_back() -> Instance {
    Instance::new("line", vec![(0.0, 0.0), (99.0, 0.0)], vec![0, 1], 10, 0).unwrap()
}

pub fn quick_hgs() -> HgsConfig {
    HgsConfig {
        population_min: 8,
        population_max: 16,
        ..HgsConfig::default()
    }
}

/// One-instance suite with the expert baseline pinned to 1.0.
pub fn line_suite(bks: f64) -> EvalSuite {
    EvalSuite::new(vec![out_and_back()], vec![bks], vec![1], 5, quick_hgs(), ExecBudget::default())
        .unwrap()
        .with_expert_phi(1.0)
}

pub fn small_suite() -> EvalSuite {
    let instances: Vec<Instance> = (0..3)
        .map(|k| generate::random_uniform(format!("s{k}"), 12 + 4 * k, 40, 10, 40 + k as u64))
        .collect();
    let bks = instances.iter().map(|i| reference_bks(i, 300, 1)).collect();
    EvalSuite::new(instances, bks, vec![11, 12, 13], 30, quick_hgs(), ExecBudget::default()).unwrap()
}

pub const UNPARSEABLE: &str = "emit_route([1, 2";
pub const LOOPS_FOREVER: &str = "while true { }";

/// The identity operator with its variable renamed and layout changed.
pub const IDENTITY_RENAMED: &str = "for route_index in 0..num_routes(0) { emit_route(route(0, route_index)); }";
