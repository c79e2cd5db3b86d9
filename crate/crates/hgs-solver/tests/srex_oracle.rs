mod support;

use cvrp_core::{generate, CostEvaluator, Instance, Solution};
use hgs_solver::{local_search, srex_crossover, AngleOrder, CrossoverContext, SolverRng};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use support::srex_oracle::oracle_srex;

fn random_parent(inst: &Instance, rng: &mut SolverRng) -> Solution {
    let mut clients: Vec<usize> = inst.clients().collect();
    clients.shuffle(rng);
    let k = rng.gen_range(1..=clients.len());
    let mut routes = vec![Vec::new(); k];
    for (i, c) in clients.into_iter().enumerate() {
        // first k clients seed the k routes so none is empty
        let r = if i < k { i } else { rng.gen_range(0..k) };
        routes[r].push(c);
    }
    Solution::new(inst, routes)
}

fn corpus() -> Vec<Instance> {
    (0..10)
        .map(|s| generate::random_uniform(format!("o{s}"), 3 + s as usize % 6, 20, 8, 100 + s))
        .collect()
}

fn compare(num_pairs: usize, order: AngleOrder) {
    let mut rng = SolverRng::seed_from_u64(2024);
    let mut checked = 0;
    for inst in corpus().iter().cycle().take(num_pairs) {
        let eval = CostEvaluator::for_instance(inst, rng.gen_range(1.0..500.0));
        let a = random_parent(inst, &mut rng);
        let b = random_parent(inst, &mut rng);
        let starts = (rng.gen_range(0..a.num_routes()), rng.gen_range(0..b.num_routes()));
        let moved = rng.gen_range(1..=a.num_routes().min(b.num_routes()));
        let mut op_rng = SolverRng::seed_from_u64(0);
        let ctx = CrossoverContext {
            parents: (&a, &b),
            start_indices: starts,
            num_moved_routes: moved,
            rng: &mut op_rng,
        };
        let native = srex_crossover(&ctx, inst, &eval, order).unwrap();
        let oracle =
            oracle_srex(&a, &b, inst, &eval, starts, moved, order == AngleOrder::Absolute).unwrap();
        assert_eq!(native, oracle, "instance {} starts {starts:?} moved {moved}", inst.name());
        checked += 1;
    }
    assert_eq!(checked, num_pairs);
}

#[test]
fn native_matches_transcription_absolute() {
    compare(300, AngleOrder::Absolute);
}

#[test]
fn native_matches_transcription_actual() {
    compare(300, AngleOrder::Actual);
}

#[test]
fn oracle_reports_the_same_argument_errors() {
    let inst = generate::random_uniform("e", 6, 20, 8, 1);
    let p = Solution::new(&inst, vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
    let eval = CostEvaluator::for_instance(&inst, 10.0);
    assert_eq!(oracle_srex(&p, &p, &inst, &eval, (3, 0), 1, true).unwrap_err(), "Expected startA < nRoutesA.");
    assert_eq!(oracle_srex(&p, &p, &inst, &eval, (0, 3), 1, true).unwrap_err(), "Expected startB < nRoutesB.");
    assert_eq!(
        oracle_srex(&p, &p, &inst, &eval, (0, 0), 0, true).unwrap_err(),
        "Expected numMovedRoutes in [1, min(nRoutesA, nRoutesB)]"
    );
}

#[test]
fn repaired_offspring_covers_every_client_once() {
    let mut rng = SolverRng::seed_from_u64(9);
    for inst in corpus() {
        let eval = CostEvaluator::for_instance(&inst, 100.0);
        for _ in 0..20 {
            let a = random_parent(&inst, &mut rng);
            let b = random_parent(&inst, &mut rng);
            let mut op_rng = SolverRng::seed_from_u64(0);
            let ctx = CrossoverContext {
                parents: (&a, &b),
                start_indices: (0, 0),
                num_moved_routes: 1,
                rng: &mut op_rng,
            };
            let child = srex_crossover(&ctx, &inst, &eval, AngleOrder::Absolute).unwrap();
            let repaired = local_search(&child, &inst, 100.0, 20);
            let mut seen: Vec<usize> = repaired.visit_lists().concat();
            seen.sort();
            assert_eq!(seen, inst.clients().collect::<Vec<_>>());
            assert!(repaired.unplanned().is_empty());
        }
    }
}
