use cvrp_core::{generate, penalized_cost, CostEvaluator, Instance, Solution};
use proptest::prelude::*;

/// Reads a `KEY : value` header field with a plain text scan, independent of
/// the section parser.
fn scan_header(text: &str, key: &str) -> Option<i64> {
    text.lines()
        .find(|l| l.trim_start().starts_with(key))
        .and_then(|l| l.split(':').nth(1))
        .and_then(|v| v.trim().parse().ok())
}

#[test]
fn x_layout_file_matches_header_scan() {
    let text = include_str!("fixtures/x-style-n101.vrp");
    let inst = Instance::parse(text).unwrap();
    assert_eq!(inst.num_locations() as i64, scan_header(text, "DIMENSION").unwrap());
    assert_eq!(inst.capacity(), scan_header(text, "CAPACITY").unwrap());
    assert_eq!(inst.num_locations(), 101);
    assert_eq!(inst.depot(), 0);
    assert_eq!(inst.name(), "x-style-n101");
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (1usize..25, 1i64..50, any::<u64>()).prop_map(|(n, cap, seed)| {
        generate::random_uniform("prop", n, cap.max(10), 10, seed)
    })
}

proptest! {
    #[test]
    fn distances_are_symmetric_and_non_negative(inst in arb_instance()) {
        let n = inst.num_locations();
        for i in 0..n {
            prop_assert_eq!(inst.dist(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(inst.dist(i, j), inst.dist(j, i));
                prop_assert!(inst.dist(i, j) >= 0);
            }
        }
    }

    #[test]
    fn vrp_text_round_trips(inst in arb_instance()) {
        let again = Instance::parse(&inst.to_vrp_string()).unwrap();
        prop_assert_eq!(again, inst);
    }

    #[test]
    fn fractional_coordinates_round_trip(xs in prop::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 2..12)) {
        let n = xs.len();
        let demands = (0..n).map(|i| if i == 0 { 0 } else { 1 }).collect();
        let inst = Instance::new("frac", xs, demands, 5, 0).unwrap();
        prop_assert_eq!(Instance::parse(&inst.to_vrp_string()).unwrap(), inst);
    }

    #[test]
    fn cost_recomputation_is_exact(inst in arb_instance(), cut in 1usize..6) {
        let clients: Vec<usize> = inst.clients().collect();
        let routes: Vec<Vec<usize>> = clients.chunks(cut).map(<[usize]>::to_vec).collect();
        let sol = Solution::new(&inst, routes.clone());
        let manual: i64 = routes
            .iter()
            .map(|r| {
                let mut d = inst.dist(0, r[0]) + inst.dist(*r.last().unwrap(), 0);
                for w in r.windows(2) {
                    d += inst.dist(w[0], w[1]);
                }
                d
            })
            .sum();
        prop_assert_eq!(sol.distance(), manual);
        let eval = CostEvaluator::for_instance(&inst, 100.0);
        prop_assert_eq!(
            eval.penalized_cost(&sol, &inst),
            penalized_cost(&Solution::new(&inst, sol.visit_lists()), &inst, 100.0, eval.unplanned_weight)
        );
    }

    #[test]
    fn gap_of_bks_against_itself_is_zero(bks in 1e-6f64..1e9) {
        prop_assert_eq!(cvrp_core::gap_percent(bks, bks).unwrap(), 0.0);
    }
}
