// Line-by-line transcription of the reference selective route exchange
// listing, kept deliberately close to the original control flow
// (size_t wrap-around arithmetic, bitsets, four difference counters).
// Shared by the hgs-solver and acceptance test suites.

use cvrp_core::{CostEvaluator, Instance, Solution};

pub fn oracle_route_angle(data: &Instance, visits: &[usize]) -> f64 {
    let (data_x, data_y) = data.centroid();
    let mut sx = 0.0;
    let mut sy = 0.0;
    for &c in visits {
        sx += data.coords(c).0;
        sy += data.coords(c).1;
    }
    let route_x = sx / visits.len() as f64;
    let route_y = sy / visits.len() as f64;
    (route_y - data_y).atan2(route_x - data_x)
}

pub fn oracle_sort(data: &Instance, routes: Vec<Vec<usize>>, absolute: bool) -> Vec<Vec<usize>> {
    // stable insertion sort on the comparator
    let mut routes = routes;
    let key = |r: &Vec<usize>| {
        let a = oracle_route_angle(data, r);
        if absolute {
            a.abs()
        } else {
            a
        }
    };
    let mut i = 1;
    while i < routes.len() {
        let mut j = i;
        while j > 0 && key(&routes[j]) < key(&routes[j - 1]) {
            routes.swap(j, j - 1);
            j -= 1;
        }
        i += 1;
    }
    routes
}

#[allow(clippy::too_many_arguments)]
pub fn oracle_srex(
    parent_a: &Solution,
    parent_b: &Solution,
    data: &Instance,
    cost_evaluator: &CostEvaluator,
    start_indices: (usize, usize),
    num_moved_routes: usize,
    absolute: bool,
) -> Result<Solution, &'static str> {
    let mut start_a: usize = start_indices.0;
    let mut start_b: usize = start_indices.1;

    let n_routes_a: usize = parent_a.num_routes();
    let n_routes_b: usize = parent_b.num_routes();

    if start_a >= n_routes_a {
        return Err("Expected startA < nRoutesA.");
    }
    if start_b >= n_routes_b {
        return Err("Expected startB < nRoutesB.");
    }
    if num_moved_routes < 1 || num_moved_routes > std::cmp::min(n_routes_a, n_routes_b) {
        return Err("Expected numMovedRoutes in [1, min(nRoutesA, nRoutesB)]");
    }

    let routes_a = oracle_sort(data, parent_a.visit_lists(), absolute);
    let routes_b = oracle_sort(data, parent_b.visit_lists(), absolute);

    let mut selected_a = vec![false; data.num_locations()];
    let mut selected_b = vec![false; data.num_locations()];

    let mut r = 0;
    while r < num_moved_routes {
        for &c in &routes_a[(start_a + r) % n_routes_a] {
            selected_a[c] = true;
        }
        for &c in &routes_b[(start_b + r) % n_routes_b] {
            selected_b[c] = true;
        }
        r += 1;
    }

    loop {
        let mut difference_a_left: i32 = 0;
        for &c in &routes_a[(start_a.wrapping_sub(1).wrapping_add(n_routes_a)) % n_routes_a] {
            difference_a_left += (!selected_b[c]) as i32;
        }
        for &c in &routes_a[(start_a + num_moved_routes - 1) % n_routes_a] {
            difference_a_left -= (!selected_b[c]) as i32;
        }

        let mut difference_a_right: i32 = 0;
        for &c in &routes_a[(start_a + num_moved_routes) % n_routes_a] {
            difference_a_right += (!selected_b[c]) as i32;
        }
        for &c in &routes_a[start_a] {
            difference_a_right -= (!selected_b[c]) as i32;
        }

        let mut difference_b_left: i32 = 0;
        for &c in &routes_b[(start_b.wrapping_sub(1).wrapping_add(num_moved_routes)) % n_routes_b] {
            difference_b_left += selected_a[c] as i32;
        }
        for &c in &routes_b[(start_b.wrapping_sub(1).wrapping_add(n_routes_b)) % n_routes_b] {
            difference_b_left -= selected_a[c] as i32;
        }

        let mut difference_b_right: i32 = 0;
        for &c in &routes_b[start_b] {
            difference_b_right += selected_a[c] as i32;
        }
        for &c in &routes_b[(start_b + num_moved_routes) % n_routes_b] {
            difference_b_right -= selected_a[c] as i32;
        }

        let best_difference = *[
            difference_a_left,
            difference_a_right,
            difference_b_left,
            difference_b_right,
        ]
        .iter()
        .min()
        .unwrap();

        if best_difference >= 0 {
            break;
        }

        if best_difference == difference_a_left {
            for &c in &routes_a[(start_a + num_moved_routes - 1) % n_routes_a] {
                selected_a[c] = false;
            }
            start_a = (start_a.wrapping_sub(1).wrapping_add(n_routes_a)) % n_routes_a;
            for &c in &routes_a[start_a] {
                selected_a[c] = true;
            }
        } else if best_difference == difference_a_right {
            for &c in &routes_a[start_a] {
                selected_a[c] = false;
            }
            start_a = (start_a + 1) % n_routes_a;
            for &c in &routes_a[(start_a + num_moved_routes - 1) % n_routes_a] {
                selected_a[c] = true;
            }
        } else if best_difference == difference_b_left {
            for &c in &routes_b[(start_b + num_moved_routes - 1) % n_routes_b] {
                selected_b[c] = false;
            }
            start_b = (start_b.wrapping_sub(1).wrapping_add(n_routes_b)) % n_routes_b;
            for &c in &routes_b[start_b] {
                selected_b[c] = true;
            }
        } else if best_difference == difference_b_right {
            for &c in &routes_b[start_b] {
                selected_b[c] = false;
            }
            start_b = (start_b + 1) % n_routes_b;
            for &c in &routes_b[(start_b + num_moved_routes - 1) % n_routes_b] {
                selected_b[c] = true;
            }
        }
    }

    let selected_b_not_a: Vec<bool> = (0..data.num_locations())
        .map(|c| selected_b[c] && !selected_a[c])
        .collect();

    let mut visits1: Vec<Vec<usize>> = vec![Vec::new(); n_routes_a];
    let mut visits2: Vec<Vec<usize>> = vec![Vec::new(); n_routes_a];

    for r in 0..num_moved_routes {
        let index_a = (start_a + r) % n_routes_a;
        let index_b = (start_b + r) % n_routes_b;
        for &c in &routes_b[index_b] {
            visits1[index_a].push(c);
            if !selected_b_not_a[c] {
                visits2[index_a].push(c);
            }
        }
    }

    for r in num_moved_routes..n_routes_a {
        let index_a = (start_a + r) % n_routes_a;
        for &c in &routes_a[index_a] {
            if !selected_b_not_a[c] {
                visits1[index_a].push(c);
            }
            visits2[index_a].push(c);
        }
    }

    let mut routes1: Vec<Vec<usize>> = Vec::new();
    let mut routes2: Vec<Vec<usize>> = Vec::new();
    for r in 0..n_routes_a {
        if !visits1[r].is_empty() {
            routes1.push(visits1[r].clone());
        }
        if !visits2[r].is_empty() {
            routes2.push(visits2[r].clone());
        }
    }

    let sol1 = Solution::new(data, routes1);
    let sol2 = Solution::new(data, routes2);

    let cost1 = cost_evaluator.penalized_cost(&sol1, data);
    let cost2 = cost_evaluator.penalized_cost(&sol2, data);
    Ok(if cost1 < cost2 { sol1 } else { sol2 })
}
