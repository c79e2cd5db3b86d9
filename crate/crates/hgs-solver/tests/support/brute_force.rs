// Exhaustive CVRP optimum for tiny instances: every client subset is scored
// by trying all visit orders, then subsets are combined by set-partition
// dynamic programming. Independent of the solver code paths.

use cvrp_core::Instance;

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        out(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

pub fn optimal_cost(inst: &Instance) -> i64 {
    let clients: Vec<usize> = inst.clients().collect();
    let n = clients.len();
    assert!(n <= 9, "brute force only for tiny instances");
    let depot = inst.depot();
    let full = (1usize << n) - 1;
    let mut route_cost = vec![i64::MAX; full + 1];
    for mask in 1..=full {
        let mut members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| clients[i]).collect();
        let load: i64 = members.iter().map(|&c| inst.demand(c)).sum();
        if load > inst.capacity() {
            continue;
        }
        let mut best = i64::MAX;
        permutations(&mut members, 0, &mut |p| {
            let mut d = inst.dist(depot, p[0]) + inst.dist(*p.last().unwrap(), depot);
            for w in p.windows(2) {
                d += inst.dist(w[0], w[1]);
            }
            best = best.min(d);
        });
        route_cost[mask] = best;
    }
    let mut best = vec![i64::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // enumerate submasks of rest, always including the lowest bit
        let mut sub = rest;
        loop {
            let route = sub | low;
            if route_cost[route] != i64::MAX && best[mask ^ route] != i64::MAX {
                best[mask] = best[mask].min(route_cost[route] + best[mask ^ route]);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}
