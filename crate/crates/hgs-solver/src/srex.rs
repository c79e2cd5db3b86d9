//! Selective route exchange (SREX) crossover.
//!
//! Both parents' routes are ordered by polar angle around the client
//! centroid. A window of `num_moved_routes` consecutive routes is selected in
//! each parent; the windows are then slid left or right while doing so
//! shrinks the set of clients that would have to be replanned. Two offspring
//! are assembled from parent A with the selected B routes swapped in, and the
//! cheaper one is returned.

use cvrp_core::{route_angle, CostEvaluator, Instance, Route, Solution};
use thiserror::Error;

use crate::{Crossover, CrossoverContext, OperatorFault};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrexError {
    #[error("Expected startA < nRoutesA.")]
    StartAOutOfRange,
    #[error("Expected startB < nRoutesB.")]
    StartBOutOfRange,
    #[error("Expected numMovedRoutes in [1, min(nRoutesA, nRoutesB)]")]
    NumMovedOutOfRange,
}

/// Key used to order routes before the window selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleOrder {
    /// Ascending absolute polar angle.
    #[default]
    Absolute,
    /// Ascending signed polar angle in (-pi, pi].
    Actual,
}

impl AngleOrder {
    fn key(self, angle: f64) -> f64 {
        match self {
            AngleOrder::Absolute => angle.abs(),
            AngleOrder::Actual => angle,
        }
    }
}

/// Stable sort of `routes` by ascending angle key.
pub fn sort_routes_by_angle<'r>(
    inst: &Instance,
    routes: &'r [Route],
    order: AngleOrder,
) -> Vec<&'r Route> {
    let mut keyed: Vec<(f64, &Route)> = routes
        .iter()
        .map(|r| {
            let angle = route_angle(inst, r).expect("solution routes are non-empty");
            (order.key(angle), r)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, r)| r).collect()
}

/// Native SREX. Offspring leave the clients of A\B unplanned.
pub fn srex_crossover(
    ctx: &CrossoverContext<'_>,
    inst: &Instance,
    cost: &CostEvaluator,
    order: AngleOrder,
) -> Result<Solution, SrexError> {
    let (parent_a, parent_b) = ctx.parents;
    let (mut start_a, mut start_b) = ctx.start_indices;
    let moved = ctx.num_moved_routes;
    let n_a = parent_a.num_routes();
    let n_b = parent_b.num_routes();

    if start_a >= n_a {
        return Err(SrexError::StartAOutOfRange);
    }
    if start_b >= n_b {
        return Err(SrexError::StartBOutOfRange);
    }
    if moved < 1 || moved > n_a.min(n_b) {
        return Err(SrexError::NumMovedOutOfRange);
    }

    let routes_a = sort_routes_by_angle(inst, parent_a.routes(), order);
    let routes_b = sort_routes_by_angle(inst, parent_b.routes(), order);

    let mut in_a = vec![false; inst.num_locations()];
    let mut in_b = vec![false; inst.num_locations()];
    let mark = |sel: &mut [bool], route: &Route, on: bool| {
        for &c in route.visits() {
            sel[c] = on;
        }
    };
    for r in 0..moved {
        mark(&mut in_a, routes_a[(start_a + r) % n_a], true);
        mark(&mut in_b, routes_b[(start_b + r) % n_b], true);
    }

    // Slide the windows while that strictly shrinks |A \ B|.
    loop {
        let not_in_b = |r: &Route| r.visits().iter().filter(|&&c| !in_b[c]).count() as i64;
        let in_a_count = |r: &Route| r.visits().iter().filter(|&&c| in_a[c]).count() as i64;

        let a_left = not_in_b(routes_a[(start_a + n_a - 1) % n_a])
            - not_in_b(routes_a[(start_a + moved - 1) % n_a]);
        let a_right =
            not_in_b(routes_a[(start_a + moved) % n_a]) - not_in_b(routes_a[start_a]);
        let b_left = in_a_count(routes_b[(start_b + moved - 1) % n_b])
            - in_a_count(routes_b[(start_b + n_b - 1) % n_b]);
        let b_right =
            in_a_count(routes_b[start_b]) - in_a_count(routes_b[(start_b + moved) % n_b]);

        let best = a_left.min(a_right).min(b_left).min(b_right);
        if best >= 0 {
            break;
        }

        if best == a_left {
            mark(&mut in_a, routes_a[(start_a + moved - 1) % n_a], false);
            start_a = (start_a + n_a - 1) % n_a;
            mark(&mut in_a, routes_a[start_a], true);
        } else if best == a_right {
            mark(&mut in_a, routes_a[start_a], false);
            start_a = (start_a + 1) % n_a;
            mark(&mut in_a, routes_a[(start_a + moved - 1) % n_a], true);
        } else if best == b_left {
            mark(&mut in_b, routes_b[(start_b + moved - 1) % n_b], false);
            start_b = (start_b + n_b - 1) % n_b;
            mark(&mut in_b, routes_b[start_b], true);
        } else {
            mark(&mut in_b, routes_b[start_b], false);
            start_b = (start_b + 1) % n_b;
            mark(&mut in_b, routes_b[(start_b + moved - 1) % n_b], true);
        }
    }

    let b_not_a = |c: usize| in_b[c] && !in_a[c];

    // Offspring 1: B plus (Ac \ B). Offspring 2: (A ^ B) plus Ac.
    let mut visits1: Vec<Vec<usize>> = vec![Vec::new(); n_a];
    let mut visits2: Vec<Vec<usize>> = vec![Vec::new(); n_a];

    for r in 0..moved {
        let idx_a = (start_a + r) % n_a;
        let idx_b = (start_b + r) % n_b;
        for &c in routes_b[idx_b].visits() {
            visits1[idx_a].push(c);
            if !b_not_a(c) {
                visits2[idx_a].push(c);
            }
        }
    }
    for r in moved..n_a {
        let idx_a = (start_a + r) % n_a;
        for &c in routes_a[idx_a].visits() {
            if !b_not_a(c) {
                visits1[idx_a].push(c);
            }
            visits2[idx_a].push(c);
        }
    }

    let sol1 = Solution::new(inst, visits1);
    let sol2 = Solution::new(inst, visits2);
    if cost.penalized_cost(&sol1, inst) < cost.penalized_cost(&sol2, inst) {
        Ok(sol1)
    } else {
        Ok(sol2)
    }
}

/// The expert operator as a pluggable crossover.
#[derive(Debug, Clone, Copy, Default)]
pub struct SrexCrossover {
    pub order: AngleOrder,
}

impl SrexCrossover {
    pub fn new(order: AngleOrder) -> Self {
        SrexCrossover { order }
    }
}

impl Crossover for SrexCrossover {
    fn crossover(
        &self,
        ctx: &mut CrossoverContext<'_>,
        inst: &Instance,
        cost: &CostEvaluator,
    ) -> Result<Solution, OperatorFault> {
        srex_crossover(ctx, inst, cost, self.order).map_err(|e| OperatorFault(e.to_string()))
    }
}
