use std::collections::BTreeSet;

use crate::{CvrpError, Instance, Result};

/// A depot-anchored sequence of client visits with cached load, distance and
/// centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    visits: Vec<usize>,
    load: i64,
    distance: i64,
    centroid: (f64, f64),
}

impl Route {
    pub fn new(inst: &Instance, visits: Vec<usize>) -> Self {
        let depot = inst.depot();
        let mut load = 0;
        let mut distance = 0;
        let (mut sx, mut sy) = (0.0, 0.0);
        let mut prev = depot;
        for &c in &visits {
            load += inst.demand(c);
            distance += inst.dist(prev, c);
            let (x, y) = inst.coords(c);
            sx += x;
            sy += y;
            prev = c;
        }
        distance += inst.dist(prev, depot);
        let centroid = if visits.is_empty() {
            (0.0, 0.0)
        } else {
            let m = visits.len() as f64;
            (sx / m, sy / m)
        };
        Route {
            visits,
            load,
            distance,
            centroid,
        }
    }

    pub fn visits(&self) -> &[usize] {
        &self.visits
    }

    pub fn into_visits(self) -> Vec<usize> {
        self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn load(&self) -> i64 {
        self.load
    }

    pub fn distance(&self) -> i64 {
        self.distance
    }

    pub fn centroid(&self) -> (f64, f64) {
        self.centroid
    }

    pub fn excess(&self, capacity: i64) -> i64 {
        (self.load - capacity).max(0)
    }
}

/// Angle of the route centroid seen from the centroid of all clients.
pub fn route_angle(inst: &Instance, route: &Route) -> Result<f64> {
    if route.is_empty() {
        return Err(CvrpError::EmptyRoute);
    }
    let (dx, dy) = inst.centroid();
    let (rx, ry) = route.centroid();
    Ok((ry - dy).atan2(rx - dx))
}

/// A set of routes plus the clients left out of every route.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    routes: Vec<Route>,
    unplanned: Vec<usize>,
}

impl Solution {
    /// Builds a solution from raw visit lists. Empty lists are dropped and
    /// every client absent from all routes is recorded as unplanned.
    pub fn new(inst: &Instance, routes: Vec<Vec<usize>>) -> Self {
        let routes: Vec<Route> = routes
            .into_iter()
            .filter(|v| !v.is_empty())
            .map(|v| Route::new(inst, v))
            .collect();
        Self::from_routes(inst, routes)
    }

    pub fn from_routes(inst: &Instance, routes: Vec<Route>) -> Self {
        let mut planned = vec![false; inst.num_locations()];
        for r in &routes {
            for &c in r.visits() {
                if c < planned.len() {
                    planned[c] = true;
                }
            }
        }
        let unplanned = inst.clients().filter(|&c| !planned[c]).collect();
        let routes = routes.into_iter().filter(|r| !r.is_empty()).collect();
        Solution { routes, unplanned }
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    /// Clients not served by any route, ascending.
    pub fn unplanned(&self) -> &[usize] {
        &self.unplanned
    }

    pub fn distance(&self) -> i64 {
        self.routes.iter().map(Route::distance).sum()
    }

    pub fn excess_load(&self, inst: &Instance) -> i64 {
        self.routes.iter().map(|r| r.excess(inst.capacity())).sum()
    }

    /// Complete and within capacity on every route.
    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.unplanned.is_empty() && self.excess_load(inst) == 0
    }

    pub fn visit_lists(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(|r| r.visits().to_vec()).collect()
    }

    /// Route order is irrelevant; sort routes so structurally identical
    /// solutions compare equal.
    pub fn canonical_routes(&self) -> Vec<Vec<usize>> {
        let mut v = self.visit_lists();
        v.sort();
        v
    }
}

/// Weights applied to capacity excess and unplanned clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEvaluator {
    pub penalty_weight: f64,
    pub unplanned_weight: f64,
}

impl CostEvaluator {
    pub fn new(penalty_weight: f64, unplanned_weight: f64) -> Self {
        CostEvaluator {
            penalty_weight,
            unplanned_weight,
        }
    }

    /// Unplanned weight defaults to 10x the longest arc.
    pub fn for_instance(inst: &Instance, penalty_weight: f64) -> Self {
        Self::new(penalty_weight, Self::default_unplanned_weight(inst))
    }

    pub fn default_unplanned_weight(inst: &Instance) -> f64 {
        10.0 * inst.max_arc().max(1) as f64
    }

    pub fn penalized_cost(&self, sol: &Solution, inst: &Instance) -> f64 {
        penalized_cost(sol, inst, self.penalty_weight, self.unplanned_weight)
    }

    /// Cost of a route's own contribution (distance plus capacity penalty).
    pub fn route_cost(&self, route: &Route, capacity: i64) -> f64 {
        route.distance() as f64 + self.penalty_weight * route.excess(capacity) as f64
    }
}

pub fn penalized_cost(
    sol: &Solution,
    inst: &Instance,
    penalty_weight: f64,
    unplanned_weight: f64,
) -> f64 {
    sol.distance() as f64
        + penalty_weight * sol.excess_load(inst) as f64
        + unplanned_weight * sol.unplanned().len() as f64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Depot or out-of-range index inside a route.
    NotAClient { route: usize, location: usize },
    DuplicateClient { client: usize },
    MissingClient { client: usize },
    CapacityExcess { route: usize, excess: i64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists everything that keeps `sol` from being a feasible, complete
/// solution of `inst`.
pub fn validate_solution(sol: &Solution, inst: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = vec![0usize; inst.num_locations()];
    for (ri, route) in sol.routes().iter().enumerate() {
        for &c in route.visits() {
            if !inst.is_client(c) {
                violations.push(Violation::NotAClient {
                    route: ri,
                    location: c,
                });
                continue;
            }
            seen[c] += 1;
        }
        let excess = route.excess(inst.capacity());
        if excess > 0 {
            violations.push(Violation::CapacityExcess { route: ri, excess });
        }
    }
    let dups: BTreeSet<usize> = inst.clients().filter(|&c| seen[c] > 1).collect();
    violations.extend(dups.into_iter().map(|client| Violation::DuplicateClient { client }));
    violations.extend(
        inst.clients()
            .filter(|&c| seen[c] == 0)
            .map(|client| Violation::MissingClient { client }),
    );
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_instance() -> Instance {
        // depot at origin, c1 at (3,4), c2 at (0,5), c3 at (-3,4)
        Instance::new(
            "line",
            vec![(0.0, 0.0), (3.0, 4.0), (0.0, 5.0), (-3.0, 4.0)],
            vec![0, 4, 6, 5],
            10,
            0,
        )
        .unwrap()
    }

    #[test]
    fn out_and_back_cost() {
        let inst = line_instance();
        let sol = Solution::new(&inst, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(sol.routes()[0].distance(), 10);
        assert_eq!(penalized_cost(&sol, &inst, 100.0, 1000.0), 30.0);
    }

    #[test]
    fn capacity_excess_is_penalized() {
        // two co-located clients so the out-and-back still measures 10
        let inst = Instance::new(
            "t",
            vec![(0.0, 0.0), (3.0, 4.0), (3.0, 4.0)],
            vec![0, 6, 7],
            10,
            0,
        )
        .unwrap();
        let sol = Solution::new(&inst, vec![vec![1, 2]]);
        assert_eq!(sol.routes()[0].load(), 13);
        assert_eq!(penalized_cost(&sol, &inst, 100.0, 1.0), 310.0);
    }

    #[test]
    fn unplanned_clients_carry_weight() {
        let inst = Instance::new(
            "t",
            vec![(0.0, 0.0), (3.0, 4.0), (0.0, 5.0)],
            vec![0, 1, 1],
            10,
            0,
        )
        .unwrap();
        let sol = Solution::new(&inst, vec![]);
        assert_eq!(sol.unplanned(), &[1, 2]);
        assert_eq!(penalized_cost(&sol, &inst, 100.0, 1000.0), 2000.0);
    }

    #[test]
    fn validation_reports_each_violation() {
        let inst = line_instance();
        let ok = Solution::new(&inst, vec![vec![1, 3], vec![2]]);
        assert!(validate_solution(&ok, &inst).is_empty());

        let dup = Solution::new(&inst, vec![vec![3, 1], vec![2, 3]]);
        let report = validate_solution(&dup, &inst);
        assert_eq!(
            report.violations,
            vec![
                Violation::CapacityExcess {
                    route: 1,
                    excess: 1
                },
                Violation::DuplicateClient { client: 3 }
            ]
        );

        let missing = Solution::new(&inst, vec![vec![1]]);
        assert_eq!(
            validate_solution(&missing, &inst).violations,
            vec![
                Violation::MissingClient { client: 2 },
                Violation::MissingClient { client: 3 }
            ]
        );
    }

    #[test]
    fn capacity_violation_reports_excess() {
        let inst = Instance::new(
            "t",
            vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
            vec![0, 6, 6],
            10,
            0,
        )
        .unwrap();
        let sol = Solution::new(&inst, vec![vec![1, 2]]);
        assert_eq!(
            validate_solution(&sol, &inst).violations,
            vec![Violation::CapacityExcess {
                route: 0,
                excess: 2
            }]
        );
    }

    fn axis_instance() -> Instance {
        // clients symmetric around the origin so the client centroid is (0,0)
        Instance::new(
            "axis",
            vec![(5.0, 5.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
            vec![0, 1, 1, 1, 1],
            10,
            0,
        )
        .unwrap()
    }

    #[test]
    fn route_angle_axis_cases() {
        let inst = axis_instance();
        assert_eq!(inst.centroid(), (0.0, 0.0));
        let east = Route::new(&inst, vec![1]);
        let north = Route::new(&inst, vec![3]);
        let west = Route::new(&inst, vec![2]);
        assert_eq!(route_angle(&inst, &east).unwrap(), 0.0);
        assert_eq!(route_angle(&inst, &north).unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(route_angle(&inst, &west).unwrap(), std::f64::consts::PI);
        assert_eq!(
            route_angle(&inst, &Route::new(&inst, vec![])),
            Err(CvrpError::EmptyRoute)
        );
    }
}
