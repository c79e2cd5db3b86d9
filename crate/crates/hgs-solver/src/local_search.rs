//! Repair and granular local search.
//!
//! Unplanned clients are first inserted at their cheapest position (opening
//! a fresh route is always a feasible option). The search then applies
//! first-improvement relocate, swap, intra-route 2-opt and inter-route 2-opt*
//! moves between each client and its nearest neighbours until a full pass
//! finds nothing that lowers the penalized cost.

use cvrp_core::{Instance, Solution};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::SolverRng;

const EPS: f64 = 1e-9;
const NONE: usize = usize::MAX;

/// Applied-move counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounts {
    pub insertions: u64,
    pub relocate: u64,
    pub swap: u64,
    pub two_opt: u64,
    pub two_opt_star: u64,
    pub new_route: u64,
}

impl MoveCounts {
    pub fn total(&self) -> u64 {
        self.insertions
            + self.relocate
            + self.swap
            + self.two_opt
            + self.two_opt_star
            + self.new_route
    }

    pub fn add(&mut self, other: &MoveCounts) {
        self.insertions += other.insertions;
        self.relocate += other.relocate;
        self.swap += other.swap;
        self.two_opt += other.two_opt;
        self.two_opt_star += other.two_opt_star;
        self.new_route += other.new_route;
    }
}

/// Local search bound to one instance; the neighbour lists are built once.
#[derive(Debug, Clone)]
pub struct LocalSearch<'a> {
    inst: &'a Instance,
    neighbors: Vec<Vec<usize>>,
}

impl<'a> LocalSearch<'a> {
    pub fn new(inst: &'a Instance, neighborhood: usize) -> Self {
        let n = inst.num_locations();
        let mut neighbors = vec![Vec::new(); n];
        for u in inst.clients() {
            let mut others: Vec<usize> = inst.clients().filter(|&v| v != u).collect();
            others.sort_by_key(|&v| (inst.dist(u, v), v));
            others.truncate(neighborhood);
            neighbors[u] = others;
        }
        LocalSearch { inst, neighbors }
    }

    pub fn neighbors(&self, client: usize) -> &[usize] {
        &self.neighbors[client]
    }

    /// Repairs and improves `sol`. Clients are scanned in ascending order
    /// unless `rng` is given, in which case the scan order is shuffled.
    pub fn run(
        &self,
        sol: &Solution,
        penalty_weight: f64,
        rng: Option<&mut SolverRng>,
        counts: &mut MoveCounts,
    ) -> Solution {
        let mut state = State::new(self.inst, sol, penalty_weight);
        state.repair(counts);

        let mut order: Vec<usize> = self.inst.clients().collect();
        if let Some(rng) = rng {
            order.shuffle(rng);
        }

        loop {
            let mut improved = false;
            for &u in &order {
                if state.try_new_route(u) {
                    counts.new_route += 1;
                    improved = true;
                }
                for &v in &self.neighbors[u] {
                    if state.try_relocate(u, v) {
                        counts.relocate += 1;
                        improved = true;
                    } else if state.try_swap(u, v) {
                        counts.swap += 1;
                        improved = true;
                    } else if state.try_two_opt(u, v) {
                        counts.two_opt += 1;
                        improved = true;
                    } else if state.try_two_opt_star(u, v) {
                        counts.two_opt_star += 1;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        state.into_solution()
    }
}

/// One-shot local search with the default client order.
pub fn local_search(
    sol: &Solution,
    inst: &Instance,
    penalty_weight: f64,
    neighborhood: usize,
) -> Solution {
    let ls = LocalSearch::new(inst, neighborhood);
    ls.run(sol, penalty_weight, None, &mut MoveCounts::default())
}

struct State<'a> {
    inst: &'a Instance,
    pw: f64,
    depot: usize,
    routes: Vec<Vec<usize>>,
    loads: Vec<i64>,
    route_of: Vec<usize>,
    pos_of: Vec<usize>,
    unplanned: Vec<usize>,
}

impl<'a> State<'a> {
    fn new(inst: &'a Instance, sol: &Solution, pw: f64) -> Self {
        let n = inst.num_locations();
        let mut st = State {
            inst,
            pw,
            depot: inst.depot(),
            routes: sol.visit_lists(),
            loads: sol.routes().iter().map(|r| r.load()).collect(),
            route_of: vec![NONE; n],
            pos_of: vec![NONE; n],
            unplanned: sol.unplanned().to_vec(),
        };
        for r in 0..st.routes.len() {
            st.reindex(r);
        }
        st
    }

    fn into_solution(self) -> Solution {
        let routes = self.routes.into_iter().filter(|r| !r.is_empty()).collect();
        Solution::new(self.inst, routes)
    }

    #[inline]
    fn d(&self, a: usize, b: usize) -> f64 {
        self.inst.dist(a, b) as f64
    }

    #[inline]
    fn penalty(&self, load: i64) -> f64 {
        self.pw * (load - self.inst.capacity()).max(0) as f64
    }

    fn reindex(&mut self, r: usize) {
        for (p, &c) in self.routes[r].iter().enumerate() {
            self.route_of[c] = r;
            self.pos_of[c] = p;
        }
    }

    fn pred(&self, c: usize) -> usize {
        let p = self.pos_of[c];
        if p == 0 {
            self.depot
        } else {
            self.routes[self.route_of[c]][p - 1]
        }
    }

    fn succ(&self, c: usize) -> usize {
        let route = &self.routes[self.route_of[c]];
        let p = self.pos_of[c];
        if p + 1 == route.len() {
            self.depot
        } else {
            route[p + 1]
        }
    }

    fn load_delta_cost(&self, r: usize, delta: i64) -> f64 {
        self.penalty(self.loads[r] + delta) - self.penalty(self.loads[r])
    }

    fn repair(&mut self, counts: &mut MoveCounts) {
        let pending = std::mem::take(&mut self.unplanned);
        for c in pending {
            let dem = self.inst.demand(c);
            // Fresh route first so that ties favour existing routes only when
            // they are strictly cheaper.
            let mut best_cost = 2.0 * self.d(self.depot, c);
            let mut best: Option<(usize, usize)> = None;
            for r in 0..self.routes.len() {
                if self.loads[r] + dem > self.inst.capacity() {
                    continue;
                }
                let route = &self.routes[r];
                for p in 0..=route.len() {
                    let prev = if p == 0 { self.depot } else { route[p - 1] };
                    let next = if p == route.len() { self.depot } else { route[p] };
                    let delta = self.d(prev, c) + self.d(c, next) - self.d(prev, next);
                    if delta < best_cost - EPS {
                        best_cost = delta;
                        best = Some((r, p));
                    }
                }
            }
            match best {
                Some((r, p)) => {
                    self.routes[r].insert(p, c);
                    self.loads[r] += dem;
                    self.reindex(r);
                }
                None => {
                    self.routes.push(vec![c]);
                    self.loads.push(dem);
                    let r = self.routes.len() - 1;
                    self.reindex(r);
                }
            }
            counts.insertions += 1;
        }
    }

    /// Move `u` into a route of its own.
    fn try_new_route(&mut self, u: usize) -> bool {
        let ru = self.route_of[u];
        if self.routes[ru].len() <= 1 {
            return false;
        }
        let (pu, su) = (self.pred(u), self.succ(u));
        let du = self.inst.demand(u);
        let delta = self.d(pu, su) - self.d(pu, u) - self.d(u, su)
            + 2.0 * self.d(self.depot, u)
            + self.load_delta_cost(ru, -du)
            + self.penalty(du);
        if delta > -EPS {
            return false;
        }
        let p = self.pos_of[u];
        self.routes[ru].remove(p);
        self.loads[ru] -= du;
        self.reindex(ru);
        let slot = self.routes.iter().position(Vec::is_empty);
        let r = match slot {
            Some(r) => {
                self.routes[r].push(u);
                r
            }
            None => {
                self.routes.push(vec![u]);
                self.loads.push(0);
                self.routes.len() - 1
            }
        };
        self.loads[r] = du;
        self.reindex(r);
        true
    }

    /// Relocate `u` directly after `v`, or directly before `v` when that is
    /// the only way to reach the front of `v`'s route.
    fn try_relocate(&mut self, u: usize, v: usize) -> bool {
        let ru = self.route_of[u];
        let rv = self.route_of[v];
        let (pu, su) = (self.pred(u), self.succ(u));
        let du = self.inst.demand(u);
        let removal = self.d(pu, su) - self.d(pu, u) - self.d(u, su);
        let load_part = if ru == rv {
            0.0
        } else {
            self.load_delta_cost(ru, -du) + self.load_delta_cost(rv, du)
        };

        // after v
        if pu != v {
            let sv = self.succ(v);
            let delta = removal + self.d(v, u) + self.d(u, sv) - self.d(v, sv) + load_part;
            if delta < -EPS {
                self.move_client(u, rv, Some(v));
                return true;
            }
        }
        // before v, only at the head of the route
        let pv = self.pred(v);
        if pv == self.depot && su != v {
            let delta = removal + self.d(pv, u) + self.d(u, v) - self.d(pv, v) + load_part;
            if delta < -EPS {
                self.move_client(u, rv, None);
                return true;
            }
        }
        false
    }

    /// Removes `u` and reinserts it in route `r` after `after` (or at the
    /// head when `after` is `None`).
    fn move_client(&mut self, u: usize, r: usize, after: Option<usize>) {
        let ru = self.route_of[u];
        let du = self.inst.demand(u);
        self.routes[ru].remove(self.pos_of[u]);
        self.loads[ru] -= du;
        self.reindex(ru);
        let at = match after {
            Some(v) => self.pos_of[v] + 1,
            None => 0,
        };
        self.routes[r].insert(at, u);
        self.loads[r] += du;
        self.reindex(r);
    }

    fn try_swap(&mut self, u: usize, v: usize) -> bool {
        let ru = self.route_of[u];
        let rv = self.route_of[v];
        let (pu, su) = (self.pred(u), self.succ(u));
        let (pv, sv) = (self.pred(v), self.succ(v));
        if su == v || sv == u {
            return false;
        }
        let (du, dv) = (self.inst.demand(u), self.inst.demand(v));
        let mut delta = self.d(pu, v) + self.d(v, su) - self.d(pu, u) - self.d(u, su)
            + self.d(pv, u)
            + self.d(u, sv)
            - self.d(pv, v)
            - self.d(v, sv);
        if ru != rv {
            delta += self.load_delta_cost(ru, dv - du) + self.load_delta_cost(rv, du - dv);
        }
        if delta > -EPS {
            return false;
        }
        let (pos_u, pos_v) = (self.pos_of[u], self.pos_of[v]);
        self.routes[ru][pos_u] = v;
        self.routes[rv][pos_v] = u;
        if ru != rv {
            self.loads[ru] += dv - du;
            self.loads[rv] += du - dv;
        }
        self.reindex(ru);
        self.reindex(rv);
        true
    }

    /// Reverse the segment between `u` and `v` inside one route so that `u`
    /// is followed by `v`.
    fn try_two_opt(&mut self, u: usize, v: usize) -> bool {
        let r = self.route_of[u];
        if r != self.route_of[v] {
            return false;
        }
        let (first, last) = if self.pos_of[u] < self.pos_of[v] {
            (u, v)
        } else {
            (v, u)
        };
        let (pf, pl) = (self.pos_of[first], self.pos_of[last]);
        if pl == pf + 1 {
            return false;
        }
        let sf = self.succ(first);
        let sl = self.succ(last);
        let delta = self.d(first, last) + self.d(sf, sl) - self.d(first, sf) - self.d(last, sl);
        if delta > -EPS {
            return false;
        }
        self.routes[r][pf + 1..=pl].reverse();
        self.reindex(r);
        true
    }

    /// Exchange route tails after `u` and after `v` (two variants: straight
    /// tails, or heads joined with one reversed).
    fn try_two_opt_star(&mut self, u: usize, v: usize) -> bool {
        let ru = self.route_of[u];
        let rv = self.route_of[v];
        if ru == rv {
            return false;
        }
        let (pos_u, pos_v) = (self.pos_of[u], self.pos_of[v]);
        let su = self.succ(u);
        let sv = self.succ(v);
        let head_u: i64 = self.routes[ru][..=pos_u].iter().map(|&c| self.inst.demand(c)).sum();
        let head_v: i64 = self.routes[rv][..=pos_v].iter().map(|&c| self.inst.demand(c)).sum();
        let tail_u = self.loads[ru] - head_u;
        let tail_v = self.loads[rv] - head_v;
        let base = self.d(u, su) + self.d(v, sv) + self.penalty(self.loads[ru]) + self.penalty(self.loads[rv]);

        // u -> sv, v -> su
        let straight = self.d(u, sv) + self.d(v, su) + self.penalty(head_u + tail_v) + self.penalty(head_v + tail_u);
        if straight - base < -EPS {
            let tail_of_u: Vec<usize> = self.routes[ru].drain(pos_u + 1..).collect();
            let tail_of_v: Vec<usize> = self.routes[rv].drain(pos_v + 1..).collect();
            self.routes[ru].extend(tail_of_v);
            self.routes[rv].extend(tail_of_u);
            self.loads[ru] = head_u + tail_v;
            self.loads[rv] = head_v + tail_u;
            self.reindex(ru);
            self.reindex(rv);
            return true;
        }

        // u -> v (head of v reversed), su .. -> sv (tail of u reversed)
        let crossed = self.d(u, v) + self.d(su, sv) + self.penalty(head_u + head_v) + self.penalty(tail_u + tail_v);
        if crossed - base < -EPS {
            let mut new_u: Vec<usize> = self.routes[ru][..=pos_u].to_vec();
            new_u.extend(self.routes[rv][..=pos_v].iter().rev());
            let mut new_v: Vec<usize> = self.routes[ru][pos_u + 1..].iter().rev().copied().collect();
            new_v.extend_from_slice(&self.routes[rv][pos_v + 1..]);
            self.routes[ru] = new_u;
            self.routes[rv] = new_v;
            self.loads[ru] = head_u + head_v;
            self.loads[rv] = tail_u + tail_v;
            self.reindex(ru);
            self.reindex(rv);
            return true;
        }
        false
    }
}
