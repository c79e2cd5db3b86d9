use cvrp_core::{CostEvaluator, Instance, Solution};

use crate::HgsConfig;

/// A population member: a solution plus what diversity management needs.
#[derive(Debug, Clone)]
pub struct Individual {
    pub solution: Solution,
    distance: i64,
    excess: i64,
    unplanned: usize,
    /// Predecessor and successor of every location (depot for route ends,
    /// `usize::MAX` for unplanned clients).
    adjacency: Vec<(usize, usize)>,
}

impl Individual {
    pub fn new(inst: &Instance, solution: Solution) -> Self {
        let depot = inst.depot();
        let mut adjacency = vec![(usize::MAX, usize::MAX); inst.num_locations()];
        for route in solution.routes() {
            let v = route.visits();
            for (i, &c) in v.iter().enumerate() {
                let pred = if i == 0 { depot } else { v[i - 1] };
                let succ = if i + 1 == v.len() { depot } else { v[i + 1] };
                adjacency[c] = (pred, succ);
            }
        }
        Individual {
            distance: solution.distance(),
            excess: solution.excess_load(inst),
            unplanned: solution.unplanned().len(),
            solution,
            adjacency,
        }
    }

    pub fn cost(&self, eval: &CostEvaluator) -> f64 {
        self.distance as f64
            + eval.penalty_weight * self.excess as f64
            + eval.unplanned_weight * self.unplanned as f64
    }

    pub fn is_feasible(&self) -> bool {
        self.excess == 0 && self.unplanned == 0
    }
}

/// Share of client adjacencies present in `a` but not in `b`, in [0, 1].
/// Zero exactly when both solutions contain the same routes up to direction.
pub fn broken_pairs_distance(a: &Individual, b: &Individual) -> f64 {
    const NONE: usize = usize::MAX;
    let mut broken = 0usize;
    let mut clients = 0usize;
    for (&(pa, sa), &(pb, sb)) in a.adjacency.iter().zip(&b.adjacency) {
        if pa == NONE && pb == NONE {
            continue;
        }
        clients += 1;
        let mut other = [Some(pb), Some(sb)];
        for x in [pa, sa] {
            match other.iter_mut().find(|y| **y == Some(x) && x != NONE) {
                Some(slot) => *slot = None,
                None => broken += 1,
            }
        }
    }
    if clients == 0 {
        0.0
    } else {
        broken as f64 / (2 * clients) as f64
    }
}

fn ranks(values: &[f64], descending: bool) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        let ord = values[i].total_cmp(&values[j]);
        if descending {
            ord.reverse().then(i.cmp(&j))
        } else {
            ord.then(i.cmp(&j))
        }
    });
    let mut out = vec![0.0; n];
    let denom = (n.max(2) - 1) as f64;
    for (rank, i) in idx.into_iter().enumerate() {
        out[i] = rank as f64 / denom;
    }
    out
}

/// Biased fitness of every member (lower is better): normalized cost rank
/// plus `(1 - num_elite / size)` times the normalized diversity rank, where
/// diversity is the mean broken-pairs distance to the `num_close` closest
/// other members.
pub(crate) fn biased_fitness(pop: &[Individual], cfg: &HgsConfig, eval: &CostEvaluator) -> Vec<f64> {
    fitness_from_matrix(pop, &distance_matrix(pop), cfg, eval)
}

fn fitness_from_matrix(
    pop: &[Individual],
    dist: &[Vec<f64>],
    cfg: &HgsConfig,
    eval: &CostEvaluator,
) -> Vec<f64> {
    let n = pop.len();
    if n <= 1 {
        return vec![0.0; n];
    }
    let costs: Vec<f64> = pop.iter().map(|ind| ind.cost(eval)).collect();
    let diversity: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist[i][j]).collect();
            row.sort_by(f64::total_cmp);
            let k = cfg.num_close.min(row.len());
            row[..k].iter().sum::<f64>() / k as f64
        })
        .collect();
    let cost_rank = ranks(&costs, false);
    let div_rank = ranks(&diversity, true);
    let weight = (1.0 - cfg.num_elite as f64 / n as f64).max(0.0);
    (0..n).map(|i| cost_rank[i] + weight * div_rank[i]).collect()
}

fn distance_matrix(pop: &[Individual]) -> Vec<Vec<f64>> {
    let n = pop.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = broken_pairs_distance(&pop[i], &pop[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    dist
}

/// Shrinks the population to `population_min`: clones are removed first
/// (the worse-fitness copy goes), then the worst biased-fitness members.
pub fn survivor_selection(pop: &mut Vec<Individual>, cfg: &HgsConfig, eval: &CostEvaluator) {
    let mut dist = distance_matrix(pop);
    while pop.len() > cfg.population_min {
        let fitness = fitness_from_matrix(pop, &dist, cfg, eval);
        let n = pop.len();
        let mut clone: Option<usize> = None;
        for i in 0..n {
            let has_twin = (0..n).any(|j| j != i && dist[i][j] == 0.0);
            if has_twin && clone.is_none_or(|c| fitness[i] > fitness[c]) {
                clone = Some(i);
            }
        }
        let victim = clone.unwrap_or_else(|| {
            (0..n)
                .max_by(|&i, &j| fitness[i].total_cmp(&fitness[j]).then(j.cmp(&i)))
                .expect("non-empty population")
        });
        pop.remove(victim);
        dist.remove(victim);
        for row in &mut dist {
            row.remove(victim);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvrp_core::generate;

    fn inst() -> Instance {
        generate::random_uniform("p", 8, 20, 5, 3)
    }

    fn member(inst: &Instance, routes: Vec<Vec<usize>>) -> Individual {
        Individual::new(inst, Solution::new(inst, routes))
    }

    #[test]
    fn broken_pairs_is_direction_invariant() {
        let inst = inst();
        let a = member(&inst, vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]]);
        let b = member(&inst, vec![vec![8, 7, 6, 5], vec![4, 3, 2, 1]]);
        assert_eq!(broken_pairs_distance(&a, &b), 0.0);
        let c = member(&inst, vec![vec![1, 3, 2, 4], vec![5, 6, 7, 8]]);
        let d = broken_pairs_distance(&a, &c);
        assert!(d > 0.0 && d <= 1.0);
        assert_eq!(d, broken_pairs_distance(&c, &a));
    }

    #[test]
    fn clones_are_removed_before_unique_members() {
        let inst = inst();
        let eval = CostEvaluator::for_instance(&inst, 100.0);
        let cfg = HgsConfig {
            population_min: 2,
            population_max: 3,
            ..HgsConfig::default()
        };
        let best = vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]];
        let worse = vec![vec![1, 5, 3, 7], vec![2, 6, 4, 8]];
        let mut pop = vec![
            member(&inst, best.clone()),
            member(&inst, best.clone()),
            member(&inst, best.clone()),
            member(&inst, worse.clone()),
        ];
        survivor_selection(&mut pop, &cfg, &eval);
        assert_eq!(pop.len(), 2);
        let kept: Vec<_> = pop.iter().map(|i| i.solution.canonical_routes()).collect();
        assert!(kept.contains(&Solution::new(&inst, worse).canonical_routes()));
    }

    #[test]
    fn elite_only_degenerates_to_cost_rank() {
        let inst = inst();
        let eval = CostEvaluator::for_instance(&inst, 100.0);
        let layouts = [
            vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]],
            vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]],
            vec![vec![1], vec![2], vec![3], vec![4], vec![5], vec![6], vec![7], vec![8]],
            vec![vec![1, 8, 2, 7], vec![3, 6, 4, 5]],
        ];
        let pop: Vec<Individual> = layouts.iter().map(|l| member(&inst, l.clone())).collect();
        let cfg = HgsConfig {
            num_elite: pop.len(),
            population_min: 2,
            ..HgsConfig::default()
        };
        let fit = biased_fitness(&pop, &cfg, &eval);
        let costs: Vec<f64> = pop.iter().map(|i| i.cost(&eval)).collect();
        assert_eq!(fit, ranks(&costs, false));

        let mut shrunk = pop.clone();
        survivor_selection(&mut shrunk, &cfg, &eval);
        let mut expect: Vec<usize> = (0..pop.len()).collect();
        expect.sort_by(|&i, &j| costs[i].total_cmp(&costs[j]));
        let want: Vec<_> = expect[..2].iter().map(|&i| pop[i].solution.canonical_routes()).collect();
        let got: Vec<_> = shrunk.iter().map(|i| i.solution.canonical_routes()).collect();
        assert_eq!(got.len(), 2);
        for w in want {
            assert!(got.contains(&w));
        }
    }

    #[test]
    fn shrinks_to_population_min() {
        let inst = generate::random_uniform("p", 12, 20, 5, 4);
        let eval = CostEvaluator::for_instance(&inst, 100.0);
        let cfg = HgsConfig {
            population_min: 4,
            population_max: 8,
            ..HgsConfig::default()
        };
        let mut pop = Vec::new();
        for k in 0..10 {
            let mut clients: Vec<usize> = inst.clients().collect();
            clients.rotate_left(k);
            pop.push(member(&inst, clients.chunks(3 + k % 3).map(<[usize]>::to_vec).collect()));
        }
        survivor_selection(&mut pop, &cfg, &eval);
        assert_eq!(pop.len(), 4);
    }
}
