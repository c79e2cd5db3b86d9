//! Seeded random instances in the spirit of the CVRPLIB X generator:
//! uniform coordinates on a 1000x1000 grid and small integer demands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Instance;

/// `num_clients` uniformly placed clients with demands in `1..=max_demand`.
/// The depot sits at a uniformly drawn location as well.
pub fn random_uniform(
    name: impl Into<String>,
    num_clients: usize,
    capacity: i64,
    max_demand: i64,
    seed: u64,
) -> Instance {
    assert!(num_clients >= 1 && max_demand >= 1 && max_demand <= capacity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(num_clients + 1);
    let mut demands = Vec::with_capacity(num_clients + 1);
    for i in 0..=num_clients {
        coords.push((rng.gen_range(0..=1000) as f64, rng.gen_range(0..=1000) as f64));
        demands.push(if i == 0 { 0 } else { rng.gen_range(1..=max_demand) });
    }
    Instance::new(name, coords, demands, capacity, 0).expect("generated instance is valid")
}
