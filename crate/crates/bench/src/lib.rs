//! Fixtures shared by the benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wconsensus_core::{Digraph, WeightedSystem};

/// Random strongly connected digraph: a directed Hamiltonian cycle through
/// all nodes plus each remaining ordered pair with probability `density`.
pub fn random_strongly_connected(n: usize, density: f64, seed: u64) -> Digraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        let cycle_next = (i + 1) % n;
        for j in 0..n {
            if i == j {
                continue;
            }
            if (n > 1 && j == cycle_next) || rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges).expect("generated edges are simple")
}

/// Random system with weights in `[0.1, 10]` and a start state in `[-10, 10]`.
pub fn random_system(n: usize, density: f64, seed: u64) -> (WeightedSystem, Vec<f64>) {
    let g = random_strongly_connected(n, density, seed);
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let w = (0..n).map(|_| rng.gen_range(0.1..=10.0)).collect();
    let x0 = (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
    (WeightedSystem::new(g, w).expect("weights are positive"), x0)
}
