#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use wconsensus_core::linalg::{matvec, DenseMatrix};
use wconsensus_core::Digraph;

pub fn random_digraph(rng: &mut StdRng, n: usize, density: f64) -> Digraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    Digraph::new(n, edges).unwrap()
}

pub fn random_strongly_connected(rng: &mut StdRng, n: usize, density: f64) -> Digraph {
    loop {
        let g = random_digraph(rng, n, density);
        if closure_strongly_connected(&g) {
            return g;
        }
    }
}

pub fn random_connected_undirected(rng: &mut StdRng, n: usize, density: f64) -> Digraph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    edges.push((i, j));
                    edges.push((j, i));
                }
            }
        }
        let g = Digraph::new(n, edges).unwrap();
        if closure_strongly_connected(&g) {
            return g;
        }
    }
}

pub fn random_vector(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Floyd-Warshall transitive closure.
pub fn closure(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (i, j) in g.edges() {
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

pub fn closure_strongly_connected(g: &Digraph) -> bool {
    closure(g).iter().all(|row| row.iter().all(|&r| r))
}

/// `P^steps x` by plain matrix-vector products.
pub fn brute_iterate(p: &DenseMatrix, x0: &[f64], steps: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..steps {
        x = matvec(p, &x).unwrap();
    }
    x
}

pub fn matrix_power(p: &DenseMatrix, mut k: u32) -> DenseMatrix {
    let mut result = DenseMatrix::identity(p.dim());
    let mut base = p.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.matmul(&base).unwrap();
        }
        base = base.matmul(&base).unwrap();
        k >>= 1;
    }
    result
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
