#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wconsensus_core::linalg::DenseMatrix;
use wconsensus_core::{Digraph, WeightedSystem};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_wconsensus"))
}

pub fn wconsensus(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn write_graph(dir: &Path, name: &str, g: &Digraph) -> PathBuf {
    let mut text = format!("nodes {}\n", g.node_count());
    for (i, j) in g.edges() {
        text.push_str(&format!("{i} {j}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn write_values(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let text: String = values.iter().map(|v| format!("{v:?}\n")).collect();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

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

/// Resamples until the closure oracle reports strong connectivity.
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
                    edges.extend([(i, j), (j, i)]);
                }
            }
        }
        let g = Digraph::new(n, edges).unwrap();
        if closure_strongly_connected(&g) {
            return g;
        }
    }
}

pub fn uniform(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A system from the shared randomized regime: n in `[2, max_n]`, density in
/// `[0.2, 0.9]`, weights in `[0.1, 10]`, start state in `[-10, 10]`.
pub struct Case {
    pub system: WeightedSystem,
    pub x0: Vec<f64>,
}

pub fn directed_case(rng: &mut StdRng, max_n: usize) -> Case {
    let n = rng.gen_range(2..=max_n);
    let density = rng.gen_range(0.2..=0.9);
    let g = random_strongly_connected(rng, n, density);
    let w = uniform(rng, n, 0.1, 10.0);
    let x0 = uniform(rng, n, -10.0, 10.0);
    Case {
        system: WeightedSystem::new(g, w).unwrap(),
        x0,
    }
}

pub fn undirected_case(rng: &mut StdRng, max_n: usize) -> Case {
    let n = rng.gen_range(2..=max_n);
    let density = rng.gen_range(0.2..=0.9);
    let g = random_connected_undirected(rng, n, density);
    let w = uniform(rng, n, 0.1, 10.0);
    let x0 = uniform(rng, n, -10.0, 10.0);
    Case {
        system: WeightedSystem::new(g, w).unwrap(),
        x0,
    }
}

pub fn unweighted_case(rng: &mut StdRng, max_n: usize) -> Case {
    let n = rng.gen_range(2..=max_n);
    let density = rng.gen_range(0.2..=0.9);
    let g = random_strongly_connected(rng, n, density);
    let x0 = uniform(rng, n, -10.0, 10.0);
    Case {
        system: WeightedSystem::unweighted(g),
        x0,
    }
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

/// Dense `M x` written out here so the oracles do not share code with the library.
pub fn apply(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn to_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.rows().map(|r| r.to_vec()).collect()
}

pub fn brute_iterate(rows: &[Vec<f64>], x0: &[f64], steps: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..steps {
        x = apply(rows, &x);
    }
    x
}

/// Left Perron vector of `rows` by power iteration on the transpose, unit l1 norm.
pub fn left_perron(rows: &[Vec<f64>], iterations: usize) -> Vec<f64> {
    let n = rows.len();
    let mut y = vec![1.0 / n as f64; n];
    for _ in 0..iterations {
        let mut next = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                next[j] += y[i] * p;
            }
        }
        let s: f64 = next.iter().map(|v| v.abs()).sum();
        y = next.into_iter().map(|v| v / s).collect();
    }
    y
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `m^(2^squarings)` by repeated squaring.
pub fn repeated_square(m: &[Vec<f64>], squarings: u32) -> Vec<Vec<f64>> {
    let mut p = m.to_vec();
    for _ in 0..squarings {
        p = matmul(&p, &p);
    }
    p
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Distance in units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}
