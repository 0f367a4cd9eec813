//! Simple directed graphs, the edge-list format, and structural queries.
//!
//! An edge `(i, j)` means node `i` listens to node `j`: `j` is in the
//! neighbor set of `i` and contributes to the out-degree of `i`.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// A simple digraph on nodes `0..n`, with no self-loops and no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    /// Out-neighbors of each node, sorted ascending.
    out: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Digraph {
    /// Builds a digraph from an edge iterator, validating every invariant.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut builder = Builder::new(n)?;
        for (k, (from, to)) in edges.into_iter().enumerate() {
            builder.add(k + 1, from, to)?;
        }
        Ok(builder.finish())
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted out-neighbors of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out
            .get(from)
            .is_some_and(|adj| adj.binary_search(&to).is_ok())
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().map(move |&j| (i, j)))
    }

    /// For each node `j`, the sorted list of nodes `i` with an edge `(i, j)`.
    pub fn in_neighbors(&self) -> Vec<Vec<usize>> {
        let mut incoming = vec![Vec::new(); self.node_count()];
        for (i, j) in self.edges() {
            incoming[j].push(i);
        }
        incoming
    }

    pub fn out_degrees(&self) -> DegreeVector {
        DegreeVector(self.out.iter().map(Vec::len).collect())
    }

    /// `L = D - A`, kept in integers so row sums are exactly zero.
    pub fn laplacian(&self) -> LaplacianMatrix {
        let n = self.node_count();
        let mut entries = vec![0i64; n * n];
        for (i, adj) in self.out.iter().enumerate() {
            entries[i * n + i] = adj.len() as i64;
            for &j in adj {
                entries[i * n + j] = -1;
            }
        }
        LaplacianMatrix { n, entries }
    }

    /// True iff every node reaches every other node.
    ///
    /// A digraph is strongly connected exactly when node 0 reaches all nodes
    /// and all nodes reach node 0, so two linear-time traversals suffice.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        if !reaches_all(&self.out) {
            return false;
        }
        reaches_all(&self.in_neighbors())
    }

    /// True iff every edge has its reverse.
    pub fn is_undirected(&self) -> bool {
        self.edges().all(|(i, j)| self.has_edge(j, i))
    }
}

fn reaches_all(adjacency: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adjacency.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == adjacency.len()
}

struct Builder {
    out: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Builder {
    fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            out: vec![Vec::new(); n],
            edge_count: 0,
        })
    }

    fn add(&mut self, line: usize, from: usize, to: usize) -> Result<()> {
        let n = self.out.len();
        for index in [from, to] {
            if index >= n {
                return Err(Error::IndexOutOfRange { line, index, n });
            }
        }
        if from == to {
            return Err(Error::SelfLoop { line, node: from });
        }
        let adj = &mut self.out[from];
        match adj.binary_search(&to) {
            Ok(_) => Err(Error::DuplicateEdge { line, from, to }),
            Err(pos) => {
                adj.insert(pos, to);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    fn finish(self) -> Digraph {
        Digraph {
            out: self.out,
            edge_count: self.edge_count,
        }
    }
}

/// Parses the edge-list text format.
///
/// ```text
/// # comment
/// nodes 4        (optional, must be the first non-comment line)
/// 0 1
/// 1 2
/// ```
///
/// Without a header the node count is one more than the largest index seen.
pub fn parse_edge_list(text: &str) -> Result<Digraph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "nodes" {
            if seen_content {
                return Err(malformed(line, "node-count header must come first"));
            }
            seen_content = true;
            if tokens.len() != 2 {
                return Err(malformed(line, "expected `nodes <n>`"));
            }
            let n = parse_index(line, tokens[1])?;
            if n == 0 {
                return Err(Error::EmptyGraph);
            }
            declared = Some(n);
            continue;
        }
        seen_content = true;
        if tokens.len() != 2 {
            return Err(malformed(
                line,
                &format!("expected two node indices, found {} tokens", tokens.len()),
            ));
        }
        let from = parse_index(line, tokens[0])?;
        let to = parse_index(line, tokens[1])?;
        edges.push((line, from, to));
    }

    let n = match declared {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(_, a, b)| a.max(b) + 1)
            .max()
            .ok_or(Error::EmptyGraph)?,
    };
    let mut builder = Builder::new(n)?;
    for (line, from, to) in edges {
        builder.add(line, from, to)?;
    }
    Ok(builder.finish())
}

impl FromStr for Digraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_edge_list(s)
    }
}

fn parse_index(line: usize, token: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| malformed(line, &format!("`{token}` is not a non-negative integer")))
}

fn malformed(line: usize, message: &str) -> Error {
    Error::Malformed {
        line,
        message: message.to_string(),
    }
}

/// Out-degree of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector(pub Vec<usize>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }
}

/// Integer graph Laplacian `D - A`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j) as f64)
    }
}
