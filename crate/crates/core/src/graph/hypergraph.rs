use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::Graph;
use crate::error::{Error, Result};

/// Uniform hypergraph in which two edges share at most one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearHypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    r: usize,
    degrees: Vec<usize>,
}

impl LinearHypergraph {
    /// Validates uniformity and linearity. Each edge is stored sorted.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut edges = edges;
        let r = edges.first().map_or(0, Vec::len);
        if !edges.is_empty() && r < 2 {
            return Err(Error::InvalidHypergraph("edges need at least two vertices".into()));
        }
        let mut owner: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); n];
        let mut degrees = vec![0; n];
        for (i, e) in edges.iter_mut().enumerate() {
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!("edge {i} repeats a vertex")));
            }
            if e.len() != r {
                return Err(Error::InvalidHypergraph(format!("edge {i} has size {} != {r}", e.len())));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidHypergraph(format!("vertex {v} outside 0..{n}")));
            }
            for (a, &u) in e.iter().enumerate() {
                degrees[u] += 1;
                for &v in &e[a + 1..] {
                    if owner[u].put(v) {
                        return Err(Error::InvalidHypergraph(format!(
                            "pair ({u},{v}) lies in two edges"
                        )));
                    }
                }
            }
        }
        Ok(LinearHypergraph { n, edges, r, degrees })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = *self.degrees.first()?;
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }

    /// Maps each covered pair `(u, v)`, `u < v`, to the unique edge containing it.
    pub fn pair_owners(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::with_capacity(self.shadow_edge_count());
        for (i, e) in self.edges.iter().enumerate() {
            for (a, &u) in e.iter().enumerate() {
                for &v in &e[a + 1..] {
                    map.insert((u, v), i);
                }
            }
        }
        map
    }

    /// `sum_e C(|e|, 2)`; exact by linearity.
    pub fn shadow_edge_count(&self) -> usize {
        self.edges.len() * self.r * self.r.saturating_sub(1) / 2
    }
}

/// Graph joining every pair of vertices that share an edge of `h`.
pub fn shadow_graph(h: &LinearHypergraph) -> Graph {
    let mut g = Graph::empty(h.n());
    for e in h.edges() {
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    g
}
