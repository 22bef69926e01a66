//! Dense graphs, linear hypergraphs and the exact combinatorial checks run on them.

mod clique;
pub mod families;
mod hypergraph;
mod independent;
mod patterns;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub use clique::{CliqueSearch, SearchOutcome};
pub use hypergraph::{shadow_graph, LinearHypergraph};
pub use independent::{
    enumerate_independent_sets, find_independent_set, independence_number, is_independent,
    IndependenceResult, DEFAULT_ENUMERATION_LIMIT,
};
pub use patterns::{
    is_pattern_free, is_strongly_pattern_free, validate_witness, ForbiddenPattern, PatternCheck,
    StrongCheck,
};

/// Default node budget for the exact solvers.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Simple undirected graph on `0..n` stored as adjacency bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<FixedBitSet>,
    degrees: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            rows: vec![FixedBitSet::with_capacity(n); n],
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Graph whose adjacency is given by a symmetric predicate on distinct vertices.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if self.rows[u].contains(v) {
            return false;
        }
        self.rows[u].insert(v);
        self.rows[v].insert(u);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edge_count += 1;
        true
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// The common degree, if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = *self.degrees.first()?;
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }

    /// Degree -> number of vertices with that degree.
    pub fn degree_profile(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &d in &self.degrees {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n() {
            out.extend(self.rows[u].ones().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.is_adjacent(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut rows = Vec::with_capacity(n);
        let mut degrees = Vec::with_capacity(n);
        for v in 0..n {
            let mut row = self.rows[v].clone();
            row.toggle_range(..);
            row.remove(v);
            degrees.push(row.count_ones(..));
            rows.push(row);
        }
        let edge_count = n * n.saturating_sub(1) / 2 - self.edge_count;
        Graph { rows, degrees, edge_count }
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut g = Graph::empty(off + other.n());
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off);
        }
        g
    }

    /// Number of triangles, counted once each.
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for u in 0..self.n() {
            for v in self.rows[u].ones().filter(|&v| v > u) {
                total += self.rows[u]
                    .intersection(&self.rows[v])
                    .filter(|&w| w > v)
                    .count() as u64;
            }
        }
        total
    }

    /// Number of edges with both ends in `set`.
    pub fn edges_within(&self, set: &FixedBitSet) -> usize {
        set.ones().map(|v| self.rows[v].intersection_count(set)).sum::<usize>() / 2
    }

    pub fn vertex_set(&self, vertices: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        for v in vertices {
            s.insert(v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn construction_rejects_loops() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn complement_and_union() {
        let c5 = cycle(5);
        let comp = c5.complement();
        assert_eq!(comp.edge_count(), 5);
        assert_eq!(comp.regular_degree(), Some(2));
        let u = c5.disjoint_union(&complete(3));
        assert_eq!(u.n(), 8);
        assert_eq!(u.edge_count(), 8);
        assert!(!u.is_adjacent(0, 5));
    }

    #[test]
    fn triangles_and_induced_edges() {
        assert_eq!(complete(5).triangle_count(), 10);
        assert_eq!(complete_bipartite(4, 4).triangle_count(), 0);
        assert_eq!(petersen().triangle_count(), 0);
        let k5 = complete(5);
        let s = k5.vertex_set([0, 2, 4]);
        assert_eq!(k5.edges_within(&s), 3);
        let ind = k5.induced(&[1, 3]);
        assert_eq!(ind.edge_count(), 1);
    }

    #[test]
    fn degree_profile_counts() {
        let p = path(4);
        let prof = p.degree_profile();
        assert_eq!(prof.get(&1), Some(&2));
        assert_eq!(prof.get(&2), Some(&2));
        assert_eq!(p.regular_degree(), None);
        assert_eq!(petersen().regular_degree(), Some(3));
    }
}
