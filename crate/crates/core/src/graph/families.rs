//! Small named graphs used as fixtures and sanity instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;

pub fn complete(n: usize) -> Graph {
    Graph::from_fn(n, |_, _| true)
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_fn(a + b, |u, v| (u < a) != (v < a))
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    Graph::from_fn(n, |u, v| v == u + 1 || (u == 0 && v == n - 1))
}

pub fn path(n: usize) -> Graph {
    Graph::from_fn(n, |u, v| v == u + 1)
}

/// `m` disjoint edges.
pub fn perfect_matching(m: usize) -> Graph {
    Graph::from_fn(2 * m, |u, v| u / 2 == v / 2)
}

/// `m` disjoint copies of `K_size`.
pub fn disjoint_cliques(m: usize, size: usize) -> Graph {
    Graph::from_fn(m * size, |u, v| u / size == v / size)
}

pub fn petersen() -> Graph {
    // outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5
    Graph::from_fn(10, |u, v| match (u < 5, v < 5) {
        (true, true) => (v + 5 - u) % 5 == 1 || (u + 5 - v) % 5 == 1,
        (false, false) => (v + 5 - u) % 5 == 2 || (u + 5 - v) % 5 == 2,
        _ => v == u + 5,
    })
}

/// Erdős–Rényi G(n, p) from a seeded ChaCha8 stream.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Graph::from_fn(n, |_, _| rng.gen_bool(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_sizes() {
        assert_eq!(complete(6).edge_count(), 15);
        assert_eq!(complete_bipartite(3, 4).edge_count(), 12);
        assert_eq!(cycle(7).regular_degree(), Some(2));
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(perfect_matching(4).regular_degree(), Some(1));
        assert_eq!(disjoint_cliques(3, 4).edge_count(), 18);
        let p = petersen();
        assert_eq!(p.edge_count(), 15);
        assert_eq!(p.regular_degree(), Some(3));
        assert_eq!(random_gnp(30, 0.5, 7), random_gnp(30, 0.5, 7));
    }
}
