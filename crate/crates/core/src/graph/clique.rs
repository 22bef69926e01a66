use fixedbitset::FixedBitSet;

use super::Graph;

/// Result of a budgeted clique search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A clique meeting the target (or a maximum clique when no target was set).
    Found(Vec<usize>),
    /// The search space was exhausted without reaching the target.
    Absent { best: Vec<usize> },
    /// The node budget ran out. `upper` bounds the clique number from above.
    Undecided { best: Vec<usize>, upper: usize },
}

/// Branch and bound over cliques with a greedy-colouring bound recomputed at
/// every node. Vertices are branched on in order of non-increasing degree,
/// ties by index, so node counts are reproducible.
pub struct CliqueSearch<'g> {
    graph: &'g Graph,
    budget: u64,
    nodes: u64,
}

struct State {
    adj: Vec<FixedBitSet>,
    current: Vec<usize>,
    best: Vec<usize>,
    floor: usize,
    target: Option<usize>,
    found: bool,
    aborted: bool,
}

impl<'g> CliqueSearch<'g> {
    pub fn new(graph: &'g Graph, budget: u64) -> Self {
        CliqueSearch { graph, budget, nodes: 0 }
    }

    /// Nodes expanded by the last search.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Maximum clique. `Found` carries an optimal clique.
    pub fn maximum(&mut self) -> SearchOutcome {
        match self.run(None) {
            SearchOutcome::Absent { best } => SearchOutcome::Found(best),
            other => other,
        }
    }

    /// Any clique on `k` vertices.
    pub fn find(&mut self, k: usize) -> SearchOutcome {
        if k == 0 {
            return SearchOutcome::Found(Vec::new());
        }
        self.run(Some(k))
    }

    fn run(&mut self, target: Option<usize>) -> SearchOutcome {
        let g = self.graph;
        let n = g.n();
        self.nodes = 0;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let adj: Vec<FixedBitSet> = order
            .iter()
            .map(|&v| {
                let mut row = FixedBitSet::with_capacity(n);
                for w in g.neighbors(v).ones() {
                    row.insert(pos[w]);
                }
                row
            })
            .collect();
        let mut st = State {
            adj,
            current: Vec::new(),
            best: Vec::new(),
            floor: target.map_or(0, |t| t - 1),
            target,
            found: false,
            aborted: false,
        };
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        let root_bound = color_classes(&st.adj, &all).last().map_or(0, |&(_, c)| c);
        if n > 0 {
            self.expand(&mut st, all);
        }
        let relabel = |set: &[usize]| {
            let mut out: Vec<usize> = set.iter().map(|&i| order[i]).collect();
            out.sort_unstable();
            out
        };
        let best = relabel(&st.best);
        if st.found {
            SearchOutcome::Found(best)
        } else if st.aborted {
            SearchOutcome::Undecided { upper: root_bound.max(best.len()), best }
        } else {
            SearchOutcome::Absent { best }
        }
    }

    fn expand(&mut self, st: &mut State, mut cands: FixedBitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            st.aborted = true;
            return;
        }
        let classes = color_classes(&st.adj, &cands);
        for &(v, color) in classes.iter().rev() {
            if st.current.len() + color <= st.floor.max(st.best.len()) {
                return;
            }
            st.current.push(v);
            if st.current.len() > st.best.len() {
                st.best = st.current.clone();
            }
            if st.target.is_some_and(|t| st.current.len() >= t) {
                st.found = true;
                return;
            }
            let mut next = cands.clone();
            next.intersect_with(&st.adj[v]);
            if !next.is_clear() {
                self.expand(st, next);
                if st.found || st.aborted {
                    return;
                }
            }
            st.current.pop();
            cands.remove(v);
        }
    }
}

/// Greedy sequential colouring of `cands` in index order; returns vertices
/// grouped by colour with 1-based colour numbers, non-decreasing.
fn color_classes(adj: &[FixedBitSet], cands: &FixedBitSet) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(cands.count_ones(..));
    let mut uncolored = cands.clone();
    let mut color = 0;
    while !uncolored.is_clear() {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = avail.minimum() {
            avail.remove(v);
            avail.difference_with(&adj[v]);
            uncolored.remove(v);
            out.push((v, color));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::families::*;
    use super::*;

    fn omega(g: &Graph) -> usize {
        match CliqueSearch::new(g, u64::MAX).maximum() {
            SearchOutcome::Found(c) => c.len(),
            other => panic!("{other:?}"),
        }
    }

    fn brute_omega(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.is_adjacent(u, v)))
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_cliques() {
        assert_eq!(omega(&complete(6)), 6);
        assert_eq!(omega(&cycle(5)), 2);
        assert_eq!(omega(&petersen()), 2);
        assert_eq!(omega(&Graph::empty(4)), 1);
        assert_eq!(omega(&Graph::empty(0)), 0);
    }

    #[test]
    fn agrees_with_brute_force() {
        for seed in 0..40 {
            let g = random_gnp(12, 0.5, seed);
            assert_eq!(omega(&g), brute_omega(&g), "seed {seed}");
        }
    }

    #[test]
    fn target_search_and_budget() {
        let g = complete(4);
        assert_eq!(CliqueSearch::new(&g, 100).find(4), SearchOutcome::Found(vec![0, 1, 2, 3]));
        assert!(matches!(CliqueSearch::new(&cycle(5), 100).find(3), SearchOutcome::Absent { .. }));
        let big = random_gnp(80, 0.7, 3);
        match CliqueSearch::new(&big, 5).maximum() {
            SearchOutcome::Undecided { best, upper } => assert!(best.len() <= upper),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }
}
