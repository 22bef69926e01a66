use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::clique::{CliqueSearch, SearchOutcome};
use super::hypergraph::{shadow_graph, LinearHypergraph};
use super::Graph;
use crate::error::{Error, Result};

/// Forbidden subgraphs supported by the exact checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ForbiddenPattern {
    /// `K_s`, `s >= 3`. `Clique(3)` is the triangle.
    Clique(usize),
    /// `C_k`, `k` odd and at least 5.
    OddCycle(usize),
    C4,
}

impl ForbiddenPattern {
    pub fn clique(s: usize) -> Result<Self> {
        if s < 3 {
            return Err(Error::InvalidParameter(format!("clique size {s} < 3")));
        }
        Ok(ForbiddenPattern::Clique(s))
    }

    pub fn odd_cycle(k: usize) -> Result<Self> {
        match k {
            3 => Ok(ForbiddenPattern::Clique(3)),
            k if k >= 5 && k % 2 == 1 => Ok(ForbiddenPattern::OddCycle(k)),
            _ => Err(Error::InvalidParameter(format!("C{k} is not an odd cycle"))),
        }
    }

    pub fn triangle() -> Self {
        ForbiddenPattern::Clique(3)
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            ForbiddenPattern::Clique(s) => s,
            ForbiddenPattern::OddCycle(k) => k,
            ForbiddenPattern::C4 => 4,
        }
    }

    /// Edges of the copy of this pattern spanned by `copy` (cliques: all
    /// pairs; cycles: consecutive vertices, cyclically).
    fn copy_edges(&self, copy: &[usize]) -> Vec<(usize, usize)> {
        match self {
            ForbiddenPattern::Clique(_) => {
                let mut out = Vec::new();
                for (i, &u) in copy.iter().enumerate() {
                    for &v in &copy[i + 1..] {
                        out.push((u, v));
                    }
                }
                out
            }
            _ => (0..copy.len()).map(|i| (copy[i], copy[(i + 1) % copy.len()])).collect(),
        }
    }
}

impl fmt::Display for ForbiddenPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForbiddenPattern::Clique(3) => write!(f, "triangle"),
            ForbiddenPattern::Clique(s) => write!(f, "k{s}"),
            ForbiddenPattern::OddCycle(k) => write!(f, "c{k}"),
            ForbiddenPattern::C4 => write!(f, "c4"),
        }
    }
}

impl FromStr for ForbiddenPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "triangle" {
            return Ok(Self::triangle());
        }
        let bad = || Error::Parse(format!("unknown pattern '{s}'"));
        let (kind, num) = s.split_at(1.min(s.len()));
        let num: usize = num.parse().map_err(|_| bad())?;
        match (kind, num) {
            ("k", s) => Self::clique(s),
            ("c", 4) => Ok(ForbiddenPattern::C4),
            ("c", k) => Self::odd_cycle(k),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for ForbiddenPattern {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ForbiddenPattern> for String {
    fn from(p: ForbiddenPattern) -> String {
        p.to_string()
    }
}

/// Outcome of a forbidden-subgraph search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternCheck {
    Free,
    /// A copy of the pattern: the clique's vertices, or a cycle in order.
    Found(Vec<usize>),
    Undecided { nodes: u64 },
}

impl PatternCheck {
    pub fn is_free(&self) -> Option<bool> {
        match self {
            PatternCheck::Free => Some(true),
            PatternCheck::Found(_) => Some(false),
            PatternCheck::Undecided { .. } => None,
        }
    }
}

/// Exact search for a copy of `pattern` in `g`.
pub fn is_pattern_free(g: &Graph, pattern: ForbiddenPattern, budget: u64) -> PatternCheck {
    match pattern {
        ForbiddenPattern::Clique(s) => {
            let mut search = CliqueSearch::new(g, budget);
            match search.find(s) {
                SearchOutcome::Found(w) => PatternCheck::Found(w),
                SearchOutcome::Absent { .. } => PatternCheck::Free,
                SearchOutcome::Undecided { .. } => PatternCheck::Undecided { nodes: search.nodes() },
            }
        }
        ForbiddenPattern::C4 => match find_c4(g) {
            Some(w) => PatternCheck::Found(w),
            None => PatternCheck::Free,
        },
        ForbiddenPattern::OddCycle(k) => {
            if odd_girth(g).is_none_or(|og| og > k) {
                return PatternCheck::Free;
            }
            let mut nodes = 0;
            match find_cycle(g, k, budget, &mut nodes) {
                Ok(Some(w)) => PatternCheck::Found(w),
                Ok(None) => PatternCheck::Free,
                Err(()) => PatternCheck::Undecided { nodes },
            }
        }
    }
}

/// Checks a witness against the adjacency directly.
pub fn validate_witness(g: &Graph, pattern: ForbiddenPattern, witness: &[usize]) -> bool {
    if witness.len() != pattern.vertex_count() || witness.iter().any(|&v| v >= g.n()) {
        return false;
    }
    let distinct: BTreeSet<_> = witness.iter().collect();
    if distinct.len() != witness.len() {
        return false;
    }
    pattern.copy_edges(witness).iter().all(|&(u, v)| g.is_adjacent(u, v))
}

fn find_c4(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut via = vec![usize::MAX; n];
    let mut touched = Vec::new();
    for u in 0..n {
        for w in g.neighbors(u).ones() {
            for v in g.neighbors(w).ones().filter(|&v| v > u) {
                if via[v] == usize::MAX {
                    via[v] = w;
                    touched.push(v);
                } else if via[v] != w {
                    return Some(vec![u, via[v], v, w]);
                }
            }
        }
        for v in touched.drain(..) {
            via[v] = usize::MAX;
        }
    }
    None
}

/// Length of the shortest odd cycle, if any.
pub(crate) fn odd_girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if best.is_some_and(|b| 2 * dist[u] + 1 >= b) {
                break;
            }
            for w in g.neighbors(u).ones() {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                } else if dist[w] == dist[u] {
                    let len = 2 * dist[u] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Depth-first search for a cycle on exactly `k` vertices whose smallest
/// vertex is its start. `Err` means the budget ran out.
fn find_cycle(g: &Graph, k: usize, budget: u64, nodes: &mut u64) -> std::result::Result<Option<Vec<usize>>, ()> {
    let n = g.n();
    let mut path = Vec::with_capacity(k);
    let mut on_path = FixedBitSet::with_capacity(n);
    for start in 0..n {
        path.push(start);
        on_path.insert(start);
        let found = extend_cycle(g, k, start, &mut path, &mut on_path, budget, nodes)?;
        if found {
            return Ok(Some(path));
        }
        path.pop();
        on_path.remove(start);
    }
    Ok(None)
}

fn extend_cycle(
    g: &Graph,
    k: usize,
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut FixedBitSet,
    budget: u64,
    nodes: &mut u64,
) -> std::result::Result<bool, ()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(());
    }
    let last = *path.last().unwrap();
    if path.len() == k {
        return Ok(g.is_adjacent(last, start));
    }
    for v in g.neighbors(last).ones().filter(|&v| v > start) {
        if on_path.contains(v) {
            continue;
        }
        path.push(v);
        on_path.insert(v);
        if extend_cycle(g, k, start, path, on_path, budget, nodes)? {
            return Ok(true);
        }
        path.pop();
        on_path.remove(v);
    }
    Ok(false)
}

/// Outcome of the strong-freeness test on a linear hypergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrongCheck {
    /// Every copy of the pattern in the shadow is rescued by some edge.
    Strong { copies: u64 },
    /// A copy in the shadow whose intersection with every edge induces a
    /// bipartite piece.
    Violation(Vec<usize>),
    Undecided { copies: u64 },
}

impl StrongCheck {
    pub fn is_strong(&self) -> Option<bool> {
        match self {
            StrongCheck::Strong { .. } => Some(true),
            StrongCheck::Violation(_) => Some(false),
            StrongCheck::Undecided { .. } => None,
        }
    }
}

/// Enumerates every copy `F'` of `pattern` in the shadow of `h` and checks
/// that some edge `e` induces a non-bipartite subgraph of `F'` on `e ∩ V(F')`.
pub fn is_strongly_pattern_free(h: &LinearHypergraph, pattern: ForbiddenPattern, budget: u64) -> StrongCheck {
    let g = shadow_graph(h);
    let owners = h.pair_owners();
    let mut copies = 0u64;
    let mut nodes = 0u64;
    let mut violation = None;
    let mut on_copy = |copy: &[usize]| -> bool {
        copies += 1;
        if rescued(h, &owners, pattern, copy) {
            true
        } else {
            violation = Some(copy.to_vec());
            false
        }
    };
    let complete = match pattern {
        ForbiddenPattern::Clique(s) => {
            let mut all = FixedBitSet::with_capacity(g.n());
            all.insert_range(..);
            each_clique(&g, s, all, &mut Vec::new(), budget, &mut nodes, &mut on_copy)
        }
        _ => each_cycle(&g, pattern.vertex_count(), budget, &mut nodes, &mut on_copy),
    };
    match (complete, violation) {
        (_, Some(copy)) => StrongCheck::Violation(copy),
        (Ok(()), None) => StrongCheck::Strong { copies },
        (Err(()), None) => StrongCheck::Undecided { copies },
    }
}

fn rescued(
    h: &LinearHypergraph,
    owners: &std::collections::HashMap<(usize, usize), usize>,
    pattern: ForbiddenPattern,
    copy: &[usize],
) -> bool {
    let edges = pattern.copy_edges(copy);
    // only edges holding one of the copy's pairs can meet it in >= 2 vertices
    let candidates: BTreeSet<usize> = edges
        .iter()
        .filter_map(|&(u, v)| owners.get(&(u.min(v), u.max(v))).copied())
        .collect();
    candidates.into_iter().any(|ei| {
        let e = &h.edges()[ei];
        let inside: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|(u, v)| e.binary_search(u).is_ok() && e.binary_search(v).is_ok())
            .collect();
        !is_bipartite(&inside)
    })
}

fn is_bipartite(edges: &[(usize, usize)]) -> bool {
    let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let idx = |x: usize| verts.binary_search(&x).unwrap();
    let mut adj = vec![Vec::new(); verts.len()];
    for &(u, v) in edges {
        adj[idx(u)].push(idx(v));
        adj[idx(v)].push(idx(u));
    }
    let mut side = vec![u8::MAX; verts.len()];
    for s in 0..verts.len() {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[u];
                    queue.push_back(w);
                } else if side[w] == side[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// Calls `f` on every `s`-clique (ascending vertices); stops early when `f`
/// returns false.
fn each_clique(
    g: &Graph,
    s: usize,
    cands: FixedBitSet,
    stack: &mut Vec<usize>,
    budget: u64,
    nodes: &mut u64,
    f: &mut dyn FnMut(&[usize]) -> bool,
) -> std::result::Result<(), ()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(());
    }
    if stack.len() == s {
        return if f(stack) { Ok(()) } else { Err(()) };
    }
    let mut rest = cands;
    while let Some(v) = rest.minimum() {
        rest.remove(v);
        if rest.count_ones(..) + stack.len() + 1 < s {
            // not enough candidates left, but still try v itself
        }
        let mut next = rest.clone();
        next.intersect_with(g.neighbors(v));
        stack.push(v);
        let r = each_clique(g, s, next, stack, budget, nodes, f);
        stack.pop();
        r?;
    }
    Ok(())
}

/// Calls `f` on every cycle of length `k`, each listed once: smallest vertex
/// first, second vertex smaller than the last.
fn each_cycle(
    g: &Graph,
    k: usize,
    budget: u64,
    nodes: &mut u64,
    f: &mut dyn FnMut(&[usize]) -> bool,
) -> std::result::Result<(), ()> {
    fn rec(
        g: &Graph,
        k: usize,
        path: &mut Vec<usize>,
        on_path: &mut FixedBitSet,
        budget: u64,
        nodes: &mut u64,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> std::result::Result<(), ()> {
        *nodes += 1;
        if *nodes > budget {
            return Err(());
        }
        let start = path[0];
        let last = *path.last().unwrap();
        if path.len() == k {
            if g.is_adjacent(last, start) && path[1] < last && !f(path) {
                return Err(());
            }
            return Ok(());
        }
        for v in g.neighbors(last).ones().filter(|&v| v > start) {
            if on_path.contains(v) {
                continue;
            }
            path.push(v);
            on_path.insert(v);
            let r = rec(g, k, path, on_path, budget, nodes, f);
            path.pop();
            on_path.remove(v);
            r?;
        }
        Ok(())
    }
    let mut on_path = FixedBitSet::with_capacity(g.n());
    for start in 0..g.n() {
        let mut path = vec![start];
        on_path.insert(start);
        let r = rec(g, k, &mut path, &mut on_path, budget, nodes, f);
        on_path.remove(start);
        r?;
    }
    Ok(())
}
