use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::clique::{CliqueSearch, SearchOutcome};
use super::Graph;
use crate::error::{Error, Result};

/// Node limit for [`enumerate_independent_sets`] before it gives up.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 100_000_000;

/// Independence number, exact or as a certified interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceResult {
    /// Largest independent set found.
    pub witness: Vec<usize>,
    /// Proven upper bound; equals `witness.len()` when `exact`.
    pub upper: usize,
    pub exact: bool,
    pub nodes: u64,
}

impl IndependenceResult {
    pub fn lower(&self) -> usize {
        self.witness.len()
    }

    /// The exact value, if the search finished.
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.witness.len())
    }
}

pub fn is_independent(g: &Graph, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(i, &u)| {
        u < g.n() && set[i + 1..].iter().all(|&v| v != u && !g.is_adjacent(u, v))
    })
}

/// Exact independence number via maximum clique search in the complement.
/// When the budget runs out the result is the interval `[lower, upper]`.
pub fn independence_number(g: &Graph, budget: u64) -> IndependenceResult {
    let comp = g.complement();
    let mut search = CliqueSearch::new(&comp, budget);
    let outcome = search.maximum();
    let nodes = search.nodes();
    match outcome {
        SearchOutcome::Found(witness) | SearchOutcome::Absent { best: witness } => IndependenceResult {
            upper: witness.len(),
            witness,
            exact: true,
            nodes,
        },
        SearchOutcome::Undecided { best, upper } => IndependenceResult {
            witness: best,
            upper,
            exact: false,
            nodes,
        },
    }
}

/// Looks for an independent set of exactly `t` vertices.
pub fn find_independent_set(g: &Graph, t: usize, budget: u64) -> SearchOutcome {
    if t > g.n() {
        return SearchOutcome::Absent { best: Vec::new() };
    }
    let comp = g.complement();
    CliqueSearch::new(&comp, budget).find(t)
}

/// Receives each enumerated set.
pub type Visitor<'a> = &'a mut dyn FnMut(&[usize]);

/// Counts independent sets of size exactly `t`, optionally handing each one
/// (sorted) to `visit`. Fails once more than `limit` search nodes are used.
pub fn enumerate_independent_sets(
    g: &Graph,
    t: usize,
    limit: u64,
    mut visit: Option<Visitor<'_>>,
) -> Result<u64> {
    let n = g.n();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut walker = Walker { g, t, limit, nodes: 0, count: 0, stack: Vec::with_capacity(t) };
    walker.walk(all, &mut visit)?;
    Ok(walker.count)
}

struct Walker<'g> {
    g: &'g Graph,
    t: usize,
    limit: u64,
    nodes: u64,
    count: u64,
    stack: Vec<usize>,
}

impl Walker<'_> {
    fn walk(&mut self, cands: FixedBitSet, visit: &mut Option<Visitor<'_>>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::EnumerationBudget { partial: self.count });
        }
        if self.stack.len() == self.t {
            self.count += 1;
            if let Some(f) = visit.as_mut() {
                f(&self.stack);
            }
            return Ok(());
        }
        let need = self.t - self.stack.len();
        if cands.count_ones(..) < need {
            return Ok(());
        }
        let mut rest = cands;
        while let Some(v) = rest.minimum() {
            rest.remove(v);
            let mut next = rest.clone();
            next.difference_with(self.g.neighbors(v));
            self.stack.push(v);
            self.walk(next, visit)?;
            self.stack.pop();
            if rest.count_ones(..) < need {
                break;
            }
        }
        Ok(())
    }
}
