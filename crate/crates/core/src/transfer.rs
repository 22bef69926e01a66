//! Random 2-colourings of hyperedges and the bichromatic part of the shadow.

use num_rational::Ratio;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::containers::{check_pseudorandom, CheckMode, PseudorandomParams, Provenance};
use crate::error::{Error, Result};
use crate::graph::{is_pattern_free, shadow_graph, ForbiddenPattern, Graph, LinearHypergraph, PatternCheck};

/// One colour bit per vertex slot of every hyperedge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub seed: u64,
    /// `colors[e][i]` colours the `i`-th (sorted) vertex of edge `e`.
    pub colors: Vec<Vec<bool>>,
}

/// Independent fair bits for every slot. Edge `e` draws from ChaCha8 stream
/// `e` of `seed`, slot by slot.
pub fn random_coloring(h: &LinearHypergraph, seed: u64) -> EdgeColoring {
    let colors = h
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            (0..e.len()).map(|_| rng.gen::<bool>()).collect()
        })
        .collect();
    EdgeColoring { seed, colors }
}

/// Shadow pairs whose common hyperedge colours their ends differently.
pub fn bichromatic_subgraph(h: &LinearHypergraph, c: &EdgeColoring) -> Result<Graph> {
    if c.colors.len() != h.edge_count() || c.colors.iter().zip(h.edges()).any(|(c, e)| c.len() != e.len()) {
        return Err(Error::InvalidParameter("colouring does not match the hypergraph".into()));
    }
    let mut g = Graph::empty(h.n());
    for (e, col) in h.edges().iter().zip(&c.colors) {
        for a in 0..e.len() {
            for b in a + 1..e.len() {
                if col[a] != col[b] && !g.add_edge(e[a], e[b]) {
                    return Err(Error::InvalidHypergraph(format!(
                        "pair ({}, {}) lies in two edges",
                        e[a], e[b]
                    )));
                }
            }
        }
    }
    Ok(g)
}

/// Shadow and post-colouring pseudorandomness targets.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransferParams {
    pub n: usize,
    pub r: usize,
    pub d: usize,
    /// `alpha = dr/2n`, `m = ceil(2n/r)`.
    pub shadow: PseudorandomParams,
    /// `alpha' = dr/4n`, `m' = ceil(2n/r)`.
    pub colored: PseudorandomParams,
    /// `2048 (ln n)^3`, the uniformity the asymptotic statement asks for.
    pub uniformity_gate: f64,
    pub gate_met: bool,
}

pub fn derive_transfer_params(h: &LinearHypergraph) -> Result<TransferParams> {
    let d = h.regular_degree().ok_or(Error::NotRegular)?;
    let (n, r) = (h.n(), h.uniformity());
    if d == 0 || r == 0 {
        return Err(Error::InvalidHypergraph("empty hypergraph".into()));
    }
    let m = (2 * n).div_ceil(r);
    let shadow = PseudorandomParams::new(Ratio::new((d * r) as u64, 2 * n as u64), m, Provenance::TransferDerived)?;
    let colored = PseudorandomParams::new(Ratio::new((d * r) as u64, 4 * n as u64), m, Provenance::TransferDerived)?;
    let uniformity_gate = 2048.0 * (n as f64).ln().powi(3);
    Ok(TransferParams { n, r, d, shadow, colored, uniformity_gate, gate_met: r as f64 >= uniformity_gate })
}

/// `sum_e C(|e ∩ X|, 2)` against `(dn/r) C(r|X|/n, 2)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvexityCheck {
    pub lhs: u64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn convexity_check(h: &LinearHypergraph, x: &[usize]) -> Result<ConvexityCheck> {
    let d = h.regular_degree().ok_or(Error::NotRegular)?;
    let (n, r) = (h.n() as f64, h.uniformity() as f64);
    let mut inside = vec![false; h.n()];
    for &v in x {
        inside[v] = true;
    }
    let lhs: u64 = h
        .edges()
        .iter()
        .map(|e| {
            let k = e.iter().filter(|&&v| inside[v]).count() as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum();
    let size = inside.iter().filter(|&&b| b).count() as f64;
    let avg = r * size / n;
    let rhs = d as f64 * n / r * avg * (avg - 1.0) / 2.0;
    Ok(ConvexityCheck { lhs, rhs, ok: lhs as f64 >= rhs - 1e-9 * rhs.abs().max(1.0) })
}

/// Seed of trial `trial`: first word of ChaCha8 stream `trial` of `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.next_u64()
}

/// One colouring trial.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub edges_kept: usize,
    pub kept_fraction: f64,
    /// Kept fraction of the shadow pairs inside a random set of size `m'`.
    pub kept_fraction_sample: f64,
    /// `None` when the exact search ran out of budget.
    pub pattern_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(serialize_with = "ratio_text")]
    pub alpha_prime: Ratio<u64>,
    pub m_prime: usize,
    pub pseudorandom_sampled: bool,
}

fn ratio_text<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Copy, Debug)]
pub struct TrialOptions {
    pub pattern: Option<ForbiddenPattern>,
    pub budget: u64,
    /// Subsets per size class for the sampled pseudorandomness check.
    pub samples_per_size: usize,
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions { pattern: None, budget: crate::graph::DEFAULT_BUDGET, samples_per_size: 20 }
    }
}

/// Runs one trial from its own seed.
pub fn run_trial(h: &LinearHypergraph, params: &TransferParams, trial: u64, seed: u64, opts: &TrialOptions) -> Result<(TrialRecord, Graph)> {
    let tseed = trial_seed(seed, trial);
    let coloring = random_coloring(h, tseed);
    let g = bichromatic_subgraph(h, &coloring)?;
    let shadow_edges = h.shadow_edge_count();
    let (pattern_free, witness) = match opts.pattern {
        None => (None, None),
        Some(p) => match is_pattern_free(&g, p, opts.budget) {
            PatternCheck::Free => (Some(true), None),
            PatternCheck::Found(w) => (Some(false), Some(w)),
            PatternCheck::Undecided { .. } => (None, None),
        },
    };
    let m = params.colored.m.min(h.n());
    let mut rng = ChaCha8Rng::seed_from_u64(tseed);
    rng.set_stream(u64::MAX);
    let sample: Vec<usize> = rand::seq::index::sample(&mut rng, h.n(), m).into_vec();
    let set = g.vertex_set(sample.iter().copied());
    let shadow_inside = shadow_graph(h).edges_within(&set);
    let kept_inside = g.edges_within(&set);
    let pr = check_pseudorandom(
        &g,
        &params.colored,
        CheckMode::Sampled { per_size: opts.samples_per_size, seed: tseed },
    )?;
    let record = TrialRecord {
        trial,
        seed: tseed,
        edges_kept: g.edge_count(),
        kept_fraction: ratio(g.edge_count(), shadow_edges),
        kept_fraction_sample: ratio(kept_inside, shadow_inside),
        pattern_free,
        witness,
        alpha_prime: params.colored.alpha,
        m_prime: params.colored.m,
        pseudorandom_sampled: pr.ok,
    };
    Ok((record, g))
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Trials `0..trials`, in trial order whatever the schedule.
pub fn run_trials(h: &LinearHypergraph, trials: u64, seed: u64, opts: &TrialOptions) -> Result<Vec<TrialRecord>> {
    let params = derive_transfer_params(h)?;
    (0..trials)
        .into_par_iter()
        .map(|t| run_trial(h, &params, t, seed, opts).map(|(r, _)| r))
        .collect()
}

/// Aggregate of a batch of trials.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcentrationReport {
    pub trials: u64,
    pub shadow_edges: usize,
    pub min_fraction: f64,
    pub max_fraction: f64,
    /// Mean kept pairs per hyperedge over all edge-trials.
    pub mean_kept_per_edge: f64,
    /// `C(r, 2) / 2`.
    pub expected_kept_per_edge: f64,
    /// Whether the `[0.4, 0.6]` window is asserted (shadow has >= 1000 edges).
    pub window_applies: bool,
    pub within_window: bool,
    pub pattern_failures: u64,
    pub undecided: u64,
    pub pseudorandom_failures: u64,
}

/// `pattern_checked` says whether the trials ran a pattern search, so that
/// missing answers count as undecided.
pub fn concentration_check(h: &LinearHypergraph, records: &[TrialRecord], pattern_checked: bool) -> ConcentrationReport {
    let shadow_edges = h.shadow_edge_count();
    let r = h.uniformity() as f64;
    let fr = records.iter().map(|t| t.kept_fraction);
    let min_fraction = fr.clone().fold(f64::INFINITY, f64::min);
    let max_fraction = fr.fold(f64::NEG_INFINITY, f64::max);
    let kept: usize = records.iter().map(|t| t.edges_kept).sum();
    let edge_trials = (records.len() * h.edge_count()).max(1);
    ConcentrationReport {
        trials: records.len() as u64,
        shadow_edges,
        min_fraction,
        max_fraction,
        mean_kept_per_edge: kept as f64 / edge_trials as f64,
        expected_kept_per_edge: r * (r - 1.0) / 4.0,
        window_applies: shadow_edges >= 1000,
        within_window: min_fraction >= 0.4 && max_fraction <= 0.6,
        pattern_failures: records.iter().filter(|t| t.pattern_free == Some(false)).count() as u64,
        undecided: if pattern_checked {
            records.iter().filter(|t| t.pattern_free.is_none()).count() as u64
        } else {
            0
        },
        pseudorandom_failures: records.iter().filter(|t| !t.pseudorandom_sampled).count() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unital_line_hypergraph;

    fn one_edge(r: usize) -> LinearHypergraph {
        LinearHypergraph::new(r, vec![(0..r).collect()]).unwrap()
    }

    #[test]
    fn coloring_is_reproducible() {
        let h = unital_line_hypergraph(2).unwrap();
        assert_eq!(random_coloring(&h, 5), random_coloring(&h, 5));
        assert_ne!(random_coloring(&h, 5), random_coloring(&h, 6));
    }

    #[test]
    fn fair_bits() {
        let h = unital_line_hypergraph(3).unwrap();
        let (mut ones, mut total) = (0usize, 0usize);
        for seed in 0..50 {
            for col in random_coloring(&h, seed).colors {
                ones += col.iter().filter(|&&b| b).count();
                total += col.len();
            }
        }
        assert!(total >= 10_000);
        assert!((ones as f64 / total as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn single_pair_is_a_coin() {
        let h = one_edge(2);
        let kept: usize =
            (0..2000).map(|s| bichromatic_subgraph(&h, &random_coloring(&h, s)).unwrap().edge_count()).sum();
        assert!((kept as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn fixed_colourings() {
        let h = one_edge(4);
        let mono = EdgeColoring { seed: 0, colors: vec![vec![true; 4]] };
        assert_eq!(bichromatic_subgraph(&h, &mono).unwrap().edge_count(), 0);
        let split = EdgeColoring { seed: 0, colors: vec![vec![true, false, true, false]] };
        assert_eq!(bichromatic_subgraph(&h, &split).unwrap().edge_count(), 4);
        let bad = EdgeColoring { seed: 0, colors: vec![vec![true; 3]] };
        assert!(bichromatic_subgraph(&h, &bad).is_err());
    }

    #[test]
    fn unital_parameters() {
        let p = derive_transfer_params(&unital_line_hypergraph(3).unwrap()).unwrap();
        assert_eq!((p.n, p.r, p.d), (63, 9, 4));
        assert_eq!(p.shadow.alpha, Ratio::new(2, 7));
        assert_eq!(p.shadow.m, 14);
        assert_eq!(p.colored.alpha, Ratio::new(1, 7));
        assert!(!p.gate_met);
        let p = derive_transfer_params(&one_edge(5)).unwrap();
        assert_eq!((p.shadow.m, p.shadow.alpha), (2, Ratio::new(1, 2)));
    }

    #[test]
    fn convexity_on_everything() {
        for q in [2, 3] {
            let h = unital_line_hypergraph(q).unwrap();
            let all: Vec<usize> = (0..h.n()).collect();
            let c = convexity_check(&h, &all).unwrap();
            assert!(c.ok);
            assert_eq!(c.lhs as usize, h.shadow_edge_count());
        }
    }

    #[test]
    fn trials_are_schedule_independent() {
        let h = unital_line_hypergraph(2).unwrap();
        let opts = TrialOptions { pattern: Some(ForbiddenPattern::Clique(4)), ..Default::default() };
        let a = run_trials(&h, 8, 77, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_trials(&h, 8, 77, &opts).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.iter().all(|t| t.pattern_free == Some(true)));
    }
}
