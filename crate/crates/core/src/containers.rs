//! (α, m)-pseudorandomness, the fingerprint procedure and the independent-set
//! count bounds it yields.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_independent, Graph};
use crate::spectral::{Scalar, SpectralReport};

/// Largest graph scanned by exhaustive subset checks.
pub const MAX_EXHAUSTIVE_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactChecked,
    MixingDerived,
    TransferDerived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ExactChecked => "exact-checked",
            Provenance::MixingDerived => "mixing-derived",
            Provenance::TransferDerived => "transfer-derived",
        })
    }
}

/// Every `X` with `|X| >= m` spans at least `alpha * C(|X|, 2)` edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PseudorandomParams {
    #[serde(serialize_with = "ratio_text")]
    pub alpha: Ratio<u64>,
    pub m: usize,
    pub provenance: Provenance,
}

fn ratio_text<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl PseudorandomParams {
    pub fn new(alpha: Ratio<u64>, m: usize, provenance: Provenance) -> Result<Self> {
        if alpha > Ratio::from_integer(1) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} exceeds 1")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        Ok(PseudorandomParams { alpha, m, provenance })
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(0.0)
    }

    /// `exp(-alpha s) n <= m`.
    pub fn admits(&self, n: usize, s: usize) -> bool {
        (-self.alpha_f64() * s as f64).exp() * n as f64 <= self.m as f64
    }

    /// Smallest `s` with `exp(-alpha s) n <= m`, if any.
    pub fn min_s(&self, n: usize) -> Option<usize> {
        if self.m >= n {
            return Some(0);
        }
        let a = self.alpha_f64();
        if a <= 0.0 {
            return None;
        }
        let s = ((n as f64 / self.m as f64).ln() / a).ceil().max(0.0) as usize;
        (s.saturating_sub(1)..s + 2).find(|&s| self.admits(n, s))
    }

    fn satisfied_by(&self, edges: usize, size: usize) -> bool {
        let pairs = (size * size.saturating_sub(1) / 2) as u128;
        edges as u128 * *self.alpha.denom() as u128 >= *self.alpha.numer() as u128 * pairs
    }
}

/// `alpha = d/(2n)`, `m = ceil(2 λ n / d)`: by the mixing lemma every `X`
/// with `|X| >= m` has `2e(X) >= (d/n)|X|^2 - λ|X| >= (d/2n)|X|^2`.
pub fn mixing_params_from(n: usize, d: usize, lambda: f64) -> Result<PseudorandomParams> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("mixing parameters need n, d >= 1".into()));
    }
    let raw = 2.0 * lambda * n as f64 / d as f64;
    let m = ((raw * (1.0 - 1e-12)).ceil() as usize).max(1);
    PseudorandomParams::new(Ratio::new(d as u64, 2 * n as u64), m, Provenance::MixingDerived)
}

pub fn mixing_params<T: Scalar>(report: &SpectralReport<T>) -> Result<PseudorandomParams> {
    if !report.is_regular || report.loops > 0 {
        return Err(Error::NotRegular);
    }
    mixing_params_from(report.n, report.d.f64().round() as usize, report.lambda.f64())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    /// `per_size` uniform subsets of every size `>= m`.
    Sampled { per_size: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudorandomCheck {
    pub ok: bool,
    /// Smallest violating set: fewest vertices, then lexicographic.
    pub violator: Option<Vec<usize>>,
    pub sets_checked: u64,
}

/// Checks `e(X) >= alpha C(|X|, 2)` for subsets with `|X| >= m`.
pub fn check_pseudorandom(g: &Graph, params: &PseudorandomParams, mode: CheckMode) -> Result<PseudorandomCheck> {
    let n = g.n();
    if params.alpha.is_zero() || params.m > n {
        return Ok(PseudorandomCheck { ok: true, violator: None, sets_checked: 0 });
    }
    match mode {
        CheckMode::Exhaustive => {
            let table = SubsetEdges::new(g)?;
            let mut best: Option<(usize, Vec<usize>)> = None;
            let mut checked = 0u64;
            for mask in 0..table.edges.len() {
                let size = (mask as u32).count_ones() as usize;
                if size < params.m {
                    continue;
                }
                checked += 1;
                if !params.satisfied_by(table.edges[mask] as usize, size) {
                    let set = mask_vertices(mask, n);
                    let key = (size, set);
                    if best.as_ref().is_none_or(|b| key < *b) {
                        best = Some(key);
                    }
                }
            }
            Ok(PseudorandomCheck { ok: best.is_none(), violator: best.map(|b| b.1), sets_checked: checked })
        }
        CheckMode::Sampled { per_size, seed } => {
            let found: Vec<Option<Vec<usize>>> = (params.m..=n)
                .into_par_iter()
                .map(|size| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(size as u64);
                    let mut worst: Option<Vec<usize>> = None;
                    for _ in 0..per_size {
                        let mut set: Vec<usize> = rand::seq::index::sample(&mut rng, n, size).into_vec();
                        set.sort_unstable();
                        let edges = g.edges_within(&g.vertex_set(set.iter().copied()));
                        if !params.satisfied_by(edges, size) && worst.as_ref().is_none_or(|w| set < *w) {
                            worst = Some(set);
                        }
                    }
                    worst
                })
                .collect();
            let violator = found.into_iter().flatten().next();
            let sets = (n + 1 - params.m) as u64 * per_size as u64;
            Ok(PseudorandomCheck { ok: violator.is_none(), violator, sets_checked: sets })
        }
    }
}

fn mask_vertices(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `e(X)` for every subset `X`, indexed by bitmask.
struct SubsetEdges {
    edges: Vec<u16>,
}

impl SubsetEdges {
    fn new(g: &Graph) -> Result<Self> {
        let n = g.n();
        if n > MAX_EXHAUSTIVE_N {
            return Err(Error::InvalidParameter(format!(
                "exhaustive subset scan limited to n <= {MAX_EXHAUSTIVE_N}, got {n}"
            )));
        }
        let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).ones().fold(0u32, |m, w| m | 1 << w)).collect();
        let mut edges = vec![0u16; 1 << n];
        for mask in 1usize..1 << n {
            let v = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            edges[mask] = edges[rest] + (adj[v] & rest as u32).count_ones() as u16;
        }
        Ok(SubsetEdges { edges })
    }
}

/// `min e(X)` over `|X| = k`, for every `k` in `0..=n`.
pub fn min_edges_by_size(g: &Graph) -> Result<Vec<usize>> {
    let table = SubsetEdges::new(g)?;
    let mut best = vec![usize::MAX; g.n() + 1];
    for (mask, &e) in table.edges.iter().enumerate() {
        let k = (mask as u32).count_ones() as usize;
        best[k] = best[k].min(e as usize);
    }
    Ok(best)
}

/// Largest `alpha` for which `g` is `(alpha, m)`-pseudorandom, from an
/// exhaustive subset scan.
pub fn exact_params(g: &Graph, m: usize) -> Result<PseudorandomParams> {
    let mins = min_edges_by_size(g)?;
    let mut alpha = Ratio::from_integer(1u64);
    for (k, &e) in mins.iter().enumerate().skip(m.max(2)) {
        alpha = alpha.min(Ratio::new(e as u64, (k * (k - 1) / 2) as u64));
    }
    PseudorandomParams::new(alpha, m.max(1), Provenance::ExactChecked)
}

/// How each fingerprint step shrinks the current graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerprintRule {
    /// Take the vertex of largest current degree. If it lies in `I` record
    /// it and delete its closed neighbourhood, otherwise delete it alone.
    #[default]
    Pruning,
    /// Record the first vertex of `I` in the current degree order and delete
    /// only its closed neighbourhood.
    ClosedNeighborhood,
}

/// Result of compressing an independent set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub vertices: Vec<usize>,
    /// Vertices left when the procedure stopped, sorted.
    pub remainder: Vec<usize>,
    /// Current-graph sizes `n_0, n_1, ...` after each recorded vertex.
    pub sizes: Vec<usize>,
}

impl Fingerprint {
    pub fn within(&self, m: usize) -> bool {
        self.remainder.len() <= m
    }
}

struct Shrinking<'g> {
    g: &'g Graph,
    alive: FixedBitSet,
    deg: Vec<usize>,
}

impl<'g> Shrinking<'g> {
    fn new(g: &'g Graph) -> Self {
        let mut alive = FixedBitSet::with_capacity(g.n());
        alive.insert_range(..);
        Shrinking { g, alive, deg: g.degrees().to_vec() }
    }

    fn len(&self) -> usize {
        self.alive.count_ones(..)
    }

    fn delete(&mut self, v: usize) {
        if !self.alive.contains(v) {
            return;
        }
        self.alive.remove(v);
        for w in self.g.neighbors(v).ones() {
            if self.alive.contains(w) {
                self.deg[w] -= 1;
            }
        }
    }

    fn delete_closed(&mut self, v: usize) {
        let nbrs: Vec<usize> = self.g.neighbors(v).ones().filter(|&w| self.alive.contains(w)).collect();
        self.delete(v);
        for w in nbrs {
            self.delete(w);
        }
    }

    /// Live vertex of largest current degree, smallest index on ties,
    /// restricted to `within` when given.
    fn top(&self, within: Option<&FixedBitSet>) -> Option<usize> {
        self.alive
            .ones()
            .filter(|&v| within.is_none_or(|s| s.contains(v)))
            .min_by_key(|&v| (std::cmp::Reverse(self.deg[v]), v))
    }
}

fn run_fingerprint(g: &Graph, marked: &FixedBitSet, s: usize, m: usize, rule: FingerprintRule) -> Fingerprint {
    let mut st = Shrinking::new(g);
    let mut vertices = Vec::new();
    let mut sizes = vec![st.len()];
    while st.len() > m {
        match rule {
            FingerprintRule::Pruning => {
                let u = st.top(None).expect("nonempty");
                if marked.contains(u) {
                    if vertices.len() == s {
                        break;
                    }
                    vertices.push(u);
                    st.delete_closed(u);
                    sizes.push(st.len());
                } else {
                    st.delete(u);
                }
            }
            FingerprintRule::ClosedNeighborhood => {
                if vertices.len() == s {
                    break;
                }
                let Some(u) = st.top(Some(marked)) else { break };
                vertices.push(u);
                st.delete_closed(u);
                sizes.push(st.len());
            }
        }
    }
    Fingerprint { vertices, remainder: st.alive.ones().collect(), sizes }
}

/// Compresses the independent set `independent` to at most `s` recorded
/// vertices plus the remainder of the graph they leave behind. Stops once
/// at most `m` vertices remain; `within(m)` reports whether that happened.
pub fn fingerprint(
    g: &Graph,
    independent: &[usize],
    s: usize,
    m: usize,
    rule: FingerprintRule,
) -> Result<Fingerprint> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    if !is_independent(g, independent) {
        return Err(Error::InvalidParameter("set is not independent".into()));
    }
    let marked = g.vertex_set(independent.iter().copied());
    Ok(run_fingerprint(g, &marked, s, m, rule))
}

/// Rebuilds `I` from its recorded vertices and `I ∩ remainder`. The
/// remainder is recomputed from the recorded vertices alone; under the
/// pruning rule this needs a fingerprint that reached `m`.
pub fn reconstruct(
    g: &Graph,
    vertices: &[usize],
    in_remainder: &[usize],
    s: usize,
    m: usize,
    rule: FingerprintRule,
) -> Result<Vec<usize>> {
    let marked = g.vertex_set(vertices.iter().copied());
    let replay = run_fingerprint(g, &marked, s.max(vertices.len()), m, rule);
    if replay.vertices != vertices {
        return Err(Error::InvalidParameter("recorded vertices are not a fingerprint".into()));
    }
    if in_remainder.iter().any(|v| replay.remainder.binary_search(v).is_err()) {
        return Err(Error::InvalidParameter("set leaves the remainder".into()));
    }
    let mut out: Vec<usize> = vertices.iter().chain(in_remainder).copied().collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `C(n, s) C(m, t - s)`.
pub fn count_bound(n: usize, m: usize, s: usize, t: usize) -> Result<BigUint> {
    if !(n >= m && m >= t && t >= s && s >= 1) {
        return Err(Error::InvalidParameter(format!(
            "count bound needs n >= m >= t >= s >= 1, got n={n} m={m} s={s} t={t}"
        )));
    }
    Ok(binomial(BigUint::from(n), BigUint::from(s)) * binomial(BigUint::from(m), BigUint::from(t - s)))
}

/// `(4e² λ / ln² n)^t`, meaningful once `t >= 2n ln² n / d`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NdlBound {
    pub base: f64,
    pub bound: f64,
    pub log10_bound: f64,
    pub threshold: f64,
    pub precondition_met: bool,
}

pub fn count_bound_ndl(n: usize, d: f64, lambda: f64, t: usize) -> Result<NdlBound> {
    if n < 2 || d <= 0.0 || lambda < 0.0 {
        return Err(Error::InvalidParameter("need n >= 2, d > 0, lambda >= 0".into()));
    }
    let ln2 = (n as f64).ln().powi(2);
    let base = 4.0 * std::f64::consts::E.powi(2) * lambda / ln2;
    let threshold = 2.0 * n as f64 * ln2 / d;
    Ok(NdlBound {
        base,
        bound: base.powi(t as i32),
        log10_bound: t as f64 * base.log10(),
        threshold,
        precondition_met: t as f64 >= threshold,
    })
}
