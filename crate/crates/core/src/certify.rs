//! Ramsey lower-bound certificates and the formula-level reports.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{bip_construct, polarity_graph, unital_line_hypergraph, BipAdjacency};
use crate::graph::{
    find_independent_set, independence_number, is_pattern_free, is_strongly_pattern_free, ForbiddenPattern, Graph,
    PatternCheck, SearchOutcome, StrongCheck,
};
use crate::transfer::{bichromatic_subgraph, derive_transfer_params, random_coloring, trial_seed, TransferParams};

pub const TOOL_VERSION: &str = concat!("ramseyforge ", env!("CARGO_PKG_VERSION"));

/// `ceil(2 n (ln n)^2 / d)`.
pub fn t_pseudo(n: u64, d: u64) -> u64 {
    assert!(n >= 1 && d >= 1);
    let ln = (n as f64).ln();
    (2.0 * n as f64 * ln * ln / d as f64).ceil().max(1.0) as u64
}

/// `ceil(256 n (ln n)^2 / (r d))`.
pub fn t_transfer(n: u64, r: u64, d: u64) -> u64 {
    assert!(n >= 1 && r >= 1 && d >= 1);
    let ln = (n as f64).ln();
    (256.0 * n as f64 * ln * ln / (r * d) as f64).ceil().max(1.0) as u64
}

/// `(ln n)^2 / (4 e^2 λ)`, clamped to 1.
pub fn default_probability(n: usize, lambda: f64) -> f64 {
    let p = (n as f64).ln().powi(2) / (4.0 * E * E * lambda);
    if p.is_finite() {
        p.min(1.0)
    } else {
        1.0
    }
}

/// Where the ambient graph of a certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Er { q: u32 },
    Bip { q: u32, s: usize, adjacency: BipAdjacency },
    /// Bichromatic graph of trial `trial` on the unital line hypergraph.
    UnitalTransfer { q: u32, trial: u64, master_seed: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Er { .. } => "er",
            Family::Bip { .. } => "bip",
            Family::UnitalTransfer { .. } => "unital-transfer",
        }
    }

    pub fn params(&self) -> BTreeMap<String, Value> {
        let mut p = BTreeMap::new();
        match *self {
            Family::Er { q } => {
                p.insert("q".into(), q.into());
            }
            Family::Bip { q, s, adjacency } => {
                p.insert("q".into(), q.into());
                p.insert("s".into(), s.into());
                p.insert("adjacency".into(), adjacency.to_string().into());
            }
            Family::UnitalTransfer { q, trial, master_seed } => {
                p.insert("q".into(), q.into());
                p.insert("trial".into(), trial.into());
                p.insert("masterSeed".into(), master_seed.into());
                p.insert("trialSeed".into(), trial_seed(master_seed, trial).into());
            }
        }
        p
    }

    pub fn from_parts(name: &str, params: &BTreeMap<String, Value>) -> Result<Self> {
        let int = |key: &str| -> Result<u64> {
            params
                .get(key)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("family parameter '{key}' missing or not an integer")))
        };
        let q = u32::try_from(int("q")?).map_err(|_| Error::Parse("q out of range".into()))?;
        match name {
            "er" => Ok(Family::Er { q }),
            "bip" => {
                let adjacency = match params.get("adjacency") {
                    Some(Value::String(s)) => s.parse()?,
                    None => BipAdjacency::default(),
                    Some(_) => return Err(Error::Parse("adjacency must be a string".into())),
                };
                Ok(Family::Bip { q, s: int("s")? as usize, adjacency })
            }
            "unital-transfer" => {
                let fam = Family::UnitalTransfer { q, trial: int("trial")?, master_seed: int("masterSeed")? };
                if let Some(ts) = params.get("trialSeed") {
                    if ts.as_u64() != Some(trial_seed(int("masterSeed")?, int("trial")?)) {
                        return Err(Error::Parse("trialSeed does not follow from masterSeed".into()));
                    }
                }
                Ok(fam)
            }
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }

    pub fn build(&self) -> Result<Graph> {
        match *self {
            Family::Er { q } => polarity_graph(q),
            Family::Bip { q, s, adjacency } => Ok(bip_construct(q, s, adjacency)?.graph),
            Family::UnitalTransfer { q, trial, master_seed } => {
                let h = unital_line_hypergraph(q)?;
                bichromatic_subgraph(&h, &random_coloring(&h, trial_seed(master_seed, trial)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Valid,
    Invalid,
    Unverified,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Valid => "VALID",
            Status::Invalid => "INVALID",
            Status::Unverified => "UNVERIFIED",
        })
    }
}

/// Outcome of the sampling and deletion steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub sample: Vec<usize>,
    pub trace: Vec<usize>,
    pub survivors: Vec<usize>,
    /// False when an exact search ran out of budget.
    pub complete: bool,
}

/// Keeps each vertex independently with probability `p` (all of them when
/// `p >= 1`), drawing from ChaCha8 seeded with `seed` in vertex order.
pub fn sample_vertices(n: usize, p: f64, seed: u64) -> Vec<usize> {
    if p >= 1.0 {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).filter(|_| rng.gen::<f64>() < p).collect()
}

/// While the surviving set holds an independent set of size `t`, delete its
/// vertex of largest degree in the surviving graph (smallest index on ties).
pub fn delete_independent_sets(g: &Graph, mut alive: Vec<usize>, t: usize, budget: u64) -> Deletion {
    let sample = alive.clone();
    let mut trace = Vec::new();
    loop {
        let h = g.induced(&alive);
        match find_independent_set(&h, t, budget) {
            SearchOutcome::Found(set) => {
                let victim = *set
                    .iter()
                    .max_by_key(|&&i| (h.degree(i), std::cmp::Reverse(i)))
                    .expect("t >= 1");
                trace.push(alive.remove(victim));
            }
            SearchOutcome::Absent { .. } => return Deletion { sample, trace, survivors: alive, complete: true },
            SearchOutcome::Undecided { .. } => {
                return Deletion { sample, trace, survivors: alive, complete: false }
            }
        }
    }
}

/// Exact re-checks run on a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    /// `None` when undecided within the budget.
    pub pattern_free: Option<bool>,
    pub alpha_less_than_t: Option<bool>,
    /// Exact independence number of the witness graph, when decided.
    pub alpha: Option<usize>,
}

impl Verification {
    pub fn status(&self) -> Status {
        match (self.pattern_free, self.alpha_less_than_t) {
            (Some(true), Some(true)) => Status::Valid,
            (Some(false), _) | (_, Some(false)) => Status::Invalid,
            _ => Status::Unverified,
        }
    }
}

pub fn verify_witness(g: &Graph, witness: &[usize], pattern: ForbiddenPattern, t: usize, budget: u64) -> Verification {
    let w = g.induced(witness);
    let pattern_free = is_pattern_free(&w, pattern, budget).is_free();
    let alpha = independence_number(&w, budget);
    let (alpha, alpha_less_than_t) = if alpha.exact {
        (Some(alpha.lower()), Some(alpha.lower() < t))
    } else if alpha.upper < t {
        (None, Some(true))
    } else if alpha.lower() >= t {
        (None, Some(false))
    } else {
        (None, None)
    };
    Verification { pattern_free, alpha_less_than_t, alpha }
}

/// A replayable witness for `r(F, t) > witnessCount`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RamseyCertificate {
    pub family: String,
    /// Family parameters plus the sampling probability `p`.
    pub params: BTreeMap<String, Value>,
    pub pattern: ForbiddenPattern,
    pub t: usize,
    pub witness_count: usize,
    pub seed: u64,
    pub deletion_trace: Vec<usize>,
    pub valid: bool,
    pub tool_version: String,
    pub status: Status,
    pub claim: String,
    pub witness: Vec<usize>,
    pub verification: Verification,
}

impl RamseyCertificate {
    pub fn probability(&self) -> Result<f64> {
        self.params
            .get("p")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Parse("params.p missing".into()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Samples, deletes and checks; the graph must be `F`-free.
pub fn sample_and_delete(
    family: Family,
    pattern: ForbiddenPattern,
    t: usize,
    p: f64,
    seed: u64,
    budget: u64,
) -> Result<RamseyCertificate> {
    let g = family.build()?;
    certify_graph(&g, family, pattern, t, p, seed, budget)
}

fn certify_graph(
    g: &Graph,
    family: Family,
    pattern: ForbiddenPattern,
    t: usize,
    p: f64,
    seed: u64,
    budget: u64,
) -> Result<RamseyCertificate> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} is not in (0, 1]")));
    }
    if let PatternCheck::Found(w) = is_pattern_free(g, pattern, budget) {
        return Err(Error::InvalidParameter(format!("the {} graph contains {pattern}: {w:?}", family.name())));
    }
    let del = delete_independent_sets(g, sample_vertices(g.n(), p, seed), t, budget);
    let verification = if del.complete {
        verify_witness(g, &del.survivors, pattern, t, budget)
    } else {
        Verification { pattern_free: None, alpha_less_than_t: None, alpha: None }
    };
    let status = verification.status();
    let mut params = family.params();
    params.insert("p".into(), p.into());
    Ok(RamseyCertificate {
        family: family.name().into(),
        params,
        pattern,
        t,
        witness_count: del.survivors.len(),
        seed,
        deletion_trace: del.trace,
        valid: status == Status::Valid,
        tool_version: TOOL_VERSION.into(),
        status,
        claim: format!("r({pattern}, {t}) > {}", del.survivors.len()),
        witness: del.survivors,
        verification,
    })
}

/// Result of replaying a certificate.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub status: Status,
    pub claim: String,
    /// The witness rebuilt from family, seed and deletion trace.
    pub witness_count: usize,
    pub witness_matches: bool,
    /// Rerunning the whole procedure gives the identical certificate.
    pub bit_exact: bool,
    pub verification: Verification,
    pub problems: Vec<String>,
}

/// Rebuilds the witness from the certificate's own data and re-runs both
/// exact checks, independently of the stored verdict.
pub fn verify(cert: &RamseyCertificate, budget: u64) -> Result<VerifyReport> {
    let family = Family::from_parts(&cert.family, &cert.params)?;
    let p = cert.probability()?;
    let g = family.build()?;
    let mut problems = Vec::new();

    let mut alive = sample_vertices(g.n(), p, cert.seed);
    for &v in &cert.deletion_trace {
        match alive.binary_search(&v) {
            Ok(i) => {
                alive.remove(i);
            }
            Err(_) => problems.push(format!("trace deletes vertex {v}, which is not present")),
        }
    }
    let witness_matches = alive == cert.witness && alive.len() == cert.witness_count;
    if !witness_matches {
        problems.push(format!(
            "witness does not match the replay ({} stored, {} rebuilt)",
            cert.witness.len(),
            alive.len()
        ));
    }
    let verification = verify_witness(&g, &alive, cert.pattern, cert.t, budget);
    let rerun = certify_graph(&g, family, cert.pattern, cert.t, p, cert.seed, budget);
    let bit_exact = match &rerun {
        Ok(c) => c.to_json() == cert.to_json(),
        Err(e) => {
            problems.push(format!("rerun failed: {e}"));
            false
        }
    };
    if !bit_exact {
        problems.push("rerun does not reproduce the certificate".into());
    }
    let mut status = verification.status();
    if status == Status::Valid && !(witness_matches && bit_exact) {
        status = Status::Invalid;
    }
    if verification.pattern_free == Some(false) {
        problems.push("witness graph contains the pattern".into());
    }
    if verification.alpha_less_than_t == Some(false) {
        problems.push(format!("witness has an independent set of size {}", cert.t));
    }
    Ok(VerifyReport {
        status,
        claim: format!("r({}, {}) > {}", cert.pattern, cert.t, alive.len()),
        witness_count: alive.len(),
        witness_matches,
        bit_exact,
        verification,
        problems,
    })
}

/// Strong-freeness verdict as reported by the pipeline.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StrongSummary {
    pub status: String,
    pub copies: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Vec<usize>>,
}

impl From<StrongCheck> for StrongSummary {
    fn from(c: StrongCheck) -> Self {
        match c {
            StrongCheck::Strong { copies } => StrongSummary { status: "strong".into(), copies, violation: None },
            StrongCheck::Violation(v) => StrongSummary { status: "violation".into(), copies: 0, violation: Some(v) },
            StrongCheck::Undecided { copies } => StrongSummary { status: "undecided".into(), copies, violation: None },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialSummary {
    pub trial: u64,
    pub trial_seed: u64,
    pub edges: usize,
    pub status: Status,
    pub witness_count: usize,
    pub alpha: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnitalPipeline {
    pub q: u32,
    pub params: TransferParams,
    pub t: usize,
    pub strong: StrongSummary,
    pub trials: Vec<TrialSummary>,
    pub best: RamseyCertificate,
}

/// Largest `q` handled by the unital pipeline.
pub const MAX_PIPELINE_Q: u32 = 4;

/// Unital line hypergraph, strong `K4`-freeness, `trials` colourings, and
/// the certificate with the largest witness (smallest trial seed on ties).
pub fn pipeline_unital(q: u32, trials: u64, seed: u64, t: Option<usize>, budget: u64) -> Result<UnitalPipeline> {
    if !(2..=MAX_PIPELINE_Q).contains(&q) {
        return Err(Error::InvalidParameter(format!("unital pipeline supports q in 2..={MAX_PIPELINE_Q}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let h = unital_line_hypergraph(q)?;
    let params = derive_transfer_params(&h)?;
    let t = t.unwrap_or_else(|| t_transfer(params.n as u64, params.r as u64, params.d as u64) as usize);
    let k4 = ForbiddenPattern::Clique(4);
    let strong = StrongSummary::from(is_strongly_pattern_free(&h, k4, budget));
    let certs: Vec<RamseyCertificate> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let family = Family::UnitalTransfer { q, trial, master_seed: seed };
            sample_and_delete(family, k4, t, 1.0, seed, budget)
        })
        .collect::<Result<_>>()?;
    let summaries = certs
        .iter()
        .enumerate()
        .map(|(i, c)| TrialSummary {
            trial: i as u64,
            trial_seed: trial_seed(seed, i as u64),
            edges: 0,
            status: c.status,
            witness_count: c.witness_count,
            alpha: c.verification.alpha,
        })
        .collect::<Vec<_>>();
    let best_index = (0..certs.len())
        .filter(|&i| certs[i].valid)
        .max_by_key(|&i| (certs[i].witness_count, std::cmp::Reverse(trial_seed(seed, i as u64))))
        .unwrap_or(0);
    let mut trials_out = summaries;
    for (i, s) in trials_out.iter_mut().enumerate() {
        s.edges = Family::UnitalTransfer { q, trial: i as u64, master_seed: seed }.build()?.edge_count();
    }
    Ok(UnitalPipeline { q, params, t, strong, trials: trials_out, best: certs[best_index].clone() })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Gate {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Arithmetic only: inputs, the derived `t`, the bound expression and the
/// gates the asymptotic statements need.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FormulaReport {
    pub inputs: BTreeMap<String, f64>,
    pub t: u64,
    pub lower_bound: f64,
    pub gates: Vec<Gate>,
    pub derived: BTreeMap<String, f64>,
}

/// `n (ln n)^2 / (8 e^2 λ)`, the gate `4 e^2 λ >= (ln n)^2`, and the ratio
/// `d / (λ^{1/(s-1)} n^{1 - 1/(s-1)})`.
pub fn report_rst(n: u64, d: u64, lambda: f64, s: u32) -> Result<FormulaReport> {
    if n < 3 || d == 0 || lambda <= 0.0 || s < 2 {
        return Err(Error::InvalidParameter("need n >= 3, d >= 1, lambda > 0, s >= 2".into()));
    }
    let nf = n as f64;
    let ln2 = nf.ln().powi(2);
    let e = 1.0 / (s - 1) as f64;
    let inputs = BTreeMap::from([
        ("n".to_string(), nf),
        ("d".to_string(), d as f64),
        ("lambda".to_string(), lambda),
        ("s".to_string(), s as f64),
    ]);
    let derived = BTreeMap::from([("ssvRatio".to_string(), d as f64 / (lambda.powf(e) * nf.powf(1.0 - e)))]);
    let gate = Gate {
        name: "4e^2 lambda >= (ln n)^2".into(),
        lhs: 4.0 * E * E * lambda,
        rhs: ln2,
        holds: 4.0 * E * E * lambda >= ln2 * (1.0 - 1e-12),
    };
    Ok(FormulaReport {
        inputs,
        t: t_pseudo(n, d),
        lower_bound: nf * ln2 / (8.0 * E * E * lambda),
        gates: vec![gate],
        derived,
    })
}

/// `t = ceil(256 n (ln n)^2 / rd)`, the shape `r t / ln n` (and
/// `r t / (ln n)^2`), and the gate `r >= 2048 (ln n)^3`.
pub fn report_transfer(n: u64, r: u64, d: u64) -> Result<FormulaReport> {
    if n < 2 || r == 0 || d == 0 {
        return Err(Error::InvalidParameter("need n >= 2, r, d >= 1".into()));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let t = t_transfer(n, r, d);
    let inputs = BTreeMap::from([("n".to_string(), nf), ("r".to_string(), r as f64), ("d".to_string(), d as f64)]);
    let derived = BTreeMap::from([("rtOverLogSquared".to_string(), r as f64 * t as f64 / (ln * ln))]);
    let gate = Gate {
        name: "r >= 2048 (ln n)^3".into(),
        lhs: r as f64,
        rhs: 2048.0 * ln.powi(3),
        holds: r as f64 >= 2048.0 * ln.powi(3),
    };
    Ok(FormulaReport { inputs, t, lower_bound: r as f64 * t as f64 / ln, gates: vec![gate], derived })
}
