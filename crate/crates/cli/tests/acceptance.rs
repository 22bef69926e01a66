//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ramseyforge::certify::RamseyCertificate;
use ramseyforge::containers::{
    check_pseudorandom, count_bound, exact_params, fingerprint, reconstruct, CheckMode, FingerprintRule,
};
use ramseyforge::geometry::{bip_construct, er_polarity, unital_line_hypergraph, BipAdjacency};
use ramseyforge::graph::families::{complete_bipartite, cycle, petersen, random_gnp};
use ramseyforge::graph::{
    enumerate_independent_sets, independence_number, is_pattern_free, is_strongly_pattern_free, shadow_graph,
    PatternCheck, StrongCheck, DEFAULT_BUDGET, DEFAULT_ENUMERATION_LIMIT,
};
use ramseyforge::spectral::{
    alon_boppana_check, hoffman_bound, spectrum, spectrum_with_diagonal, trace_check,
};
use ramseyforge::transfer::{
    bichromatic_subgraph, concentration_check, random_coloring, run_trials, TrialOptions,
};
use ramseyforge::{ForbiddenPattern, Graph, Spectrum};

const POLARITY_QS: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];
const SPECTRUM_TOL: f64 = 1e-6;
const POWER2_TOL: f64 = 1e-6;
const POWER3_TOL: f64 = 1e-5;
const KEPT_WINDOW: (f64, f64) = (0.4, 0.6);
const KEPT_MEAN_TOL: f64 = 0.05;
const HOFFMAN_TOL: f64 = 1e-9;
const LIMIT_1: Duration = Duration::from_secs(30);
const LIMIT_2: Duration = Duration::from_secs(60);
const LIMIT_3: Duration = Duration::from_secs(120);
const LIMIT_6: Duration = Duration::from_secs(120);
const LIMIT_7: Duration = Duration::from_secs(30);
/// Node budget for the exact α used against the Hoffman bound.
const HOFFMAN_ALPHA_BUDGET: u64 = 20_000_000;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn run(id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let took = start.elapsed();
    if let Some(limit) = limit {
        out.require(took < limit, || format!("took {took:.1?}, limit {limit:?}"));
    }
    let pass = out.failures.is_empty();
    println!("criterion {id} {} {title} ({:.2}s)", if pass { "PASS" } else { "FAIL" }, took.as_secs_f64());
    for n in &out.notes {
        println!("    info: {n}");
    }
    for f in out.failures.iter().take(20) {
        println!("    fail: {f}");
    }
    if out.failures.len() > 20 {
        println!("    fail: ... {} more", out.failures.len() - 20);
    }
    pass
}

fn polarity(out: &mut Outcome) {
    for q in POLARITY_QS {
        let er = er_polarity(q).unwrap();
        let g = &er.graph;
        let n = (q * q + q + 1) as usize;
        out.require(g.n() == n, || format!("q={q}: n={} expected {n}", g.n()));
        let low = g.degrees().iter().filter(|&&d| d == q as usize).count();
        let high = g.degrees().iter().filter(|&&d| d == q as usize + 1).count();
        out.require(low == q as usize + 1 && low + high == n, || {
            format!("q={q}: {low} vertices of degree q, {high} of degree q+1")
        });
        out.require(is_pattern_free(g, ForbiddenPattern::C4, DEFAULT_BUDGET) == PatternCheck::Free, || {
            format!("q={q}: not C4-free")
        });
        let looped: Spectrum = spectrum_with_diagonal(g, &er.absolute).unwrap();
        let root = (q as f64).sqrt();
        let top = looped.eigenvalues[0];
        out.require((top - (q + 1) as f64).abs() < SPECTRUM_TOL, || format!("q={q}: top eigenvalue {top}"));
        let worst = looped.eigenvalues[1..]
            .iter()
            .map(|x| (x.abs() - root).abs())
            .fold(0.0f64, f64::max);
        out.require(worst < SPECTRUM_TOL, || format!("q={q}: nontrivial eigenvalue off ±√q by {worst:e}"));
        if q == 7 {
            let plain: Spectrum = spectrum(g).unwrap();
            out.note(format!(
                "polarity matrix (loops at the {} absolute points): nontrivial |λ| = √q; loopless ER_7 has λ = {:.4} vs √7 = {:.4}",
                er.absolute.len(),
                plain.lambda,
                root
            ));
        }
    }
}

fn unital(out: &mut Outcome) {
    for q in [2u32, 3, 4] {
        let h = unital_line_hypergraph(q).unwrap();
        let (q2, n) = ((q * q) as usize, (q * q * (q * q - q + 1)) as usize);
        out.require(h.n() == n, || format!("q={q}: n={} expected {n}", h.n()));
        out.require(h.uniformity() == q2 && h.edges().iter().all(|e| e.len() == q2), || {
            format!("q={q}: uniformity {}", h.uniformity())
        });
        out.require(h.regular_degree() == Some(q as usize + 1), || format!("q={q}: degrees not q+1"));
        let mut worst = 0;
        for (i, e) in h.edges().iter().enumerate() {
            for f in &h.edges()[i + 1..] {
                worst = worst.max(e.iter().filter(|v| f.binary_search(v).is_ok()).count());
            }
        }
        out.require(worst <= 1, || format!("q={q}: two hyperedges share {worst} vertices"));
        if q <= 3 {
            match is_strongly_pattern_free(&h, ForbiddenPattern::Clique(4), u64::MAX) {
                StrongCheck::Strong { copies } => out.note(format!("q={q}: strongly K4-free, {copies} K4 copies in the shadow")),
                other => out.require(false, || format!("q={q}: strong K4 check gave {other:?}")),
            }
        }
    }
}

fn transference(out: &mut Outcome) {
    let h = unital_line_hypergraph(3).unwrap();
    let opts = TrialOptions { pattern: Some(ForbiddenPattern::Clique(4)), budget: DEFAULT_BUDGET, ..Default::default() };
    let records = run_trials(&h, 100, 20260101, &opts).unwrap();
    for r in &records {
        out.require(r.pattern_free == Some(true), || format!("trial {}: K4 check {:?} {:?}", r.trial, r.pattern_free, r.witness));
        out.require(r.kept_fraction >= KEPT_WINDOW.0 && r.kept_fraction <= KEPT_WINDOW.1, || {
            format!("trial {}: kept fraction {}", r.trial, r.kept_fraction)
        });
    }
    let rep = concentration_check(&h, &records, true);
    let rel = (rep.mean_kept_per_edge - rep.expected_kept_per_edge).abs() / rep.expected_kept_per_edge;
    out.require(rel <= KEPT_MEAN_TOL, || {
        format!("mean kept per edge {} vs {}", rep.mean_kept_per_edge, rep.expected_kept_per_edge)
    });
    out.require(rep.expected_kept_per_edge == 18.0, || "C(9,2)/2 should be 18".into());
    out.note(format!(
        "100 trials, kept fraction in [{:.3}, {:.3}], mean kept pairs per hyperedge {:.3} (target 18), {} sampled pseudorandomness misses",
        rep.min_fraction, rep.max_fraction, rep.mean_kept_per_edge, rep.pseudorandom_failures
    ));
}

fn containers(out: &mut Outcome) {
    let mut instances = 0u64;
    let mut sets_checked = 0u64;
    let mut literal_violations = 0u64;
    for i in 0..200u64 {
        let n = 8 + (i % 13) as usize;
        let p = [0.35, 0.5, 0.65, 0.8][(i % 4) as usize];
        let g = random_gnp(n, p, 7_000 + i);
        let alpha_g = independence_number(&g, DEFAULT_BUDGET).value().unwrap();
        for m in 2..n {
            let params = exact_params(&g, m).unwrap();
            let checked = check_pseudorandom(&g, &params, CheckMode::Exhaustive).unwrap();
            out.require(checked.ok, || format!("graph {i}, m={m}: exact params rejected"));
            let Some(s_min) = params.min_s(n) else { continue };
            for t in s_min.max(1)..=m.min(alpha_g) {
                let mut sets = Vec::new();
                let mut visit = |s: &[usize]| sets.push(s.to_vec());
                let count = enumerate_independent_sets(&g, t, DEFAULT_ENUMERATION_LIMIT, Some(&mut visit)).unwrap();
                for s in s_min.max(1)..=t {
                    instances += 1;
                    let bound = count_bound(n, m, s, t).unwrap();
                    out.require(bound >= count.into(), || format!("graph {i}: count {count} > bound {bound} (m={m} s={s} t={t})"));
                    for set in &sets {
                        sets_checked += 1;
                        let fp = fingerprint(&g, set, s, m, FingerprintRule::Pruning).unwrap();
                        out.require(fp.within(m) && fp.vertices.len() <= s, || {
                            format!("graph {i}: remainder {} > m={m} (s={s}, I={set:?})", fp.remainder.len())
                        });
                        let rest: Vec<usize> =
                            set.iter().copied().filter(|v| fp.remainder.binary_search(v).is_ok()).collect();
                        let back = reconstruct(&g, &fp.vertices, &rest, s, m, FingerprintRule::Pruning);
                        out.require(back.as_ref().is_ok_and(|b| b == set), || format!("graph {i}: I={set:?} not reconstructed"));
                        let lit = fingerprint(&g, set, s, m, FingerprintRule::ClosedNeighborhood).unwrap();
                        literal_violations += !lit.within(m) as u64;
                    }
                }
            }
        }
    }
    out.require(instances > 0, || "no admissible (s,t) instances".into());
    out.note(format!("{instances} (graph, m, s, t) instances, {sets_checked} fingerprints; pruning rule: 0 allowed violations"));
    out.note(format!("literal closed-neighbourhood rule exceeded m on {literal_violations} fingerprints (informational)"));
}

fn constructed_graphs() -> Vec<(String, Graph)> {
    let mut v: Vec<(String, Graph)> = Vec::new();
    for q in POLARITY_QS {
        v.push((format!("ER_{q}"), er_polarity(q).unwrap().graph));
    }
    for (q, s) in [(3, 1), (5, 1), (7, 1), (5, 2), (7, 2), (9, 2), (11, 2), (13, 2), (3, 3), (5, 3), (7, 3)] {
        for rule in [BipAdjacency::Character, BipAdjacency::Orthogonal] {
            v.push((format!("Γ[{q},{s}] {rule}"), bip_construct(q, s, rule).unwrap().graph));
        }
    }
    for q in [2u32, 3, 4] {
        let h = unital_line_hypergraph(q).unwrap();
        v.push((format!("shadow unital q={q}"), shadow_graph(&h)));
        for seed in 0..3 {
            v.push((format!("bichromatic unital q={q} seed={seed}"), bichromatic_subgraph(&h, &random_coloring(&h, seed)).unwrap()));
        }
    }
    v.push(("K_{6,6}".into(), complete_bipartite(6, 6)));
    v.push(("Petersen".into(), petersen()));
    v.push(("C_9".into(), cycle(9)));
    v
}

fn spectral(out: &mut Outcome) {
    let mut regular = 0;
    let mut decided = 0;
    for (name, g) in constructed_graphs() {
        if g.n() > 500 {
            continue;
        }
        let r: Spectrum = spectrum(&g).unwrap();
        let tri = g.triangle_count();
        let [s1, s2, s3] = r.power_sums();
        let (n, e) = (g.n() as f64, g.edge_count() as f64);
        out.require(s1.abs() <= POWER2_TOL * n.max(1.0), || format!("{name}: Σλ = {s1}"));
        out.require((s2 - 2.0 * e).abs() <= POWER2_TOL * e.max(1.0), || format!("{name}: Σλ² = {s2} vs {}", 2.0 * e));
        out.require((s3 - 6.0 * tri as f64).abs() <= POWER3_TOL * n, || format!("{name}: Σλ³ = {s3} vs {}", 6 * tri));
        out.require(trace_check(&r, tri).ok, || format!("{name}: trace check failed"));
        if !r.is_regular || g.edge_count() == 0 {
            continue;
        }
        regular += 1;
        for k in 1..=10 {
            let ab = alon_boppana_check(&r, k).unwrap();
            out.require(ab.holds, || format!("{name}: Alon–Boppana fails at k={k}: {} < {}", ab.lhs, ab.rhs));
        }
        let h = hoffman_bound(&r).unwrap();
        let a = independence_number(&g, HOFFMAN_ALPHA_BUDGET);
        out.require(h + HOFFMAN_TOL >= a.lower() as f64, || format!("{name}: Hoffman {h} < α ≥ {}", a.lower()));
        if a.exact {
            decided += 1;
        } else {
            out.note(format!("{name}: α undecided within budget, α ∈ [{}, {}], Hoffman {h:.3}", a.lower(), a.upper));
        }
        if name == "K_{6,6}" || name == "Petersen" {
            out.require(a.exact && (h - a.lower() as f64).abs() < HOFFMAN_TOL, || format!("{name}: Hoffman {h} ≠ α {}", a.lower()));
        }
    }
    out.note(format!("{regular} regular instances, exact α decided on {decided}"));
}

fn gamma(out: &mut Outcome) {
    let cases: Vec<(u32, usize, ForbiddenPattern)> = [3u32, 5, 7, 9, 11, 13]
        .iter()
        .map(|&q| (q, 1, ForbiddenPattern::Clique(2)))
        .chain([5u32, 7, 9, 11, 13].iter().map(|&q| (q, 2, ForbiddenPattern::triangle())))
        .chain([3u32, 5, 7].iter().map(|&q| (q, 3, ForbiddenPattern::Clique(4))))
        .collect();
    let mut character_failures = Vec::new();
    for (q, s, pattern) in cases {
        for rule in [BipAdjacency::Character, BipAdjacency::Orthogonal] {
            let b = bip_construct(q, s, rule).unwrap();
            let free = if s == 1 {
                Some(b.graph.edge_count() == 0)
            } else {
                is_pattern_free(&b.graph, pattern, DEFAULT_BUDGET).is_free()
            };
            match (rule, free) {
                (BipAdjacency::Orthogonal, Some(true)) => {}
                (BipAdjacency::Orthogonal, other) => {
                    out.require(false, || format!("Γ[{q},{s}] orthogonal rule: free = {other:?} ({} vertices)", b.graph.n()))
                }
                (BipAdjacency::Character, Some(true)) => {}
                (BipAdjacency::Character, other) => character_failures.push(format!("({q},{s}):{other:?}")),
            }
        }
    }
    if !character_failures.is_empty() {
        out.note(format!(
            "literal χ(Q(x,y)) = 1 rule on canonical representatives is not {{edgeless, K3-free, K4-free}} at {} (representative-normalization question)",
            character_failures.join(" ")
        ));
    }
    out.note("orthogonal rule Q(x,y) = 0 checked on every case");
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ramseyforge")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn exec(args: &[&str]) -> (i32, String) {
    let o = Command::new(bin()).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn certificates(out: &mut Outcome) {
    let dir = scratch("certificates");
    let cert_path = dir.join("er7.json");
    let cert_s = cert_path.to_str().unwrap();
    let (code, _) = exec(&["certify", "--family", "er", "--q", "7", "--pattern", "c4", "--p", "1", "--out", cert_s]);
    out.require(code == 0, || format!("certify exited {code}"));
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let cert: RamseyCertificate = serde_json::from_str(&text).unwrap();
    let alpha = independence_number(&er_polarity(7).unwrap().graph, DEFAULT_BUDGET).value().unwrap();
    out.require(cert.valid && cert.witness_count == 57 && cert.t == alpha + 1, || {
        format!("certificate: valid={} N={} t={} (α={alpha})", cert.valid, cert.witness_count, cert.t)
    });
    out.require(cert.claim == format!("r(c4, {}) > 57", alpha + 1), || format!("claim {}", cert.claim));

    let (code, report) = exec(&["verify", "--cert", cert_s]);
    let report: serde_json::Value = serde_json::from_str(&report).unwrap_or_default();
    out.require(code == 0 && report["status"] == "VALID" && report["bitExact"] == true, || format!("verify exited {code}: {report}"));

    let mut bad: serde_json::Value = serde_json::from_str(&text).unwrap();
    bad["witness"].as_array_mut().unwrap().push(57.into());
    bad["witnessCount"] = 58.into();
    let bad_path = dir.join("mutated.json");
    std::fs::write(&bad_path, serde_json::to_string_pretty(&bad).unwrap()).unwrap();
    let (code, _) = exec(&["verify", "--cert", bad_path.to_str().unwrap()]);
    out.require(code == 1, || format!("mutated certificate: verify exited {code}"));

    let tight_path = dir.join("tight.json");
    let t = alpha.to_string();
    let (code, _) = exec(&["certify", "--family", "er", "--q", "7", "--pattern", "c4", "--p", "1", "--t", &t, "--out", tight_path.to_str().unwrap()]);
    out.require(code == 0, || format!("certify at t=α exited {code}"));
    let mut tight: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&tight_path).unwrap()).unwrap();
    let deleted = tight["deletionTrace"][0].clone();
    tight["witness"].as_array_mut().unwrap().push(deleted);
    tight["witnessCount"] = (tight["witnessCount"].as_u64().unwrap() + 1).into();
    std::fs::write(&tight_path, serde_json::to_string_pretty(&tight).unwrap()).unwrap();
    let (code, _) = exec(&["verify", "--cert", tight_path.to_str().unwrap()]);
    out.require(code == 1, || format!("certificate with a deleted vertex restored: verify exited {code}"));
    out.note(format!("α(ER_7) = {alpha}, claim {}", cert.claim));
}

fn determinism(out: &mut Outcome) {
    let base = scratch("determinism");
    let hyp = base.join("unital3.txt");
    let er9 = base.join("er9.txt");
    let er3 = base.join("er3.txt");
    exec(&["construct", "unital-hypergraph", "--q", "3", "--out", hyp.to_str().unwrap()]);
    exec(&["construct", "er", "--q", "9", "--out", er9.to_str().unwrap()]);
    exec(&["construct", "er", "--q", "3", "--out", er3.to_str().unwrap()]);
    let jobs: Vec<(&str, Vec<String>, &[&str])> = vec![
        ("transfer.jsonl", vec!["transfer", "--in", hyp.to_str().unwrap(), "--pattern", "k4", "--trials", "24", "--seed", "42"].into_iter().map(String::from).collect(), &[]),
        ("pipeline.json", vec!["certify", "--family", "unital-transfer", "--q", "3", "--trials", "6", "--t", "12", "--seed", "42"].into_iter().map(String::from).collect(), &[".pipeline.json"]),
        ("er9.json", vec!["certify", "--family", "er", "--q", "9", "--pattern", "c4", "--seed", "11"].into_iter().map(String::from).collect(), &[]),
        ("spectrum.json", vec!["spectrum", "--in", er9.to_str().unwrap(), "--with-loops", "--eigenvalues"].into_iter().map(String::from).collect(), &[]),
        ("containers.json", vec!["containers", "check", "--in", er3.to_str().unwrap(), "--alpha", "1/6", "--m", "8", "--seed", "5"].into_iter().map(String::from).collect(), &[]),
    ];
    for (file, args, extras) in jobs {
        let mut reference: Option<Vec<Vec<u8>>> = None;
        for threads in ["1", "4", "8"] {
            let dir = base.join(format!("t{threads}"));
            std::fs::create_dir_all(&dir).unwrap();
            let target = dir.join(file);
            let mut full: Vec<String> = args.clone();
            full.extend(["--threads".into(), threads.into(), "--out".into(), target.to_str().unwrap().into()]);
            let refs: Vec<&str> = full.iter().map(String::as_str).collect();
            let (code, _) = exec(&refs);
            out.require(code == 0 || code == 1, || format!("{file} with {threads} threads exited {code}"));
            let mut bytes = vec![std::fs::read(&target).unwrap_or_default()];
            for suffix in extras {
                bytes.push(std::fs::read(format!("{}{suffix}", target.display())).unwrap_or_default());
            }
            out.require(bytes.iter().all(|b| !b.is_empty()), || format!("{file}: empty output with {threads} threads"));
            match &reference {
                None => reference = Some(bytes),
                Some(r) => out.require(*r == bytes, || format!("{file}: output differs between 1 and {threads} threads")),
            }
        }
    }
    out.note("transfer, unital pipeline, ER_9 certificate, spectrum and containers outputs compared byte-for-byte");
}

fn main() {
    let results = [
        run(1, "polarity graphs: size, degrees, C4-free, spectrum ±√q", Some(LIMIT_1), polarity),
        run(2, "Hermitian unital line hypergraphs and strong K4-freeness", Some(LIMIT_2), unital),
        run(3, "transference soundness at q=3 over 100 trials", Some(LIMIT_3), transference),
        run(4, "container count bound, fingerprints and reconstruction", None, containers),
        run(5, "spectral identities, Alon–Boppana and Hoffman", None, spectral),
        run(6, "Γ[q,s] clique-freeness", Some(LIMIT_6), gamma),
        run(7, "ER_7 C4 certificate, replay and mutation", Some(LIMIT_7), certificates),
        run(8, "determinism across 1, 4 and 8 threads", None, determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
