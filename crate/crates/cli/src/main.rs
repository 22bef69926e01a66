use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ramseyforge::certify::{
    default_probability, pipeline_unital, sample_and_delete, verify, Family, RamseyCertificate, Status,
};
use ramseyforge::containers::{
    check_pseudorandom, count_bound, count_bound_ndl, mixing_params, CheckMode, PseudorandomParams, Provenance,
    MAX_EXHAUSTIVE_N,
};
use ramseyforge::geometry::{bip_construct, er_polarity, unital_line_hypergraph, BipAdjacency};
use ramseyforge::gf::{builtin_fields, FieldInfo};
use ramseyforge::graph::{
    independence_number, is_pattern_free, is_strongly_pattern_free, PatternCheck, StrongCheck, DEFAULT_BUDGET,
};
use ramseyforge::io::{read_graph, read_hypergraph, write_graph, write_hypergraph, GraphHeader, HypergraphHeader};
use ramseyforge::spectral::{
    alon_boppana_check, hoffman_bound, spectrum, spectrum_with_diagonal, trace_check, triangle_trace_check,
};
use ramseyforge::transfer::{concentration_check, run_trials, trial_seed, TrialOptions};
use ramseyforge::{ForbiddenPattern, Graph, Spectrum};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ramseyforge", version, about = "Finite-geometry Ramsey constructions and certificates")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Search-node budget for exact solvers.
    #[arg(long, global = true, env = "RAMSEYFORGE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output file; the run manifest goes next to it as `<out>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Built-in finite fields.
    Fields {
        #[command(subcommand)]
        command: FieldsCommand,
    },
    /// Build a graph or hypergraph.
    Construct {
        #[command(subcommand)]
        family: ConstructCommand,
    },
    /// Exact forbidden-pattern check.
    Check(CheckArgs),
    /// Full spectrum and spectral certificates.
    Spectrum(SpectrumArgs),
    /// Pseudorandomness checks and container counts.
    Containers {
        #[command(subcommand)]
        command: ContainersCommand,
    },
    /// Random per-edge colourings of a hypergraph.
    Transfer(TransferArgs),
    /// Sample-and-delete Ramsey certificate.
    Certify(CertifyArgs),
    /// Replay and re-check a certificate.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum FieldsCommand {
    List,
}

#[derive(Subcommand, Debug)]
enum ConstructCommand {
    /// Orthogonal-polarity graph of PG(2, q).
    Er {
        #[arg(long)]
        q: u32,
    },
    /// Line hypergraph of the Hermitian unital over GF(q²).
    UnitalHypergraph {
        #[arg(long)]
        q: u32,
    },
    /// Γ[q,s].
    Bip {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "character")]
        adjacency: String,
    },
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    pattern: ForbiddenPattern,
    #[arg(long = "in")]
    input: PathBuf,
    /// Treat the input as a hypergraph and test strong freeness.
    #[arg(long)]
    strong: bool,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Put ones on the diagonal at the header's absolute points.
    #[arg(long)]
    with_loops: bool,
    /// Include the full eigenvalue list.
    #[arg(long)]
    eigenvalues: bool,
}

#[derive(Subcommand, Debug)]
enum ContainersCommand {
    /// Check `e(X) >= alpha C(|X|,2)` for `|X| >= m`.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Rational such as `2/7`; defaults to the spectral (mixing) value.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        exhaustive: bool,
        /// Random subsets per size class in sampled mode.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// `C(n,s) C(m,t-s)`.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// `(4e² λ / ln² n)^t` with its precondition.
    Ndl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    pattern: Option<ForbiddenPattern>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    Er,
    Bip,
    UnitalTransfer,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value = "character")]
    adjacency: String,
    #[arg(long)]
    pattern: Option<ForbiddenPattern>,
    /// Defaults to one more than the exact independence number of the graph.
    #[arg(long)]
    t: Option<usize>,
    /// Sampling probability; defaults to `min(1, ln² n / (4e² λ))`.
    #[arg(long)]
    p: Option<f64>,
    /// Colouring trial for `unital-transfer`.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Run this many colouring trials and keep the best certificate.
    #[arg(long, conflicts_with = "trial")]
    trials: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunManifest {
    argv: Vec<String>,
    tool_version: String,
    seed_chain: Vec<u64>,
    threads: Option<usize>,
    budget: u64,
    input_hashes: BTreeMap<String, String>,
    outputs: Vec<String>,
    exit_code: u8,
    wall_time_seconds: f64,
}

struct Run {
    budget: u64,
    seed: u64,
    seed_chain: Vec<u64>,
    inputs: BTreeMap<String, String>,
    out: Option<PathBuf>,
    outputs: Vec<String>,
}

impl Run {
    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), hex);
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn emit(&mut self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                self.outputs.push(path.display().to_string());
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(&text)
    }

    fn side_file(&mut self, suffix: &str, value: &impl Serialize) -> anyhow::Result<()> {
        if let Some(out) = &self.out {
            let path = PathBuf::from(format!("{}{suffix}", out.display()));
            fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
            self.outputs.push(path.display().to_string());
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let mut run = Run {
        budget: cli.budget,
        seed: cli.seed,
        seed_chain: vec![cli.seed],
        inputs: BTreeMap::new(),
        out: cli.out.clone(),
        outputs: Vec::new(),
    };
    let code = match dispatch(cli.command, &mut run) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    };
    let manifest = RunManifest {
        argv,
        tool_version: ramseyforge::certify::TOOL_VERSION.to_string(),
        seed_chain: run.seed_chain.clone(),
        threads: cli.threads,
        budget: run.budget,
        input_hashes: run.inputs.clone(),
        outputs: run.outputs.clone(),
        exit_code: code,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    match &cli.out {
        Some(out) => {
            let path = format!("{}.manifest.json", out.display());
            if let Err(e) = fs::write(&path, text + "\n") {
                eprintln!("error: writing {path}: {e}");
            }
        }
        None => eprintln!("{text}"),
    }
    ExitCode::from(code)
}

fn dispatch(command: Command, run: &mut Run) -> anyhow::Result<u8> {
    match command {
        Command::Fields { command: FieldsCommand::List } => {
            let rows: Vec<FieldInfo> = builtin_fields().iter().map(FieldInfo::from).collect();
            run.emit_json(&rows)?;
            Ok(EXIT_OK)
        }
        Command::Construct { family } => construct(family, run),
        Command::Check(args) => check(args, run),
        Command::Spectrum(args) => spectrum_cmd(args, run),
        Command::Containers { command } => containers(command, run),
        Command::Transfer(args) => transfer(args, run),
        Command::Certify(args) => certify(args, run),
        Command::Verify(args) => verify_cmd(args, run),
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn construct(family: ConstructCommand, run: &mut Run) -> anyhow::Result<u8> {
    match family {
        ConstructCommand::Er { q } => {
            let er = er_polarity(q)?;
            let mut header = GraphHeader::new("er", params(&[("q", q.into())]), &er.graph);
            header.absolute_points = Some(er.absolute.clone());
            run.emit(&write_graph(&header, &er.graph))?;
        }
        ConstructCommand::UnitalHypergraph { q } => {
            let h = unital_line_hypergraph(q)?;
            let header = HypergraphHeader::new("unital-hypergraph", params(&[("q", q.into())]), &h);
            run.emit(&write_hypergraph(&header, &h))?;
        }
        ConstructCommand::Bip { q, s, adjacency } => {
            let rule: BipAdjacency = adjacency.parse()?;
            let b = bip_construct(q, s, rule)?;
            let p = params(&[("q", q.into()), ("s", s.into()), ("adjacency", rule.to_string().into())]);
            run.emit(&write_graph(&GraphHeader::new("bip", p, &b.graph), &b.graph))?;
        }
    }
    Ok(EXIT_OK)
}

fn load_graph(run: &mut Run, path: &Path) -> anyhow::Result<(Option<GraphHeader>, Graph)> {
    let text = run.read(path)?;
    read_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check(args: CheckArgs, run: &mut Run) -> anyhow::Result<u8> {
    let pattern = args.pattern;
    if args.strong {
        let text = run.read(&args.input)?;
        let (_, h) = read_hypergraph(&text)?;
        let (value, code) = match is_strongly_pattern_free(&h, pattern, run.budget) {
            StrongCheck::Strong { copies } => {
                (json!({"pattern": pattern, "strong": true, "copies": copies}), EXIT_OK)
            }
            StrongCheck::Violation(w) => (json!({"pattern": pattern, "strong": false, "witness": w}), EXIT_FAIL),
            StrongCheck::Undecided { copies } => {
                (json!({"pattern": pattern, "strong": null, "copies": copies}), EXIT_UNDECIDED)
            }
        };
        run.emit_json(&value)?;
        return Ok(code);
    }
    let (_, g) = load_graph(run, &args.input)?;
    let (value, code) = match is_pattern_free(&g, pattern, run.budget) {
        PatternCheck::Free => (json!({"pattern": pattern, "free": true, "witness": []}), EXIT_OK),
        PatternCheck::Found(w) => (json!({"pattern": pattern, "free": false, "witness": w}), EXIT_FAIL),
        PatternCheck::Undecided { nodes } => {
            (json!({"pattern": pattern, "free": null, "witness": [], "nodes": nodes}), EXIT_UNDECIDED)
        }
    };
    run.emit_json(&value)?;
    Ok(code)
}

fn spectrum_cmd(args: SpectrumArgs, run: &mut Run) -> anyhow::Result<u8> {
    let (header, g) = load_graph(run, &args.input)?;
    let report: Spectrum = if args.with_loops {
        let absolute = header
            .and_then(|h| h.absolute_points)
            .ok_or_else(|| anyhow!("--with-loops needs a header listing absolutePoints"))?;
        spectrum_with_diagonal(&g, &absolute)?
    } else {
        spectrum(&g)?
    };
    let triangles = g.triangle_count();
    let traces = if report.loops == 0 {
        trace_check(&report, triangles)
    } else {
        trace_check(&spectrum::<f64>(&g)?, triangles)
    };
    let mut out = serde_json::Map::new();
    out.insert("n".into(), report.n.into());
    out.insert("loops".into(), report.loops.into());
    out.insert("regular".into(), report.is_regular.into());
    out.insert("d".into(), report.d.into());
    out.insert("lambda1".into(), report.lambda1().into());
    out.insert("lambda".into(), report.lambda.into());
    out.insert("lambdaMin".into(), report.lambda_min.into());
    out.insert("traceChecks".into(), serde_json::to_value(traces)?);
    out.insert("residuals".into(), serde_json::to_value(&report.residuals)?);
    if report.is_regular {
        out.insert("hoffman".into(), hoffman_bound(&report).ok().into());
        let ab: BTreeMap<String, bool> = (1..=10)
            .map(|k| Ok((k.to_string(), alon_boppana_check(&report, k)?.holds)))
            .collect::<ramseyforge::Result<_>>()?;
        out.insert("alonBoppana".into(), serde_json::to_value(ab)?);
        if triangles == 0 && report.loops == 0 {
            out.insert("triangleTrace".into(), serde_json::to_value(triangle_trace_check(&report, true)?)?);
        }
    } else {
        out.insert("hoffman".into(), Value::Null);
        out.insert("alonBoppana".into(), Value::Null);
    }
    if args.eigenvalues {
        out.insert("eigenvalues".into(), serde_json::to_value(&report.eigenvalues)?);
    }
    let ok = traces.ok;
    run.emit_json(&out)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn parse_ratio(text: &str) -> anyhow::Result<Ratio<u64>> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim().parse::<u64>()?, b.trim().parse::<u64>()?),
        None => (text.trim().parse::<u64>()?, 1),
    };
    if den == 0 || num > den {
        bail!("alpha must be a rational in [0, 1], got {text}");
    }
    Ok(Ratio::new(num, den))
}

fn containers(command: ContainersCommand, run: &mut Run) -> anyhow::Result<u8> {
    match command {
        ContainersCommand::Check { input, alpha, m, exhaustive, samples } => {
            let (_, g) = load_graph(run, &input)?;
            let params = match (alpha, m) {
                (Some(a), Some(m)) => PseudorandomParams::new(parse_ratio(&a)?, m, Provenance::ExactChecked)?,
                (None, None) => mixing_params(&spectrum::<f64>(&g)?)?,
                _ => bail!("give both --alpha and --m, or neither"),
            };
            if exhaustive && g.n() > MAX_EXHAUSTIVE_N {
                bail!("exhaustive mode supports n <= {MAX_EXHAUSTIVE_N}");
            }
            let mode = if exhaustive {
                CheckMode::Exhaustive
            } else {
                CheckMode::Sampled { per_size: samples, seed: run.seed }
            };
            let result = check_pseudorandom(&g, &params, mode)?;
            let code = if result.ok { EXIT_OK } else { EXIT_FAIL };
            run.emit_json(&json!({
                "alpha": params.alpha.to_string(),
                "m": params.m,
                "provenance": params.provenance,
                "mode": if exhaustive { "exhaustive" } else { "sampled" },
                "ok": result.ok,
                "violator": result.violator,
                "setsChecked": result.sets_checked,
            }))?;
            Ok(code)
        }
        ContainersCommand::Bound { n, m, s, t } => {
            let bound = count_bound(n, m, s, t)?;
            run.emit_json(&json!({"n": n, "m": m, "s": s, "t": t, "bound": bound.to_string()}))?;
            Ok(EXIT_OK)
        }
        ContainersCommand::Ndl { n, d, lambda, t } => {
            run.emit_json(&count_bound_ndl(n, d, lambda, t)?)?;
            Ok(EXIT_OK)
        }
    }
}

fn transfer(args: TransferArgs, run: &mut Run) -> anyhow::Result<u8> {
    let text = run.read(&args.input)?;
    let (_, h) = read_hypergraph(&text)?;
    let opts = TrialOptions { pattern: args.pattern, budget: run.budget, samples_per_size: args.samples };
    let records = run_trials(&h, args.trials, run.seed, &opts)?;
    run.seed_chain.extend(records.iter().map(|r| r.seed));
    let report = concentration_check(&h, &records, args.pattern.is_some());
    let mut lines = String::new();
    for r in &records {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    lines.push_str(&serde_json::to_string(&json!({ "summary": report }))?);
    lines.push('\n');
    run.emit(&lines)?;
    Ok(if report.pattern_failures > 0 {
        EXIT_FAIL
    } else if report.undecided > 0 {
        EXIT_UNDECIDED
    } else {
        EXIT_OK
    })
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Valid => EXIT_OK,
        Status::Invalid => EXIT_FAIL,
        Status::Unverified => EXIT_UNDECIDED,
    }
}

fn certify(args: CertifyArgs, run: &mut Run) -> anyhow::Result<u8> {
    let budget = run.budget;
    if let Some(trials) = args.trials {
        if !matches!(args.family, FamilyName::UnitalTransfer) {
            bail!("--trials applies to the unital-transfer family");
        }
        if args.p.is_some_and(|p| p != 1.0) {
            bail!("the unital pipeline samples every vertex (p = 1)");
        }
        let pattern = args.pattern.unwrap_or(ForbiddenPattern::Clique(4));
        if pattern != ForbiddenPattern::Clique(4) {
            bail!("the unital pipeline certifies k4");
        }
        let result = pipeline_unital(args.q, trials, run.seed, args.t, budget)?;
        run.seed_chain.extend((0..trials).map(|i| trial_seed(run.seed, i)));
        let code = status_code(result.best.status);
        run.emit(&(result.best.to_json() + "\n"))?;
        run.side_file(".pipeline.json", &result)?;
        return Ok(code);
    }
    let family = match args.family {
        FamilyName::Er => Family::Er { q: args.q },
        FamilyName::Bip => Family::Bip {
            q: args.q,
            s: args.s.ok_or_else(|| anyhow!("--s is required for bip"))?,
            adjacency: args.adjacency.parse()?,
        },
        FamilyName::UnitalTransfer => Family::UnitalTransfer { q: args.q, trial: args.trial, master_seed: run.seed },
    };
    if let Family::UnitalTransfer { trial, master_seed, .. } = family {
        run.seed_chain.push(trial_seed(master_seed, trial));
    }
    let pattern = match (args.pattern, family) {
        (Some(p), _) => p,
        (None, Family::Er { .. }) => ForbiddenPattern::C4,
        (None, Family::Bip { s, .. }) => ForbiddenPattern::clique(s + 1)?,
        (None, Family::UnitalTransfer { .. }) => ForbiddenPattern::Clique(4),
    };
    let g = family.build()?;
    let p = match args.p {
        Some(p) => p,
        None => {
            let lambda = match family {
                Family::Er { q } => spectrum_with_diagonal::<f64>(&g, &er_polarity(q)?.absolute)?.lambda,
                _ => spectrum::<f64>(&g)?.lambda,
            };
            default_probability(g.n(), lambda)
        }
    };
    let t = match args.t {
        Some(t) => t,
        None => {
            let alpha = independence_number(&g, budget);
            if !alpha.exact {
                eprintln!("independence number undecided within the budget; pass --t");
                return Ok(EXIT_UNDECIDED);
            }
            alpha.lower() + 1
        }
    };
    let cert = sample_and_delete(family, pattern, t, p, run.seed, budget)?;
    let code = status_code(cert.status);
    run.emit(&(cert.to_json() + "\n"))?;
    Ok(code)
}

fn verify_cmd(args: VerifyArgs, run: &mut Run) -> anyhow::Result<u8> {
    let text = run.read(&args.cert)?;
    let cert: RamseyCertificate = serde_json::from_str(&text).context("parsing certificate")?;
    run.seed_chain = vec![cert.seed];
    let report = verify(&cert, run.budget)?;
    let code = status_code(report.status);
    run.emit_json(&report)?;
    Ok(code)
}
