//! Command-line front-end: counters, identification pipelines, reductions,
//! amplification, and batched experiments with reproducible seeded reports.

use clap::{Args, Parser, Subcommand, ValueEnum};
use permacount::algebra::{next_prime_at_least, PrimeModulus, RandomStream};
use permacount::amplify::{
    hcl_zero_fraction, hcy_zero_fraction, reduce_clique_to_half, reduce_half_to_counting,
    reduce_hamcycle_to_counting, majority_pipeline, symmetric_pipeline, AmplificationConfig,
};
use permacount::counters::{
    hcl_bruteforce, hcy_bruteforce, kclique_bruteforce, kclique_fast, sym_clique_count,
};
use permacount::error::{Error, Result};
use permacount::experiments::{impostor_suite, class_goodness_survey, single_round_reject_rate};
use permacount::graphs::{
    empirical_rigidity, graph_from_json, graph_to_json, AnyGraph, DirectedMultigraph,
    SimpleGraph, UndirectedMultigraph,
};
use permacount::identity::{is_hcl_pipeline_recorded, is_hcy_pipeline_recorded};
use permacount::oracle::{
    machine_catalog, sample_corrupt_oracle, CorruptionStrategy, DomainKind, GroundTruthFunction,
    OracleMode, TruthKind,
};
use serde_json::{json, Value};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "permacount", version, about = "Counting polynomials, identification tests, and oracle amplification over Z_p")]
struct Cli {
    /// Base seed for all randomness; identical invocations are
    /// byte-identical up to wall_ms fields.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Base stream id; each trial i runs on a substream derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    stream_id: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Include full query transcripts where applicable.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct PrimeArgs {
    /// Modulus, a prime in (2, 2^62).
    #[arg(long, conflicts_with = "p_bits")]
    p: Option<u64>,
    /// Use next_prime_at_least(2^b) as the modulus.
    #[arg(long)]
    p_bits: Option<u32>,
}

impl PrimeArgs {
    fn resolve(&self, default_bits: u32) -> Result<PrimeModulus> {
        match (self.p, self.p_bits) {
            (Some(p), _) => PrimeModulus::new(p),
            (None, Some(b)) => {
                if b >= 62 {
                    return Err(Error::Usage("p-bits must be below 62".into()));
                }
                next_prime_at_least(1u64 << b)
            }
            (None, None) => next_prime_at_least(1u64 << default_bits),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CountAlg {
    Brute,
    Fast,
    Sym,
    Hcy,
    Hcl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    Hamcycle,
    HalfClique,
    CliqueToHalf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    Majority,
    Symmetric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Truth {
    Count,
    Parity,
    Half,
}

impl Truth {
    fn kind(self, k: usize) -> TruthKind {
        match self {
            Truth::Count => TruthKind::KCliqueCount(k),
            Truth::Parity => TruthKind::KCliqueParity(k),
            Truth::Half => TruthKind::HalfCliqueIndicator,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    ExactTable,
    KeyedPrf,
}

impl Mode {
    fn oracle(self) -> OracleMode {
        match self {
            Mode::ExactTable => OracleMode::ExactTable,
            Mode::KeyedPrf => OracleMode::KeyedPrf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    /// Pipeline and single-round rejection rates for the impostor catalog.
    Soundness,
    /// Per-isomorphism-class correctness survey over sampled oracles.
    ClassSurvey,
    /// Fraction of uniformly random graphs with trivial automorphism group.
    Rigidity,
    /// Zero-answer fraction of the exact counters on uniform multigraphs.
    ZeroFraction,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a counter on a graph file.
    Count {
        #[arg(long, value_enum)]
        alg: CountAlg,
        /// Clique size (brute/fast/sym).
        #[arg(long)]
        k: Option<usize>,
        /// Relabeling budget multiplier for the sym counter.
        #[arg(long, default_value_t = 10)]
        t: u64,
        /// Graph file (JSON; kinds simple, directed, undirected).
        #[arg(long)]
        input: String,
        #[command(flatten)]
        prime: PrimeArgs,
    },
    /// Run an identification pipeline against a catalog machine.
    Identify {
        /// Catalog machine, e.g. exact_hcy, permanent, scaled_hcl:2,
        /// conj_class:3+2, noisy:exact_hcy:0.01:7.
        #[arg(long)]
        machine: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        repetitions: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        prime: PrimeArgs,
    },
    /// Apply a decision-to-counting or clique-to-half-clique reduction.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReduceKind,
        #[arg(long)]
        input: String,
        /// Clique size (clique-to-half only).
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        prime: PrimeArgs,
    },
    /// Run an amplification pipeline against a sampled corrupt oracle.
    Amplify {
        #[arg(long, value_enum)]
        pipeline: Pipeline,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Threshold multiplier c_t of the automorphism-size test.
        #[arg(long, default_value_t = 1.0)]
        ct: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Mode::ExactTable)]
        mode: Mode,
        #[arg(long, default_value = "random-wrong")]
        strategy: String,
        #[arg(long, value_enum, default_value_t = Truth::Count)]
        truth: Truth,
    },
    /// Batched Monte-Carlo experiments.
    Experiment {
        #[arg(long, value_enum)]
        name: Experiment,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.75)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 200)]
        oracles: u64,
        #[arg(long, default_value_t = 20)]
        repetitions: u64,
        #[command(flatten)]
        prime: PrimeArgs,
    },
    /// Fast invariant checks; nonzero exit on any failure.
    Selftest,
}

struct Reporter {
    format: Format,
    csv_header_done: bool,
}

impl Reporter {
    fn new(format: Format) -> Self {
        Reporter { format, csv_header_done: false }
    }

    fn row(&mut self, v: &Value) {
        match self.format {
            Format::Jsonl => println!("{v}"),
            Format::Csv => {
                let obj = v.as_object().expect("rows are objects");
                if !self.csv_header_done {
                    println!("{}", obj.keys().cloned().collect::<Vec<_>>().join(","));
                    self.csv_header_done = true;
                }
                let cells: Vec<String> = obj
                    .values()
                    .map(|x| match x {
                        Value::String(s) => s.replace(',', ";"),
                        other => other.to_string(),
                    })
                    .collect();
                println!("{}", cells.join(","));
            }
        }
    }
}

fn load_graph(path: &str) -> Result<AnyGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {path}: {e}")))?;
    graph_from_json(&text)
}

fn to_undirected(g: &AnyGraph, p: PrimeModulus) -> Result<UndirectedMultigraph> {
    match g {
        AnyGraph::Undirected(f) => Ok(f.clone()),
        AnyGraph::Simple(u) => Ok(UndirectedMultigraph::from_simple(u, p)),
        AnyGraph::Directed(_) => {
            Err(Error::Usage("this counter needs an undirected or simple graph".into()))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let base = RandomStream::new(cli.seed, cli.stream_id);
    let mut report = Reporter::new(cli.format);
    match cli.command {
        Command::Count { alg, k, t, input, prime } => {
            let p = prime.resolve(31)?;
            let g = load_graph(&input)?;
            let need_k =
                || k.ok_or_else(|| Error::Usage("this counter needs --k".into()));
            let (label, count) = match alg {
                CountAlg::Brute => {
                    let f = to_undirected(&g, p)?;
                    ("kclique_bruteforce", kclique_bruteforce(&f, need_k()?)?.value())
                }
                CountAlg::Fast => {
                    let f = to_undirected(&g, p)?;
                    ("kclique_fast", kclique_fast(&f, need_k()?)?.value())
                }
                CountAlg::Sym => {
                    let AnyGraph::Simple(u) = &g else {
                        return Err(Error::Usage("sym counting needs a simple graph".into()));
                    };
                    let mut rng = base.substream(0);
                    ("sym_clique_count", sym_clique_count(u, t, need_k()?, &mut rng)?)
                }
                CountAlg::Hcy => {
                    let AnyGraph::Directed(e) = &g else {
                        return Err(Error::Usage("hcy needs a directed multigraph".into()));
                    };
                    ("hcy_bruteforce", hcy_bruteforce(e)?.value())
                }
                CountAlg::Hcl => {
                    let f = to_undirected(&g, p)?;
                    ("hcl_bruteforce", hcl_bruteforce(&f)?.value())
                }
            };
            report.row(&json!({
                "alg": label, "count": count, "p": p.value(),
                "seed": cli.seed, "stream_id": cli.stream_id,
            }));
        }
        Command::Identify { machine, n, repetitions, trials, prime } => {
            let p = prime.resolve(20)?;
            let kind = match machine.as_str() {
                "permanent" => "exact_permanent".to_string(),
                "hcy" => "exact_hcy".to_string(),
                "hcl" => "exact_hcl".to_string(),
                other => other.to_string(),
            };
            let m = machine_catalog(&kind, n, p)?;
            let start = Instant::now();
            let mut rejected = 0u64;
            for i in 0..trials {
                let mut rng = base.substream(i);
                let v = match m.domain_kind {
                    DomainKind::Directed => {
                        is_hcy_pipeline_recorded(&m, repetitions, &mut rng, cli.verbose)?
                    }
                    DomainKind::Undirected => {
                        is_hcl_pipeline_recorded(&m, repetitions, &mut rng, cli.verbose)?
                    }
                };
                rejected += u64::from(!v.accepted());
                let mut row = json!({
                    "machine": m.label, "n": n, "p": p.value(),
                    "repetitions": repetitions, "trial": i,
                    "accepted": v.accepted(), "queries": v.queries,
                    "first_failure": v.first_failure,
                    "seed": cli.seed, "stream_id": cli.stream_id.wrapping_add(i),
                });
                if cli.verbose {
                    row["transcript"] = serde_json::to_value(&v.transcript).unwrap();
                }
                report.row(&row);
            }
            report.row(&json!({
                "summary": true, "machine": m.label, "trials": trials,
                "rejected": rejected, "accepted": trials - rejected,
                "wall_ms": start.elapsed().as_millis() as u64,
                "seed": cli.seed, "stream_id": cli.stream_id,
            }));
        }
        Command::Reduce { kind, input, k, prime } => {
            let g = load_graph(&input)?;
            let mut rng = base.substream(0);
            let out = match kind {
                ReduceKind::Hamcycle => {
                    let p = prime.resolve(31)?;
                    let AnyGraph::Directed(e) = &g else {
                        return Err(Error::Usage("hamcycle reduction needs a directed graph".into()));
                    };
                    // nonzero entries mark edges; weights are resampled
                    let edges: Vec<(usize, usize)> = (0..e.n())
                        .flat_map(|i| (0..e.n()).map(move |j| (i, j)))
                        .filter(|&(i, j)| i != j && e.entry(i, j) != 0)
                        .collect();
                    AnyGraph::Directed(reduce_hamcycle_to_counting(e.n(), &edges, p, &mut rng)?)
                }
                ReduceKind::HalfClique => {
                    let p = prime.resolve(31)?;
                    let AnyGraph::Simple(u) = &g else {
                        return Err(Error::Usage("half-clique reduction needs a simple graph".into()));
                    };
                    AnyGraph::Undirected(reduce_half_to_counting(u, p, &mut rng)?)
                }
                ReduceKind::CliqueToHalf => {
                    let AnyGraph::Simple(u) = &g else {
                        return Err(Error::Usage("clique-to-half needs a simple graph".into()));
                    };
                    let k = k.ok_or_else(|| Error::Usage("clique-to-half needs --k".into()))?;
                    AnyGraph::Simple(reduce_clique_to_half(u, k)?)
                }
            };
            println!("{}", graph_to_json(&out));
        }
        Command::Amplify { pipeline, n, k, epsilon, c, delta, ct, trials, mode, strategy, truth } => {
            let strategy = CorruptionStrategy::parse(&strategy)?;
            let h = GroundTruthFunction::new(truth.kind(k));
            let mut oracle_rng = base.substream(u64::MAX);
            let oracle = sample_corrupt_oracle(h, n, c, mode.oracle(), strategy, &mut oracle_rng)?;
            let mut cfg = AmplificationConfig::new(epsilon, delta)?;
            cfg.threshold_constant = ct;
            let start = Instant::now();
            let mut correct = 0u64;
            let mut queries = 0u64;
            for i in 0..trials {
                let mut rng = base.substream(i);
                let u = SimpleGraph::random(n, &mut rng);
                let (value, stats) = match pipeline {
                    Pipeline::Majority => majority_pipeline(&oracle, &u, k, &cfg, &mut rng)?,
                    Pipeline::Symmetric => symmetric_pipeline(&oracle, &u, k, epsilon, &mut rng)?,
                };
                let truth_value = oracle.ground_truth().eval(&u);
                correct += u64::from(value == truth_value);
                queries += stats.oracle_queries;
                report.row(&json!({
                    "pipeline": match pipeline { Pipeline::Majority => "majority", Pipeline::Symmetric => "symmetric" },
                    "n": n, "k": k, "epsilon": epsilon, "c": c,
                    "strategy": oracle.strategy().label(), "trial": i,
                    "value": value, "truth": truth_value,
                    "correct": value == truth_value,
                    "oracle_queries": stats.oracle_queries,
                    "symmetric_path": stats.symmetric_path,
                    "seed": cli.seed, "stream_id": cli.stream_id.wrapping_add(i),
                }));
            }
            report.row(&json!({
                "summary": true, "trials": trials, "correct": correct,
                "oracle_queries": queries,
                "wall_ms": start.elapsed().as_millis() as u64,
                "seed": cli.seed, "stream_id": cli.stream_id,
            }));
        }
        Command::Experiment { name, n, k, epsilon, c, samples, oracles, repetitions, prime } => {
            let start = Instant::now();
            match name {
                Experiment::Soundness => {
                    let p = prime.resolve(20)?;
                    for (kind, pipeline, test) in impostor_suite(n) {
                        let m = machine_catalog(kind, n, p)?;
                        let s = permacount::experiments::run_pipeline_trials(
                            &m, pipeline, repetitions, samples, &base,
                        )?;
                        let rate = test
                            .map(|t| {
                                single_round_reject_rate(&m, t, samples, &base.substream(1))
                            })
                            .transpose()?;
                        report.row(&json!({
                            "machine": kind, "n": n, "p": p.value(),
                            "trials": s.trials, "rejected": s.trials - s.accepted,
                            "single_round_rate": rate,
                            "seed": cli.seed, "stream_id": cli.stream_id,
                        }));
                    }
                }
                Experiment::ClassSurvey => {
                    let s = class_goodness_survey(TruthKind::KCliqueCount(k), n, c, epsilon, oracles, &base)?;
                    report.row(&json!({
                        "n": n, "c": c, "epsilon": epsilon, "oracles": s.oracles,
                        "classes": s.class_count, "threshold_size": s.threshold_size,
                        "checked": s.classes_checked, "violations": s.violations,
                        "seed": cli.seed, "stream_id": cli.stream_id,
                    }));
                }
                Experiment::Rigidity => {
                    let fraction = empirical_rigidity(n, samples, &base)?;
                    report.row(&json!({
                        "n": n, "samples": samples, "rigid_fraction": fraction,
                        "seed": cli.seed, "stream_id": cli.stream_id,
                    }));
                }
                Experiment::ZeroFraction => {
                    let p = prime.resolve(10)?;
                    let mut rng = base.substream(0);
                    let zy = hcy_zero_fraction(n.min(6), p, samples, &mut rng)?;
                    let zl = hcl_zero_fraction(n.min(7), p, samples, &mut rng)?;
                    for (counter, z, m) in [("hcy", zy, n.min(6)), ("hcl", zl, n.min(7))] {
                        report.row(&json!({
                            "counter": counter, "n": m, "p": p.value(),
                            "samples": z.samples, "zeros": z.zeros,
                            "fraction": z.fraction, "standard_error": z.standard_error,
                            "seed": cli.seed, "stream_id": cli.stream_id,
                        }));
                    }
                }
            }
            report.row(&json!({
                "summary": true, "wall_ms": start.elapsed().as_millis() as u64,
                "seed": cli.seed, "stream_id": cli.stream_id,
            }));
        }
        Command::Selftest => {
            selftest(&base, &mut report)?;
        }
    }
    Ok(())
}

/// A quick pass over the core invariants: closed forms, fast-vs-brute
/// agreement, pipeline completeness, and one impostor rejection.
fn selftest(base: &RandomStream, report: &mut Reporter) -> Result<()> {
    use permacount::perm::{binomial, factorial};
    let p = PrimeModulus::new((1 << 31) - 1)?;
    let mut failures = Vec::new();
    for n in 3..=7usize {
        let e = DirectedMultigraph::unit_complete(n, p);
        if hcy_bruteforce(&e)?.value() != factorial(n - 1) {
            failures.push(format!("hcy closed form n={n}"));
        }
        let f = UndirectedMultigraph::unit_complete(n.max(4), p);
        if hcl_bruteforce(&f)?.value() != binomial(n.max(4), n.max(4) / 2) {
            failures.push(format!("hcl closed form n={}", n.max(4)));
        }
    }
    let mut rng = base.substream(0);
    for k in 3..=6usize {
        let f = UndirectedMultigraph::random(9, p, &mut rng);
        if kclique_fast(&f, k)? != kclique_bruteforce(&f, k)? {
            failures.push(format!("fast vs brute k={k}"));
        }
    }
    let p20 = next_prime_at_least(1 << 20)?;
    let hcy = machine_catalog("exact_hcy", 6, p20)?;
    let mut rng2 = base.substream(1);
    if !is_hcy_pipeline_recorded(&hcy, 5, &mut rng2, false)?.accepted() {
        failures.push("pipeline rejects the exact cycle counter".into());
    }
    let imp = machine_catalog("scaled_hcy:2", 6, p20)?;
    if is_hcy_pipeline_recorded(&imp, 5, &mut rng2, false)?.accepted() {
        failures.push("pipeline accepts a scaled impostor".into());
    }
    report.row(&json!({ "selftest": failures.is_empty(), "failures": failures }));
    if !failures.is_empty() {
        return Err(Error::Internal(format!("selftest failed: {}", failures.join("; "))));
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "exit_code": e.exit_code() }));
            std::process::exit(e.exit_code());
        }
    }
}
