use permacount::algebra::{PrimeModulus, RandomStream};
use permacount::amplify::{
    amplify_majority, amplify_query, hcy_zero_fraction, reduce_clique_to_half,
    reduce_half_to_counting, reduce_hamcycle_to_counting, majority_pipeline, symmetric_pipeline,
    AmplificationConfig,
};
use permacount::counters::{
    count_kcliques_simple, has_kclique, hcl_bruteforce, hcy_bruteforce, twelve_families,
};
use permacount::error::Error;
use permacount::graphs::{pair_count, SimpleGraph};
use permacount::oracle::{
    sample_corrupt_oracle, CorruptionStrategy, GroundTruthFunction, OracleMode, TruthKind,
};

fn oracle(
    truth: TruthKind,
    n: usize,
    c: f64,
    mode: OracleMode,
    strategy: CorruptionStrategy,
    seed: u64,
) -> permacount::oracle::CorruptOracle {
    let mut rng = RandomStream::new(seed, 0);
    sample_corrupt_oracle(GroundTruthFunction::new(truth), n, c, mode, strategy, &mut rng).unwrap()
}

#[test]
fn config_validation_and_majority_size() {
    assert!(AmplificationConfig::new(0.0, 0.5).is_err());
    assert!(AmplificationConfig::new(0.6, 0.5).is_err());
    assert!(AmplificationConfig::new(0.4, 0.0).is_err());
    assert!(AmplificationConfig::new(0.4, 1.0).is_err());
    // eps = 1/2, delta = e^-8: m = 2*8/(1/4) = 64
    let cfg = AmplificationConfig::new(0.5, (-8.0f64).exp()).unwrap();
    assert_eq!(cfg.majority_queries(), 64);
    // threshold scales as c_t n^2 / eps^2
    let mut c1 = AmplificationConfig::new(0.4, 1e-3).unwrap();
    c1.threshold_constant = 1.0;
    assert_eq!(c1.threshold(7), (49.0f64 / 0.16).ceil() as u64);
    assert!(c1.symmetric_budget(7) > c1.threshold(7));
}

#[test]
fn hamcycle_reduction_is_sound_and_complete() {
    let p = PrimeModulus::new(1009).unwrap();
    let n = 6;
    // complete digraph: Hamiltonian, so the count is nonzero whp
    let complete: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    // a DAG is never Hamiltonian: the count is identically zero
    let dag: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut nonzero = 0;
    for trial in 0..50u64 {
        let mut rng = RandomStream::new(307, trial);
        let e = reduce_hamcycle_to_counting(n, &complete, p, &mut rng).unwrap();
        nonzero += u64::from(hcy_bruteforce(&e).unwrap().value() != 0);
        let z = reduce_hamcycle_to_counting(n, &dag, p, &mut rng).unwrap();
        assert_eq!(hcy_bruteforce(&z).unwrap().value(), 0);
    }
    // soundness failure probability is at most n/(p-1) ~ 0.6% per trial
    assert!(nonzero >= 48, "{nonzero}/50");
    // p must exceed n + 1
    let tiny = PrimeModulus::new(5).unwrap();
    assert!(matches!(
        reduce_hamcycle_to_counting(6, &complete, tiny, &mut RandomStream::new(1, 0)),
        Err(Error::Usage(_))
    ));
}

#[test]
fn half_clique_reduction_is_sound_and_complete() {
    let p = PrimeModulus::new(1009).unwrap();
    let n = 6;
    let with = reduce_clique_to_half(&SimpleGraph::complete(3), 3).unwrap(); // K_6, half 3
    assert_eq!(with.n(), n);
    let without = SimpleGraph::from_edges(n, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
    let mut nonzero = 0;
    for trial in 0..50u64 {
        let mut rng = RandomStream::new(311, trial);
        let f = reduce_half_to_counting(&with, p, &mut rng).unwrap();
        nonzero += u64::from(hcl_bruteforce(&f).unwrap().value() != 0);
        let z = reduce_half_to_counting(&without, p, &mut rng).unwrap();
        assert_eq!(hcl_bruteforce(&z).unwrap().value(), 0);
    }
    assert!(nonzero >= 48, "{nonzero}/50");
    assert!(matches!(
        reduce_half_to_counting(&with, PrimeModulus::new(13).unwrap(), &mut RandomStream::new(1, 0)),
        Err(Error::Usage(_))
    ));
}

#[test]
fn clique_to_half_exhaustive_small() {
    // for every graph on up to 6 vertices and every k, the output has a
    // half-clique exactly when the input has a k-clique
    for n in 1..=6usize {
        for code in 0..(1u64 << pair_count(n)) {
            let u = SimpleGraph::from_index_code(n, code);
            for k in 1..=n {
                let out = reduce_clique_to_half(&u, k).unwrap();
                assert_eq!(out.n() % 2, 0);
                let half = out.n() / 2;
                assert_eq!(
                    has_kclique(&out, half),
                    has_kclique(&u, k),
                    "n={n} code={code} k={k}"
                );
            }
        }
    }
}

#[test]
fn majority_is_exact_on_perfect_oracles() {
    let n = 7;
    let o = oracle(
        TruthKind::KCliqueCount(3),
        n,
        1.0,
        OracleMode::ExactTable,
        CorruptionStrategy::RandomWrong,
        401,
    );
    let cfg = AmplificationConfig::new(0.4, 1e-3).unwrap();
    let h = GroundTruthFunction::new(TruthKind::KCliqueCount(3));
    let mut rng = RandomStream::new(403, 0);
    for _ in 0..20 {
        let u = SimpleGraph::random(n, &mut rng);
        assert_eq!(amplify_query(&o, &u, &mut rng).unwrap(), h.eval(&u));
        assert_eq!(amplify_majority(&o, &u, &cfg, &mut rng).unwrap(), h.eval(&u));
    }
}

#[test]
fn majority_overcomes_uniform_corruption() {
    // c = 0.9 uniform corruption: the majority is right on every tried
    // rigid input (symmetric inputs are the hard case, handled elsewhere)
    let n = 7;
    let o = oracle(
        TruthKind::KCliqueCount(3),
        n,
        0.9,
        OracleMode::ExactTable,
        CorruptionStrategy::RandomWrong,
        409,
    );
    let cfg = AmplificationConfig::new(0.4, 1e-3).unwrap();
    let h = GroundTruthFunction::new(TruthKind::KCliqueCount(3));
    let mut rng = RandomStream::new(419, 0);
    let mut correct = 0u64;
    for _ in 0..100 {
        let u = SimpleGraph::random(n, &mut rng);
        correct += u64::from(amplify_majority(&o, &u, &cfg, &mut rng).unwrap() == h.eval(&u));
    }
    assert!(correct >= 99, "{correct}/100");
}

#[test]
fn majority_takes_the_symmetric_path_on_symmetric_inputs() {
    let n = 7;
    let o = oracle(
        TruthKind::KCliqueCount(3),
        n,
        0.9,
        OracleMode::ExactTable,
        CorruptionStrategy::RandomWrong,
        421,
    );
    let mut cfg = AmplificationConfig::new(0.4, 1e-3).unwrap();
    cfg.threshold_constant = 1.0;
    let mut rng = RandomStream::new(431, 0);
    let g = SimpleGraph::complete(n);
    let (value, stats) = majority_pipeline(&o, &g, 3, &cfg, &mut rng).unwrap();
    assert!(stats.symmetric_path);
    assert_eq!(stats.oracle_queries, 0);
    assert_eq!(value, count_kcliques_simple(&g, 3));
    // a rigid graph goes through the majority branch
    let rigid = SimpleGraph::from_edges(
        n,
        &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (0, 2), (0, 3)],
    )
    .unwrap();
    let (value2, stats2) = majority_pipeline(&o, &rigid, 3, &cfg, &mut rng).unwrap();
    assert!(!stats2.symmetric_path);
    assert!(stats2.oracle_queries > 0);
    assert_eq!(value2, count_kcliques_simple(&rigid, 3));
}

#[test]
fn symmetric_families_cost_zero_queries() {
    let n = 8;
    let o = oracle(
        TruthKind::KCliqueCount(3),
        n,
        0.75,
        OracleMode::KeyedPrf,
        CorruptionStrategy::RandomWrong,
        433,
    );
    let mut rng = RandomStream::new(439, 0);
    for (fam, complemented, g) in twelve_families(n) {
        let (value, stats) = symmetric_pipeline(&o, &g, 3, 0.25, &mut rng).unwrap();
        assert!(stats.symmetric_path, "{} complemented={complemented}", fam.label());
        assert_eq!(stats.oracle_queries, 0);
        assert_eq!(value, count_kcliques_simple(&g, 3));
    }
}

#[test]
fn symmetric_below_floor_falls_back() {
    let n = 6;
    let o = oracle(
        TruthKind::KCliqueCount(3),
        n,
        1.0,
        OracleMode::ExactTable,
        CorruptionStrategy::RandomWrong,
        443,
    );
    let mut rng = RandomStream::new(449, 0);
    for code in [0u64, 77, 32767] {
        let u = SimpleGraph::from_index_code(n, code);
        let (value, _) = symmetric_pipeline(&o, &u, 3, 0.25, &mut rng).unwrap();
        assert_eq!(value, count_kcliques_simple(&u, 3));
    }
}

#[test]
fn zero_fraction_matches_one_over_p() {
    let p = PrimeModulus::new(101).unwrap();
    let mut rng = RandomStream::new(457, 0);
    let z = hcy_zero_fraction(4, p, 20_000, &mut rng).unwrap();
    let expected = 1.0 / 101.0;
    // zero fraction of a nonzero polynomial over uniform inputs is ~1/p
    assert!(
        (z.fraction - expected).abs() <= 3.0 * (expected / 20_000f64).sqrt() + 1e-4,
        "fraction {} expected {expected}",
        z.fraction
    );
    assert_eq!(z.samples, 20_000);
    assert_eq!(z.zeros as f64 / z.samples as f64, z.fraction);
}
