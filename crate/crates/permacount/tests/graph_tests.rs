use permacount::algebra::{PrimeModulus, RandomStream};
use permacount::graphs::{
    aut_size_test, automorphism_order, canonical_pairs, empirical_rigidity, graph_from_json,
    graph_to_json, is_rigid, isomorphism_class, pair_count, pair_index, permute_directed,
    permute_simple, permute_undirected, AnyGraph, DirectedMultigraph, SimpleGraph,
    UndirectedMultigraph, Verdict,
};
use permacount::perm::{factorial, visit_permutations, CycleType, Permutation};
use proptest::prelude::*;
use std::ops::ControlFlow;

#[test]
fn pair_indexing_is_lexicographic() {
    for n in 2..=9 {
        let pairs = canonical_pairs(n);
        assert_eq!(pairs.len(), pair_count(n));
        for (l, &(i, j)) in pairs.iter().enumerate() {
            assert!(i < j && j < n);
            assert_eq!(pair_index(n, i, j), l);
        }
        // strictly increasing lexicographic order
        for w in pairs.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}

#[test]
fn index_code_roundtrip() {
    let n = 5;
    for code in 0..(1u64 << pair_count(n)) {
        let g = SimpleGraph::from_index_code(n, code);
        assert_eq!(g.index_code(), code);
    }
}

proptest! {
    // Composition convention: pi.then(sigma) acts on graphs as pi first.
    #[test]
    fn action_is_anti_homomorphic(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = RandomStream::new(seed, 0);
        let pi = Permutation::random(n, &mut rng);
        let sigma = Permutation::random(n, &mut rng);
        let g = SimpleGraph::random(n, &mut rng);
        let composed = permute_simple(&pi.then(&sigma).unwrap(), &g).unwrap();
        let stepwise = permute_simple(&sigma, &permute_simple(&pi, &g).unwrap()).unwrap();
        prop_assert_eq!(composed.bits(), stepwise.bits());

        let p = PrimeModulus::new(1009).unwrap();
        let e = DirectedMultigraph::random(n, p, &mut rng);
        let c = permute_directed(&pi.then(&sigma).unwrap(), &e).unwrap();
        let s = permute_directed(&sigma, &permute_directed(&pi, &e).unwrap()).unwrap();
        prop_assert_eq!(c.entries(), s.entries());

        let f = UndirectedMultigraph::random(n, p, &mut rng);
        let cu = permute_undirected(&pi.then(&sigma).unwrap(), &f).unwrap();
        let su = permute_undirected(&sigma, &permute_undirected(&pi, &f).unwrap()).unwrap();
        prop_assert_eq!(cu.entries(), su.entries());
    }

    #[test]
    fn identity_and_inverse_act_trivially(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = RandomStream::new(seed, 1);
        let pi = Permutation::random(n, &mut rng);
        let g = SimpleGraph::random(n, &mut rng);
        let back = permute_simple(&pi.invert(), &permute_simple(&pi, &g).unwrap()).unwrap();
        prop_assert_eq!(back.bits(), g.bits());
        let id = permute_simple(&Permutation::identity(n), &g).unwrap();
        prop_assert_eq!(id.bits(), g.bits());
    }

    #[test]
    fn permutation_preserves_edge_count(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = RandomStream::new(seed, 2);
        let pi = Permutation::random(n, &mut rng);
        let g = SimpleGraph::random(n, &mut rng);
        prop_assert_eq!(permute_simple(&pi, &g).unwrap().edge_count(), g.edge_count());
    }

    #[test]
    fn cycle_type_is_conjugation_invariant(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = RandomStream::new(seed, 3);
        let sigma = Permutation::random(n, &mut rng);
        let tau = Permutation::random(n, &mut rng);
        let conj = tau.invert().then(&sigma).unwrap().then(&tau).unwrap();
        prop_assert_eq!(conj.cycle_type(), sigma.cycle_type());
    }
}

#[test]
fn orbit_stabilizer_exhaustive_small() {
    // |Aut(U)| * |orbit(U)| = n! and Aut(U) = Aut(complement) for all U, n <= 5.
    for n in 1..=5usize {
        for code in 0..(1u64 << pair_count(n)) {
            let u = SimpleGraph::from_index_code(n, code);
            let aut = automorphism_order(&u).unwrap();
            let orbit = isomorphism_class(&u).unwrap().len() as u64;
            assert_eq!(aut * orbit, factorial(n), "n={n} code={code}");
            assert_eq!(aut, automorphism_order(&u.complement()).unwrap());
        }
    }
}

#[test]
fn known_automorphism_orders() {
    // 5-cycle: dihedral group of order 10.
    let c5 = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    assert_eq!(automorphism_order(&c5).unwrap(), 10);
    assert_eq!(automorphism_order(&SimpleGraph::complete(4)).unwrap(), 24);
    // path on 4 vertices: order 2.
    let p4 = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(automorphism_order(&p4).unwrap(), 2);
    assert!(!is_rigid(&p4).unwrap());
    // smallest rigid graph has 6 vertices; nothing smaller (except n=1) is rigid.
    for n in 2..=5 {
        for code in 0..(1u64 << pair_count(n)) {
            assert!(!is_rigid(&SimpleGraph::from_index_code(n, code)).unwrap());
        }
    }
    assert!(is_rigid(&SimpleGraph::empty(1)).unwrap());
}

#[test]
fn rigidity_zero_for_tiny_one_for_single_vertex() {
    let rng = RandomStream::new(77, 0);
    assert_eq!(empirical_rigidity(3, 500, &rng).unwrap(), 0.0);
    assert_eq!(empirical_rigidity(1, 50, &rng).unwrap(), 1.0);
}

#[test]
fn rigidity_matches_known_count_at_n7() {
    // 152 asymmetric graphs on 7 vertices: rigid fraction 152*7!/2^21.
    let exact = 152.0 * 5040.0 / f64::from(1u32 << 21);
    let rng = RandomStream::new(83, 0);
    let measured = empirical_rigidity(7, 20_000, &rng).unwrap();
    assert!((measured - exact).abs() < 0.012, "measured {measured} exact {exact}");
}

#[test]
fn aut_size_test_extremes() {
    let mut rng = RandomStream::new(31, 0);
    // complete graph: every draw fixes U.
    assert_eq!(aut_size_test(&SimpleGraph::complete(6), 5, &mut rng), Verdict::Accept);
    // a rigid graph: fixing events have probability 1/n!.
    let rigid = SimpleGraph::from_edges(
        6,
        &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (0, 3)],
    )
    .unwrap();
    assert!(is_rigid(&rigid).unwrap());
    assert_eq!(aut_size_test(&rigid, 5, &mut rng), Verdict::Reject);
}

#[test]
fn unit_constructors() {
    let p = PrimeModulus::new(1009).unwrap();
    let e = DirectedMultigraph::unit_cycle(5, p);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(e.entry(i, j), u64::from(j == (i + 1) % 5));
        }
    }
    let f = UndirectedMultigraph::unit_clique(6, 3, p);
    for (i, j) in canonical_pairs(6) {
        assert_eq!(f.entry(i, j), u64::from(j < 3));
    }
    let full = UndirectedMultigraph::unit_complete(4, p);
    assert!(full.entries().iter().all(|&x| x == 1));
}

#[test]
fn visit_permutations_counts_and_breaks() {
    let mut count = 0u64;
    let _ = visit_permutations(5, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    assert_eq!(count, 120);
    let mut seen = 0u64;
    let flow = visit_permutations(5, |_| {
        seen += 1;
        if seen == 7 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    assert!(flow.is_break());
    assert_eq!(seen, 7);
}

#[test]
fn cycle_type_parsing() {
    let t: CycleType = "3+2+1".parse().unwrap();
    assert_eq!(t.parts(), &[3, 2, 1]);
    assert_eq!(t.n(), 6);
    let t2: CycleType = "1,2,3".parse().unwrap();
    assert_eq!(t2.parts(), &[3, 2, 1]);
    assert!("0+2".parse::<CycleType>().is_err());
    assert!("".parse::<CycleType>().is_err());
}

#[test]
fn json_roundtrip_all_kinds() {
    let p = PrimeModulus::new(1009).unwrap();
    let mut rng = RandomStream::new(8, 0);
    let kinds = vec![
        AnyGraph::Simple(SimpleGraph::random(5, &mut rng)),
        AnyGraph::Directed(DirectedMultigraph::random(4, p, &mut rng)),
        AnyGraph::Undirected(UndirectedMultigraph::random(5, p, &mut rng)),
    ];
    for g in kinds {
        let text = graph_to_json(&g);
        let back = graph_from_json(&text).unwrap();
        match (&g, &back) {
            (AnyGraph::Simple(a), AnyGraph::Simple(b)) => assert_eq!(a.bits(), b.bits()),
            (AnyGraph::Directed(a), AnyGraph::Directed(b)) => {
                assert_eq!(a.entries(), b.entries());
                assert_eq!(a.modulus().value(), b.modulus().value());
            }
            (AnyGraph::Undirected(a), AnyGraph::Undirected(b)) => {
                assert_eq!(a.entries(), b.entries());
            }
            _ => panic!("kind changed in roundtrip"),
        }
    }
}

#[test]
fn json_rejects_malformed() {
    assert!(graph_from_json("not json").is_err());
    assert!(graph_from_json(r#"{"kind":"simple","n":3,"edges":[[1,4]]}"#).is_err());
    assert!(graph_from_json(r#"{"kind":"simple","n":3,"edges":[[2,2]]}"#).is_err());
}
