//! Randomized identification tests: given a black-box machine promised to
//! compute a bounded-degree polynomial in the edge variables, decide
//! whether it computes the Hamiltonian-cycle counter (directed pipeline) or
//! the half-clique counter (undirected pipeline). Completeness is absolute;
//! soundness is one-sided with per-round rates driven by Schwartz-Zippel.

use crate::algebra::{sub_mod, RandomStream};
use crate::error::{Error, Result};
use crate::graphs::{
    canonical_pairs, pair_count, DirectedMultigraph, UndirectedMultigraph, Verdict,
};
use crate::oracle::{DomainKind, GraphQuery, PolynomialMachine};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptEntry {
    pub round: String,
    pub query: String,
    pub answer: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstFailure {
    pub round: String,
    pub observed: Vec<u64>,
    pub expected: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestVerdict {
    pub verdict: Verdict,
    pub rounds_run: u64,
    pub queries: u64,
    pub first_failure: Option<FirstFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<TranscriptEntry>>,
}

impl TestVerdict {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

struct Runner<'a> {
    m: &'a PolynomialMachine,
    queries: u64,
    rounds: u64,
    transcript: Option<Vec<TranscriptEntry>>,
}

impl<'a> Runner<'a> {
    fn new(m: &'a PolynomialMachine, transcript: bool) -> Self {
        Runner { m, queries: 0, rounds: 0, transcript: transcript.then(Vec::new) }
    }

    fn ask(&mut self, round: &str, q: GraphQuery<'_>) -> Result<u64> {
        let answer = self.m.evaluate(q)?.value();
        self.queries += 1;
        if let Some(t) = &mut self.transcript {
            let query = match q {
                GraphQuery::Directed(e) => {
                    serde_json::to_string(e.entries()).expect("serializable")
                }
                GraphQuery::Undirected(f) => {
                    serde_json::to_string(f.entries()).expect("serializable")
                }
            };
            t.push(TranscriptEntry { round: round.to_string(), query, answer });
        }
        Ok(answer)
    }

    fn finish(self, failure: Option<FirstFailure>) -> TestVerdict {
        TestVerdict {
            verdict: if failure.is_some() { Verdict::Reject } else { Verdict::Accept },
            rounds_run: self.rounds,
            queries: self.queries,
            first_failure: failure,
            transcript: self.transcript,
        }
    }
}

fn require(m: &PolynomialMachine, domain: DomainKind, min_p_over: u64) -> Result<()> {
    if m.domain_kind != domain {
        return Err(Error::Usage("wrong domain kind for this test".into()));
    }
    if m.p.value() <= min_p_over {
        return Err(Error::Usage(format!("test needs p > {min_p_over}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Directed tests.
// ---------------------------------------------------------------------------

/// One full pass of the generalized-permanent membership test: for every
/// vertex i, query a uniform multigraph with row i zeroed and one with
/// column i zeroed; any nonzero answer rejects. Cycle-cover combinations
/// always answer zero here; anything else survives a pass with probability
/// at most n/p.
fn genperm_pass(r: &mut Runner<'_>, rng: &mut RandomStream) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let p = r.m.p;
    for i in 0..n {
        for (orient, tag) in [(true, "row"), (false, "col")] {
            let mut e = DirectedMultigraph::random(n, p, rng);
            for j in 0..n {
                if orient {
                    e.set_entry(i, j, 0);
                } else {
                    e.set_entry(j, i, 0);
                }
            }
            let round = format!("genperm-{tag}-{}", i + 1);
            let answer = r.ask(&round, GraphQuery::Directed(&e))?;
            r.rounds += 1;
            if answer != 0 {
                return Ok(Some(FirstFailure {
                    round,
                    observed: vec![answer],
                    expected: "0".into(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn genperm_test(m: &PolynomialMachine, rng: &mut RandomStream) -> Result<TestVerdict> {
    require(m, DomainKind::Directed, m.n as u64)?;
    if m.degree_bound > m.n {
        return Err(Error::Usage("degree promise exceeds n".into()));
    }
    let mut r = Runner::new(m, false);
    let failure = genperm_pass(&mut r, rng)?;
    Ok(r.finish(failure))
}

/// One round of the isomorphic-polynomial test: compare the machine on a
/// uniform multigraph and on a uniform relabeling of it. Members of the
/// invariant subspace always agree; others agree with probability at most
/// 1/2 + n/p.
fn isoperm_round(r: &mut Runner<'_>, rng: &mut RandomStream) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let e = DirectedMultigraph::random(n, r.m.p, rng);
    let pi = crate::perm::Permutation::random(n, rng);
    let image = crate::graphs::permute_directed(&pi, &e)?;
    let a = r.ask("isoperm-base", GraphQuery::Directed(&e))?;
    let b = r.ask("isoperm-image", GraphQuery::Directed(&image))?;
    r.rounds += 1;
    if a != b {
        return Ok(Some(FirstFailure {
            round: "isoperm".into(),
            observed: vec![a, b],
            expected: "equal values".into(),
        }));
    }
    Ok(None)
}

pub fn isoperm_test(m: &PolynomialMachine, rng: &mut RandomStream) -> Result<TestVerdict> {
    require(m, DomainKind::Directed, m.n as u64)?;
    let mut r = Runner::new(m, false);
    let failure = isoperm_round(&mut r, rng)?;
    Ok(r.finish(failure))
}

/// One round of the no-k-cycle test: a unit k-cycle on the first k
/// vertices, uniform entries among the remaining vertices, zeros on every
/// edge touching both sides. A machine weighting any cycle type with a
/// k-part answers nonzero with probability at least 1 - n/p; the
/// Hamiltonian-cycle counter (k <= n/2) always answers zero.
fn nocycle_round(
    r: &mut Runner<'_>,
    k: usize,
    rng: &mut RandomStream,
) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let p = r.m.p;
    let mut e = DirectedMultigraph::zero(n, p);
    for i in 0..k {
        e.set_entry(i, (i + 1) % k, 1);
    }
    for i in k..n {
        for j in k..n {
            e.set_entry(i, j, rng.below(p.value()));
        }
    }
    let round = format!("nocycle-{k}");
    let answer = r.ask(&round, GraphQuery::Directed(&e))?;
    r.rounds += 1;
    if answer != 0 {
        return Ok(Some(FirstFailure { round, observed: vec![answer], expected: "0".into() }));
    }
    Ok(None)
}

pub fn nocycle_test(m: &PolynomialMachine, k: usize, rng: &mut RandomStream) -> Result<TestVerdict> {
    require(m, DomainKind::Directed, m.n as u64)?;
    if k == 0 || k > m.n / 2 {
        return Err(Error::Usage("k must lie in 1..=floor(n/2)".into()));
    }
    let mut r = Runner::new(m, false);
    let failure = nocycle_round(&mut r, k, rng)?;
    Ok(r.finish(failure))
}

/// The directed identification pipeline: `repetitions` rounds of one
/// genperm pass, one isoperm round, and a no-k-cycle round for every
/// k in 1..=floor(n/2); finally the canonical unit n-cycle must evaluate to
/// exactly 1. The exact Hamiltonian-cycle counter always accepts; each
/// accepting run issues exactly repetitions*(2n + 2 + floor(n/2)) + 1
/// queries.
pub fn is_hcy_pipeline(
    m: &PolynomialMachine,
    repetitions: u64,
    rng: &mut RandomStream,
) -> Result<TestVerdict> {
    is_hcy_pipeline_recorded(m, repetitions, rng, false)
}

pub fn is_hcy_pipeline_recorded(
    m: &PolynomialMachine,
    repetitions: u64,
    rng: &mut RandomStream,
    transcript: bool,
) -> Result<TestVerdict> {
    require(m, DomainKind::Directed, m.n as u64)?;
    if m.degree_bound > m.n {
        return Err(Error::Usage("degree promise exceeds n".into()));
    }
    let n = m.n;
    let mut r = Runner::new(m, transcript);
    for _ in 0..repetitions {
        if let Some(f) = genperm_pass(&mut r, rng)? {
            return Ok(r.finish(Some(f)));
        }
        if let Some(f) = isoperm_round(&mut r, rng)? {
            return Ok(r.finish(Some(f)));
        }
        for k in 1..=n / 2 {
            if let Some(f) = nocycle_round(&mut r, k, rng)? {
                return Ok(r.finish(Some(f)));
            }
        }
    }
    // Fix the scale: exactly one Hamiltonian cycle of weight 1.
    let probe = DirectedMultigraph::unit_cycle(n, m.p);
    let answer = r.ask("final-unit-cycle", GraphQuery::Directed(&probe))?;
    r.rounds += 1;
    let failure = (answer != 1).then(|| FirstFailure {
        round: "final-unit-cycle".into(),
        observed: vec![answer],
        expected: "1".into(),
    });
    Ok(r.finish(failure))
}

// ---------------------------------------------------------------------------
// Undirected tests.
// ---------------------------------------------------------------------------

/// One round of the multilinearity probe in one edge variable: on a uniform
/// background, the finite difference M(e = a+1) - M(e = a) of a multilinear
/// machine is independent of a; compare it at two random anchors.
fn multilinear_round(
    r: &mut Runner<'_>,
    pair: (usize, usize),
    rng: &mut RandomStream,
) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let p = r.m.p;
    let pv = p.value();
    let (i, j) = pair;
    let mut f = UndirectedMultigraph::random(n, p, rng);
    let a1 = rng.below(pv);
    let a2 = rng.below(pv);
    let round = format!("multilinear-{}-{}", i + 1, j + 1);
    let probe = |r: &mut Runner<'_>, f: &mut UndirectedMultigraph, v: u64| {
        f.set_entry(i, j, v);
        r.ask(&round, GraphQuery::Undirected(f))
    };
    let at_a1 = probe(r, &mut f, a1)?;
    let at_a1p = probe(r, &mut f, (a1 + 1) % pv)?;
    let at_a2 = probe(r, &mut f, a2)?;
    let at_a2p = probe(r, &mut f, (a2 + 1) % pv)?;
    r.rounds += 1;
    let d1 = sub_mod(at_a1p, at_a1, pv);
    let d2 = sub_mod(at_a2p, at_a2, pv);
    if d1 != d2 {
        return Ok(Some(FirstFailure {
            round,
            observed: vec![d1, d2],
            expected: "equal finite differences".into(),
        }));
    }
    Ok(None)
}

pub fn multilinear_test(
    m: &PolynomialMachine,
    pair: (usize, usize),
    rng: &mut RandomStream,
) -> Result<TestVerdict> {
    require(m, DomainKind::Undirected, (m.n * (m.n - 1)) as u64)?;
    if pair.0 >= pair.1 || pair.1 >= m.n {
        return Err(Error::Usage("pair must satisfy i < j < n".into()));
    }
    let mut r = Runner::new(m, false);
    let failure = multilinear_round(&mut r, pair, rng)?;
    Ok(r.finish(failure))
}

/// Undirected analogue of the isomorphic-polynomial test.
fn isomult_round(r: &mut Runner<'_>, rng: &mut RandomStream) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let f = UndirectedMultigraph::random(n, r.m.p, rng);
    let pi = crate::perm::Permutation::random(n, rng);
    let image = crate::graphs::permute_undirected(&pi, &f)?;
    let a = r.ask("isomult-base", GraphQuery::Undirected(&f))?;
    let b = r.ask("isomult-image", GraphQuery::Undirected(&image))?;
    r.rounds += 1;
    if a != b {
        return Ok(Some(FirstFailure {
            round: "isomult".into(),
            observed: vec![a, b],
            expected: "equal values".into(),
        }));
    }
    Ok(None)
}

pub fn isomult_test(m: &PolynomialMachine, rng: &mut RandomStream) -> Result<TestVerdict> {
    require(m, DomainKind::Undirected, (m.n * (m.n - 1)) as u64)?;
    let mut r = Runner::new(m, false);
    let failure = isomult_round(&mut r, rng)?;
    Ok(r.finish(failure))
}

/// The half-clique shape probe. F1 isolates vertex 1 over a uniform rest;
/// F2 additionally gives vertex 1 unit edges to vertices 2..floor(n/2)-1,
/// leaving its degree strictly below the half-clique size minus one, so any
/// multiple of the half-clique counter cannot see the difference. A
/// differing pair rejects; then the unit half-clique must evaluate to 1.
fn is_hcl_probe_rounds(
    r: &mut Runner<'_>,
    rng: &mut RandomStream,
) -> Result<Option<FirstFailure>> {
    let n = r.m.n;
    let p = r.m.p;
    let half = n / 2;
    let mut f1 = UndirectedMultigraph::zero(n, p);
    for i in 1..n {
        for j in i + 1..n {
            f1.set_entry(i, j, rng.below(p.value()));
        }
    }
    let mut f2 = f1.clone();
    for j in 1..half.saturating_sub(1) {
        f2.set_entry(0, j, 1);
    }
    let a = r.ask("hcl-probe-isolated", GraphQuery::Undirected(&f1))?;
    let b = r.ask("hcl-probe-lowdeg", GraphQuery::Undirected(&f2))?;
    r.rounds += 1;
    if a != b {
        return Ok(Some(FirstFailure {
            round: "hcl-probe".into(),
            observed: vec![a, b],
            expected: "equal values".into(),
        }));
    }
    let probe = UndirectedMultigraph::unit_clique(n, half, p);
    let answer = r.ask("hcl-alpha-probe", GraphQuery::Undirected(&probe))?;
    r.rounds += 1;
    if answer != 1 {
        return Ok(Some(FirstFailure {
            round: "hcl-alpha-probe".into(),
            observed: vec![answer],
            expected: "1".into(),
        }));
    }
    Ok(None)
}

pub fn is_hcl_probe(m: &PolynomialMachine, rng: &mut RandomStream) -> Result<TestVerdict> {
    require(m, DomainKind::Undirected, (m.n * (m.n - 1)) as u64)?;
    if m.degree_bound > pair_count(m.n / 2) {
        return Err(Error::Usage("degree promise exceeds C(floor(n/2), 2)".into()));
    }
    let mut r = Runner::new(m, false);
    let failure = is_hcl_probe_rounds(&mut r, rng)?;
    Ok(r.finish(failure))
}

/// The undirected identification pipeline: per repetition, one
/// multilinearity round for every edge variable, one isomorphism round, and
/// the half-clique shape probe.
pub fn is_hcl_pipeline(
    m: &PolynomialMachine,
    repetitions: u64,
    rng: &mut RandomStream,
) -> Result<TestVerdict> {
    is_hcl_pipeline_recorded(m, repetitions, rng, false)
}

pub fn is_hcl_pipeline_recorded(
    m: &PolynomialMachine,
    repetitions: u64,
    rng: &mut RandomStream,
    transcript: bool,
) -> Result<TestVerdict> {
    require(m, DomainKind::Undirected, (m.n * (m.n - 1)) as u64)?;
    if m.degree_bound > pair_count(m.n / 2) {
        return Err(Error::Usage("degree promise exceeds C(floor(n/2), 2)".into()));
    }
    let mut r = Runner::new(m, transcript);
    let pairs = canonical_pairs(m.n);
    for _ in 0..repetitions {
        for &pair in &pairs {
            if let Some(f) = multilinear_round(&mut r, pair, rng)? {
                return Ok(r.finish(Some(f)));
            }
        }
        if let Some(f) = isomult_round(&mut r, rng)? {
            return Ok(r.finish(Some(f)));
        }
        if let Some(f) = is_hcl_probe_rounds(&mut r, rng)? {
            return Ok(r.finish(Some(f)));
        }
    }
    Ok(r.finish(None))
}

/// Queries an accepting directed-pipeline run issues (the poly(n) budget of
/// the directed identification test, made concrete).
pub fn hcy_pipeline_query_budget(n: usize, repetitions: u64) -> u64 {
    repetitions * (2 * n as u64 + 2 + (n / 2) as u64) + 1
}

/// Queries an accepting undirected-pipeline run issues.
pub fn hcl_pipeline_query_budget(n: usize, repetitions: u64) -> u64 {
    repetitions * (4 * pair_count(n) as u64 + 2 + 3)
}
