//! Black-box polynomial machines (the stand-in for list-decoder output)
//! and the corrupt-oracle random experiment: an oracle that answers an
//! isomorphism-invariant graph function correctly on an exact c-fraction of
//! all n-vertex simple graphs and adversarially elsewhere.

use crate::algebra::{keyed_hash, mul_mod, FieldElement, PrimeModulus, RandomStream};
use crate::counters::{
    conjugacy_class_poly_by_type, count_kcliques_simple, hcl_bruteforce, hcy_bruteforce,
    permanent_bruteforce,
};
use crate::error::{Error, Result};
use crate::graphs::{pair_count, DirectedMultigraph, SimpleGraph, UndirectedMultigraph};
use crate::perm::{binomial, CycleType};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DomainKind {
    Directed,
    Undirected,
}

/// A machine query: one multigraph of the machine's domain kind.
#[derive(Clone, Copy, Debug)]
pub enum GraphQuery<'a> {
    Directed(&'a DirectedMultigraph),
    Undirected(&'a UndirectedMultigraph),
}

#[derive(Clone, Debug)]
enum MachineKind {
    ExactHcy,
    ExactHcl,
    ExactPermanent,
    ScaledHcy(u64),
    ScaledHcl(u64),
    ConjClass(CycleType),
    /// The cycle-cover monomial of the canonical n-cycle alone: a
    /// generalized permanent that is not isomorphism-invariant.
    SingleCoverMonomial,
    /// prod_{j>=2} e(1,j): degree n-1, not a cycle-cover combination.
    RowMonomial,
    /// sum of all edge variables: isomorphism-invariant, degree 1.
    EdgeSum,
    /// e{1,2}^2: violates multilinearity.
    SquareVariable,
    /// Wraps a machine, answering wrongly on a keyed pseudorandom
    /// eps-fraction of inputs.
    Noisy(Box<PolynomialMachine>, f64, u64),
}

/// A deterministic black box evaluating a polynomial over Z_p in the edge
/// variables, carrying a total-degree promise. The identification tests are
/// sound only under that promise.
#[derive(Clone, Debug)]
pub struct PolynomialMachine {
    pub domain_kind: DomainKind,
    pub n: usize,
    pub p: PrimeModulus,
    pub degree_bound: usize,
    pub label: String,
    kind: MachineKind,
}

impl PolynomialMachine {
    pub fn evaluate(&self, q: GraphQuery<'_>) -> Result<FieldElement> {
        match (q, self.domain_kind) {
            (GraphQuery::Directed(e), DomainKind::Directed) => {
                if e.n() != self.n || e.modulus() != self.p {
                    return Err(Error::Usage("query size or modulus mismatch".into()));
                }
                self.eval_directed(e)
            }
            (GraphQuery::Undirected(f), DomainKind::Undirected) => {
                if f.n() != self.n || f.modulus() != self.p {
                    return Err(Error::Usage("query size or modulus mismatch".into()));
                }
                self.eval_undirected(f)
            }
            _ => Err(Error::Usage("wrong domain kind for this machine".into())),
        }
    }

    fn eval_directed(&self, e: &DirectedMultigraph) -> Result<FieldElement> {
        let p = self.p.value();
        match &self.kind {
            MachineKind::ExactHcy => hcy_bruteforce(e),
            MachineKind::ExactPermanent => permanent_bruteforce(e),
            MachineKind::ScaledHcy(alpha) => {
                let v = hcy_bruteforce(e)?;
                Ok(self.p.element(mul_mod(v.value(), *alpha, p)))
            }
            MachineKind::ConjClass(t) => conjugacy_class_poly_by_type(t, e),
            MachineKind::SingleCoverMonomial => {
                let mut prod = 1 % p;
                for i in 0..self.n {
                    prod = mul_mod(prod, e.entry(i, (i + 1) % self.n), p);
                    if prod == 0 {
                        break;
                    }
                }
                Ok(self.p.element(prod))
            }
            MachineKind::RowMonomial => {
                let mut prod = 1 % p;
                for j in 1..self.n {
                    prod = mul_mod(prod, e.entry(0, j), p);
                    if prod == 0 {
                        break;
                    }
                }
                Ok(self.p.element(prod))
            }
            MachineKind::Noisy(inner, eps, key) => {
                let base = inner.eval_directed(e)?;
                Ok(self.noisy_adjust(base, hash_entries(*key, e.entries()), *eps))
            }
            _ => Err(Error::Internal("undirected kind on directed domain".into())),
        }
    }

    fn eval_undirected(&self, f: &UndirectedMultigraph) -> Result<FieldElement> {
        let p = self.p.value();
        match &self.kind {
            MachineKind::ExactHcl => hcl_bruteforce(f),
            MachineKind::ScaledHcl(alpha) => {
                let v = hcl_bruteforce(f)?;
                Ok(self.p.element(mul_mod(v.value(), *alpha, p)))
            }
            MachineKind::EdgeSum => {
                let mut acc = 0u64;
                for &e in f.entries() {
                    acc = crate::algebra::add_mod(acc, e, p);
                }
                Ok(self.p.element(acc))
            }
            MachineKind::SquareVariable => {
                let e = f.entry(0, 1);
                Ok(self.p.element(mul_mod(e, e, p)))
            }
            MachineKind::Noisy(inner, eps, key) => {
                let base = inner.eval_undirected(f)?;
                Ok(self.noisy_adjust(base, hash_entries(*key, f.entries()), *eps))
            }
            _ => Err(Error::Internal("directed kind on undirected domain".into())),
        }
    }

    fn noisy_adjust(&self, base: FieldElement, h: u64, eps: f64) -> FieldElement {
        if (h as f64) < eps * (u64::MAX as f64) {
            // Deterministically wrong: shift by a keyed nonzero offset.
            let p = self.p.value();
            let offset = 1 + keyed_hash(h, 1) % (p - 1);
            self.p.element(crate::algebra::add_mod(base.value(), offset, p))
        } else {
            base
        }
    }
}

fn hash_entries(key: u64, entries: &[u64]) -> u64 {
    let mut acc = keyed_hash(key, entries.len() as u64);
    for &e in entries {
        acc = keyed_hash(acc, e);
    }
    acc
}

/// Build a catalog machine from its textual name. Parameterized kinds use
/// `:`-separated arguments, e.g. `scaled_hcy:2`, `conj_class:2+4`,
/// `noisy:exact_hcl:0.01:7`.
pub fn machine_catalog(kind: &str, n: usize, p: PrimeModulus) -> Result<PolynomialMachine> {
    let parts: Vec<&str> = kind.split(':').collect();
    let half = n / 2;
    let (mk, domain, degree) = match parts[0] {
        "exact_hcy" => (MachineKind::ExactHcy, DomainKind::Directed, n),
        "exact_hcl" => (MachineKind::ExactHcl, DomainKind::Undirected, pair_count(half)),
        "exact_permanent" => (MachineKind::ExactPermanent, DomainKind::Directed, n),
        "scaled_hcy" => {
            let alpha = parse_arg::<u64>(&parts, 1, "alpha")? % p.value();
            (MachineKind::ScaledHcy(alpha), DomainKind::Directed, n)
        }
        "scaled_hcl" => {
            let alpha = parse_arg::<u64>(&parts, 1, "alpha")? % p.value();
            (MachineKind::ScaledHcl(alpha), DomainKind::Undirected, pair_count(half))
        }
        "conj_class" => {
            let t: CycleType = parts
                .get(1)
                .ok_or_else(|| Error::Usage("conj_class needs a cycle type".into()))?
                .parse()?;
            if t.n() != n {
                return Err(Error::Usage("cycle type does not sum to n".into()));
            }
            (MachineKind::ConjClass(t), DomainKind::Directed, n)
        }
        "single_cover_monomial" => (MachineKind::SingleCoverMonomial, DomainKind::Directed, n),
        "row_monomial" => (MachineKind::RowMonomial, DomainKind::Directed, n - 1),
        "edge_sum" => (MachineKind::EdgeSum, DomainKind::Undirected, 1),
        "square_variable" => (MachineKind::SquareVariable, DomainKind::Undirected, 2),
        "noisy" => {
            let inner_kind = parts
                .get(1)
                .ok_or_else(|| Error::Usage("noisy needs an inner machine".into()))?;
            let eps = parse_arg::<f64>(&parts, 2, "epsilon")?;
            let key = parse_arg::<u64>(&parts, 3, "key")?;
            let inner = machine_catalog(inner_kind, n, p)?;
            let (domain, degree) = (inner.domain_kind, inner.degree_bound);
            (MachineKind::Noisy(Box::new(inner), eps, key), domain, degree)
        }
        other => return Err(Error::Usage(format!("unknown machine kind {other:?}"))),
    };
    Ok(PolynomialMachine { domain_kind: domain, n, p, degree_bound: degree, label: kind.to_string(), kind: mk })
}

// ---------------------------------------------------------------------------
// Ground-truth graph functions for the oracle experiments.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TruthKind {
    KCliqueCount(usize),
    KCliqueParity(usize),
    /// 1 iff the graph has a clique of size floor(n/2).
    HalfCliqueIndicator,
    ConstantZero,
}

/// A total function on n-vertex simple graphs, flagged (and tested) as
/// isomorphism-invariant.
#[derive(Clone, Debug)]
pub struct GroundTruthFunction {
    pub kind: TruthKind,
    pub name: String,
    pub isomorphism_invariant: bool,
}

impl GroundTruthFunction {
    pub fn new(kind: TruthKind) -> Self {
        let name = match kind {
            TruthKind::KCliqueCount(k) => format!("kclique-count-{k}"),
            TruthKind::KCliqueParity(k) => format!("kclique-parity-{k}"),
            TruthKind::HalfCliqueIndicator => "half-clique-indicator".into(),
            TruthKind::ConstantZero => "constant-zero".into(),
        };
        GroundTruthFunction { kind, name, isomorphism_invariant: true }
    }

    pub fn eval(&self, u: &SimpleGraph) -> u64 {
        match self.kind {
            TruthKind::KCliqueCount(k) => count_kcliques_simple(u, k),
            TruthKind::KCliqueParity(k) => count_kcliques_simple(u, k) & 1,
            TruthKind::HalfCliqueIndicator => {
                u64::from(crate::counters::has_kclique(u, u.n() / 2))
            }
            TruthKind::ConstantZero => 0,
        }
    }

    /// Number of possible output values on n-vertex graphs.
    pub fn codomain_size(&self, n: usize) -> u64 {
        match self.kind {
            TruthKind::KCliqueCount(k) => binomial(n, k) + 1,
            TruthKind::KCliqueParity(_) | TruthKind::HalfCliqueIndicator => 2,
            TruthKind::ConstantZero => 1,
        }
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.kind, TruthKind::KCliqueParity(_) | TruthKind::HalfCliqueIndicator)
    }

    /// The finisher: derive this function's value from a k-clique count,
    /// when the function is determined by it.
    pub fn from_kclique_count(&self, k: usize, n: usize, count: u64) -> Option<u64> {
        match self.kind {
            TruthKind::KCliqueCount(want) if want == k => Some(count),
            TruthKind::KCliqueParity(want) if want == k => Some(count & 1),
            TruthKind::HalfCliqueIndicator if k == n / 2 => Some(u64::from(count > 0)),
            TruthKind::ConstantZero => Some(0),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// The corrupt oracle.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum OracleMode {
    /// The exact fixed-size model: a uniform subset of exactly
    /// round(c * 2^C(n,2)) correct indices, stored as a bit table (n <= 8).
    ExactTable,
    /// Keyed pseudorandom approximation with Bernoulli(c) marginals for
    /// larger n — a documented deviation from the fixed-size model.
    KeyedPrf,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CorruptionStrategy {
    /// Boolean functions only: answer 1 - truth.
    Flip,
    /// Uniform over wrong values, derandomized per index by the key.
    RandomWrong,
    /// Always answer 0.
    Zero,
    /// Corruption budget spent on the smallest isomorphism classes first
    /// (whole classes while they fit), remainder spread uniformly.
    ClassTargeted,
}

impl CorruptionStrategy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "flip" => Ok(CorruptionStrategy::Flip),
            "random-wrong" => Ok(CorruptionStrategy::RandomWrong),
            "zero" => Ok(CorruptionStrategy::Zero),
            "class-targeted" => Ok(CorruptionStrategy::ClassTargeted),
            other => Err(Error::Usage(format!("unknown strategy {other:?}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CorruptionStrategy::Flip => "flip",
            CorruptionStrategy::RandomWrong => "random-wrong",
            CorruptionStrategy::Zero => "zero",
            CorruptionStrategy::ClassTargeted => "class-targeted",
        }
    }
}

#[derive(Clone, Debug)]
enum CorrectSet {
    Table(Vec<u64>),
    Prf { threshold: u64 },
}

/// A sampled instance of the corrupt-oracle experiment. Immutable after
/// sampling; identical queries always return identical answers.
#[derive(Clone, Debug)]
pub struct CorruptOracle {
    h: GroundTruthFunction,
    n: usize,
    c: f64,
    mode: OracleMode,
    strategy: CorruptionStrategy,
    seed: u64,
    stream_id: u64,
    key: u64,
    correct: CorrectSet,
}

pub const EXACT_TABLE_PAIR_LIMIT: usize = 28;
/// Class-targeted placement needs the full class partition in memory.
pub const CLASS_TARGETED_LIMIT: usize = 7;

pub fn sample_corrupt_oracle(
    h: GroundTruthFunction,
    n: usize,
    c: f64,
    mode: OracleMode,
    strategy: CorruptionStrategy,
    rng: &mut RandomStream,
) -> Result<CorruptOracle> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Usage("c must lie in (0, 1]".into()));
    }
    if strategy == CorruptionStrategy::Flip && !h.is_boolean() {
        return Err(Error::Usage("flip strategy needs a boolean ground truth".into()));
    }
    let (seed, stream_id) = (rng.seed(), rng.stream_id());
    let key = rng.next_u64();
    let correct = match mode {
        OracleMode::KeyedPrf => {
            if strategy == CorruptionStrategy::ClassTargeted {
                return Err(Error::Usage("class-targeted requires the exact-table mode".into()));
            }
            if pair_count(n) > 64 {
                return Err(Error::Capability(
                    "keyed oracles index graphs by a 64-bit code, so C(n,2) <= 64".into(),
                ));
            }
            CorrectSet::Prf { threshold: (c * u64::MAX as f64) as u64 }
        }
        OracleMode::ExactTable => {
            let m = pair_count(n);
            if m > EXACT_TABLE_PAIR_LIMIT {
                return Err(Error::Capability(format!(
                    "exact table limited to C(n,2) <= {EXACT_TABLE_PAIR_LIMIT}"
                )));
            }
            let total: u64 = 1 << m;
            let target = (c * total as f64).round() as u64;
            let mut table = vec![0u64; (total as usize + 63) / 64];
            match strategy {
                CorruptionStrategy::ClassTargeted => {
                    if n > CLASS_TARGETED_LIMIT {
                        return Err(Error::Capability(format!(
                            "class-targeted placement limited to n <= {CLASS_TARGETED_LIMIT}"
                        )));
                    }
                    fill_class_targeted(&mut table, n, total, total - target, rng)?;
                }
                _ => fill_uniform_exact(&mut table, total, target, rng),
            }
            CorrectSet::Table(table)
        }
    };
    Ok(CorruptOracle { h, n, c, mode, strategy, seed, stream_id, key, correct })
}

/// Sequential sampling: walk the index space once, keeping each index with
/// probability (needed remaining)/(indices remaining) — a uniform exact-size
/// subset.
fn fill_uniform_exact(table: &mut [u64], total: u64, target: u64, rng: &mut RandomStream) {
    let mut needed = target;
    for idx in 0..total {
        let remaining = total - idx;
        if needed > 0 && rng.below(remaining) < needed {
            table[(idx / 64) as usize] |= 1 << (idx % 64);
            needed -= 1;
        }
    }
}

/// Corrupt whole isomorphism classes smallest-first while the budget lasts,
/// then spread the remaining corruption uniformly over the rest.
fn fill_class_targeted(
    table: &mut [u64],
    n: usize,
    total: u64,
    budget: u64,
    rng: &mut RandomStream,
) -> Result<()> {
    let partition = graph_class_partition(n)?;
    let mut order: Vec<usize> = (0..partition.class_sizes.len()).collect();
    order.sort_by_key(|&cid| (partition.class_sizes[cid], partition.representative[cid]));
    let mut corrupt = vec![false; total as usize];
    let mut remaining_budget = budget;
    let mut fully = vec![false; partition.class_sizes.len()];
    for &cid in &order {
        let size = partition.class_sizes[cid];
        if size > remaining_budget {
            break;
        }
        fully[cid] = true;
        remaining_budget -= size;
    }
    let mut candidates = 0u64;
    for idx in 0..total as usize {
        if fully[partition.class_of[idx] as usize] {
            corrupt[idx] = true;
        } else {
            candidates += 1;
        }
    }
    // Spread what is left uniformly over the untargeted indices.
    let mut needed = remaining_budget;
    let mut remaining = candidates;
    for idx in 0..total as usize {
        if corrupt[idx] {
            continue;
        }
        if needed > 0 && rng.below(remaining) < needed {
            corrupt[idx] = true;
            needed -= 1;
        }
        remaining -= 1;
    }
    for (idx, &bad) in corrupt.iter().enumerate() {
        if !bad {
            table[idx / 64] |= 1 << (idx % 64);
        }
    }
    Ok(())
}

impl CorruptOracle {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ground_truth(&self) -> &GroundTruthFunction {
        &self.h
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn strategy(&self) -> CorruptionStrategy {
        self.strategy
    }

    pub fn is_index_correct(&self, index: u64) -> bool {
        match &self.correct {
            CorrectSet::Table(t) => t[(index / 64) as usize] >> (index % 64) & 1 == 1,
            CorrectSet::Prf { threshold } => keyed_hash(self.key, index) < *threshold,
        }
    }

    pub fn query(&self, u: &SimpleGraph) -> Result<u64> {
        if u.n() != self.n {
            return Err(Error::Usage("query size mismatch".into()));
        }
        let index = u.index_code();
        let truth = self.h.eval(u);
        if self.is_index_correct(index) {
            return Ok(truth);
        }
        Ok(match self.strategy {
            CorruptionStrategy::Flip => 1 - truth,
            CorruptionStrategy::Zero => 0,
            CorruptionStrategy::RandomWrong | CorruptionStrategy::ClassTargeted => {
                let codomain = self.h.codomain_size(self.n);
                if codomain <= 1 {
                    0
                } else {
                    let w = keyed_hash(self.key ^ 0x5151_5151, index) % (codomain - 1);
                    if w >= truth {
                        w + 1
                    } else {
                        w
                    }
                }
            }
        })
    }

    /// Does the oracle return the true value on this graph (whether by
    /// membership in the correct set or by coincidence)?
    pub fn is_correct_on(&self, u: &SimpleGraph) -> Result<bool> {
        Ok(self.query(u)? == self.h.eval(u))
    }

    /// Fraction of U's isomorphism class answered correctly.
    pub fn per_class_correctness(&self, u: &SimpleGraph) -> Result<f64> {
        let class = crate::graphs::isomorphism_class(u)?;
        let mut good = 0usize;
        for member in &class {
            if self.is_correct_on(member)? {
                good += 1;
            }
        }
        Ok(good as f64 / class.len() as f64)
    }

    pub fn snapshot(&self) -> OracleSnapshot {
        OracleSnapshot {
            mode: self.mode,
            strategy: self.strategy,
            c: self.c,
            n: self.n,
            seed: self.seed,
            stream_id: self.stream_id,
            h: self.h.name.clone(),
            truth_kind: self.h.kind,
        }
    }
}

/// Serializable description; the table is reconstructed from the seed,
/// never stored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSnapshot {
    pub mode: OracleMode,
    pub strategy: CorruptionStrategy,
    pub c: f64,
    pub n: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub h: String,
    pub truth_kind: TruthKind,
}

pub fn restore_oracle(snap: &OracleSnapshot) -> Result<CorruptOracle> {
    let mut rng = RandomStream::new(snap.seed, snap.stream_id);
    sample_corrupt_oracle(
        GroundTruthFunction::new(snap.truth_kind),
        snap.n,
        snap.c,
        snap.mode,
        snap.strategy,
        &mut rng,
    )
}

// ---------------------------------------------------------------------------
// Exact isomorphism-class partition of the whole index space.
// ---------------------------------------------------------------------------

/// The partition of all 2^C(n,2) simple-graph indices into isomorphism
/// classes, via union-find under the adjacent-transposition generators.
pub struct ClassPartition {
    pub n: usize,
    /// Class id of every index.
    pub class_of: Vec<u32>,
    pub class_sizes: Vec<u64>,
    /// Smallest index in each class (a canonical representative).
    pub representative: Vec<u64>,
}

pub fn graph_class_partition(n: usize) -> Result<ClassPartition> {
    let m = pair_count(n);
    if n > CLASS_TARGETED_LIMIT {
        return Err(Error::Capability(format!(
            "full class partition limited to n <= {CLASS_TARGETED_LIMIT}"
        )));
    }
    let total = 1usize << m;
    // Bit-position permutation induced by each adjacent transposition.
    let pairs = crate::graphs::canonical_pairs(n);
    let mut generators: Vec<Vec<usize>> = Vec::with_capacity(n.saturating_sub(1));
    for g in 0..n.saturating_sub(1) {
        let swap = |v: usize| {
            if v == g {
                g + 1
            } else if v == g + 1 {
                g
            } else {
                v
            }
        };
        let mapping: Vec<usize> = pairs
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (swap(i), swap(j));
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                crate::graphs::pair_index(n, a, b)
            })
            .collect();
        generators.push(mapping);
    }
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for idx in 0..total {
        for mapping in &generators {
            let mut image = 0usize;
            for (l, &target) in mapping.iter().enumerate() {
                image |= (idx >> l & 1) << target;
            }
            let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, image as u32));
            if a != b {
                // Union by value keeps the smallest index as the root.
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut class_index: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
    let mut class_of = vec![0u32; total];
    let mut class_sizes = Vec::new();
    let mut representative = Vec::new();
    for idx in 0..total {
        let root = find(&mut parent, idx as u32);
        let cid = *class_index.entry(root).or_insert_with(|| {
            class_sizes.push(0u64);
            representative.push(root as u64);
            (class_sizes.len() - 1) as u32
        });
        class_of[idx] = cid;
        class_sizes[cid as usize] += 1;
    }
    Ok(ClassPartition { n, class_of, class_sizes, representative })
}

fn parse_arg<T: std::str::FromStr>(parts: &[&str], pos: usize, name: &str) -> Result<T> {
    parts
        .get(pos)
        .ok_or_else(|| Error::Usage(format!("missing argument {name}")))?
        .parse::<T>()
        .map_err(|_| Error::Usage(format!("bad argument {name}")))
}
