//! The three graph encodings (simple graphs, directed and undirected
//! multigraphs over Z_p), the S_n action on them, automorphism machinery,
//! the automorphism-size test, and the JSON file format.

use crate::algebra::{FieldElement, PrimeModulus, RandomStream};
use crate::error::{Error, Result};
use crate::perm::{visit_permutations, Permutation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::ControlFlow;

/// Canonical pair order: pairs (i,j), 0 <= i < j < n, lexicographic;
/// index(0,1)=0 .. index(n-2,n-1)=C(n,2)-1. This order is bit-exact across
/// the oracle table and the file formats.
#[inline(always)]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

#[inline(always)]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// All pairs in canonical order.
pub fn canonical_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// An n-vertex simple graph as C(n,2) bits in canonical pair order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimpleGraph {
    n: usize,
    bits: Vec<bool>,
}

impl SimpleGraph {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != pair_count(n) {
            return Err(Error::Usage("bit length must be C(n,2)".into()));
        }
        Ok(SimpleGraph { n, bits })
    }

    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, bits: vec![false; pair_count(n)] }
    }

    pub fn complete(n: usize) -> Self {
        SimpleGraph { n, bits: vec![true; pair_count(n)] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SimpleGraph::empty(n);
        for &(i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::Usage(format!("bad edge ({i},{j})")));
            }
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Uniform over all 2^C(n,2) graphs.
    pub fn random(n: usize, rng: &mut RandomStream) -> Self {
        let bits = (0..pair_count(n)).map(|_| rng.next_u64() & 1 == 1).collect();
        SimpleGraph { n, bits }
    }

    /// Graph with the given table index (bit l of `code` is pair l).
    pub fn from_index_code(n: usize, code: u64) -> Self {
        let bits = (0..pair_count(n)).map(|l| code >> l & 1 == 1).collect();
        SimpleGraph { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline(always)]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.bits[pair_index(self.n, i, j)]
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.bits[pair_index(self.n, i, j)] = present;
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for (l, &(i, j)) in canonical_pairs(self.n).iter().enumerate() {
            if self.bits[l] {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
        deg
    }

    /// The bit sequence as a table index; requires C(n,2) <= 64 (n <= 11).
    pub fn index_code(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        let mut code = 0u64;
        for (l, &b) in self.bits.iter().enumerate() {
            if b {
                code |= 1 << l;
            }
        }
        code
    }

    pub fn complement(&self) -> SimpleGraph {
        SimpleGraph { n: self.n, bits: self.bits.iter().map(|&b| !b).collect() }
    }

    /// Vertices 0..k-1 pairwise adjacent?
    pub fn first_k_clique(&self, k: usize) -> bool {
        for i in 0..k {
            for j in i + 1..k {
                if !self.has_edge(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// The entry-relabeling action: output entry at (i,j) equals input entry at
/// (pi(i), pi(j)). Shared by all three graph kinds.
pub fn permute_simple(pi: &Permutation, g: &SimpleGraph) -> Result<SimpleGraph> {
    if pi.n() != g.n {
        return Err(Error::Usage("permutation/graph size mismatch".into()));
    }
    let n = g.n;
    let mut bits = vec![false; pair_count(n)];
    for (l, &(i, j)) in canonical_pairs(n).iter().enumerate() {
        bits[l] = g.has_edge(pi.apply(i), pi.apply(j));
    }
    Ok(SimpleGraph { n, bits })
}

/// An n-vertex directed multigraph over Z_p: n^2 entries in row-major
/// order, diagonal included.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirectedMultigraph {
    n: usize,
    p: PrimeModulus,
    entries: Vec<u64>, // all < p
}

impl DirectedMultigraph {
    pub fn zero(n: usize, p: PrimeModulus) -> Self {
        DirectedMultigraph { n, p, entries: vec![0; n * n] }
    }

    pub fn new(n: usize, p: PrimeModulus, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Usage("entry length must be n^2".into()));
        }
        if entries.iter().any(|&e| e >= p.value()) {
            return Err(Error::Usage("entry out of range [0, p)".into()));
        }
        Ok(DirectedMultigraph { n, p, entries })
    }

    pub fn random(n: usize, p: PrimeModulus, rng: &mut RandomStream) -> Self {
        let entries = (0..n * n).map(|_| rng.below(p.value())).collect();
        DirectedMultigraph { n, p, entries }
    }

    /// Unit-weight canonical n-cycle: e(i, i+1 mod n) = 1.
    pub fn unit_cycle(n: usize, p: PrimeModulus) -> Self {
        let mut g = DirectedMultigraph::zero(n, p);
        for i in 0..n {
            g.set_entry(i, (i + 1) % n, 1);
        }
        g
    }

    /// Unit-weight complete digraph (all off-diagonal entries 1).
    pub fn unit_complete(n: usize, p: PrimeModulus) -> Self {
        let mut g = DirectedMultigraph::zero(n, p);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.set_entry(i, j, 1);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline(always)]
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn entry_element(&self, i: usize, j: usize) -> FieldElement {
        self.p.element(self.entry(i, j))
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v % self.p.value();
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }
}

pub fn permute_directed(pi: &Permutation, g: &DirectedMultigraph) -> Result<DirectedMultigraph> {
    if pi.n() != g.n {
        return Err(Error::Usage("permutation/graph size mismatch".into()));
    }
    let n = g.n;
    let mut entries = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = g.entry(pi.apply(i), pi.apply(j));
        }
    }
    Ok(DirectedMultigraph { n, p: g.p, entries })
}

/// An n-vertex undirected multigraph over Z_p: C(n,2) entries in canonical
/// pair order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UndirectedMultigraph {
    n: usize,
    p: PrimeModulus,
    entries: Vec<u64>,
}

impl UndirectedMultigraph {
    pub fn zero(n: usize, p: PrimeModulus) -> Self {
        UndirectedMultigraph { n, p, entries: vec![0; pair_count(n)] }
    }

    pub fn new(n: usize, p: PrimeModulus, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != pair_count(n) {
            return Err(Error::Usage("entry length must be C(n,2)".into()));
        }
        if entries.iter().any(|&e| e >= p.value()) {
            return Err(Error::Usage("entry out of range [0, p)".into()));
        }
        Ok(UndirectedMultigraph { n, p, entries })
    }

    pub fn random(n: usize, p: PrimeModulus, rng: &mut RandomStream) -> Self {
        let entries = (0..pair_count(n)).map(|_| rng.below(p.value())).collect();
        UndirectedMultigraph { n, p, entries }
    }

    /// Unit-weight complete graph K_n.
    pub fn unit_complete(n: usize, p: PrimeModulus) -> Self {
        UndirectedMultigraph { n, p, entries: vec![1 % p.value(); pair_count(n)] }
    }

    /// Unit-weight K_k on vertices 0..k-1, all other entries zero.
    pub fn unit_clique(n: usize, k: usize, p: PrimeModulus) -> Self {
        let mut g = UndirectedMultigraph::zero(n, p);
        for i in 0..k {
            for j in i + 1..k {
                g.set_entry(i, j, 1);
            }
        }
        g
    }

    /// Unit weights on the edges of a simple graph.
    pub fn from_simple(u: &SimpleGraph, p: PrimeModulus) -> Self {
        let entries = u.bits().iter().map(|&b| u64::from(b) % p.value()).collect();
        UndirectedMultigraph { n: u.n(), p, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline(always)]
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.entries[pair_index(self.n, i, j)]
    }

    pub fn entry_element(&self, i: usize, j: usize) -> FieldElement {
        self.p.element(self.entry(i, j))
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: u64) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.entries[pair_index(self.n, i, j)] = v % self.p.value();
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }
}

pub fn permute_undirected(
    pi: &Permutation,
    g: &UndirectedMultigraph,
) -> Result<UndirectedMultigraph> {
    if pi.n() != g.n {
        return Err(Error::Usage("permutation/graph size mismatch".into()));
    }
    let n = g.n;
    let mut entries = vec![0u64; pair_count(n)];
    for (l, &(i, j)) in canonical_pairs(n).iter().enumerate() {
        entries[l] = g.entry(pi.apply(i), pi.apply(j));
    }
    Ok(UndirectedMultigraph { n, p: g.p, entries })
}

const AUT_ENUM_LIMIT: usize = 10;

/// |Aut(U)| by enumerating S_n; the independent oracle everything else is
/// checked against.
pub fn automorphism_order(u: &SimpleGraph) -> Result<u64> {
    let n = u.n();
    if n > AUT_ENUM_LIMIT {
        return Err(Error::Capability(format!("automorphism enumeration capped at n = {AUT_ENUM_LIMIT}")));
    }
    let pairs = canonical_pairs(n);
    let mut count = 0u64;
    let _ = visit_permutations(n, |map| {
        let fixes = pairs
            .iter()
            .enumerate()
            .all(|(l, &(i, j))| u.bits()[l] == u.has_edge(map[i], map[j]));
        if fixes {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Does U have any non-identity automorphism? Early-exits, so much faster
/// than counting when the answer is yes.
pub fn is_rigid(u: &SimpleGraph) -> Result<bool> {
    let n = u.n();
    if n > AUT_ENUM_LIMIT {
        return Err(Error::Capability(format!("automorphism enumeration capped at n = {AUT_ENUM_LIMIT}")));
    }
    let pairs = canonical_pairs(n);
    let identity: Vec<usize> = (0..n).collect();
    let found = visit_permutations(n, |map| {
        if map == identity.as_slice() {
            return ControlFlow::Continue(());
        }
        let fixes = pairs
            .iter()
            .enumerate()
            .all(|(l, &(i, j))| u.bits()[l] == u.has_edge(map[i], map[j]));
        if fixes {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found.is_continue())
}

const CLASS_ENUM_LIMIT: usize = 8;

/// The isomorphism class (orbit) of U: all distinct images under S_n.
pub fn isomorphism_class(u: &SimpleGraph) -> Result<Vec<SimpleGraph>> {
    let n = u.n();
    if n > CLASS_ENUM_LIMIT {
        return Err(Error::Capability(format!("orbit enumeration capped at n = {CLASS_ENUM_LIMIT}")));
    }
    let pairs = canonical_pairs(n);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut class = Vec::new();
    let _ = visit_permutations(n, |map| {
        let mut code = 0u64;
        for (l, &(i, j)) in pairs.iter().enumerate() {
            if u.has_edge(map[i], map[j]) {
                code |= 1 << l;
            }
        }
        if seen.insert(code) {
            class.push(SimpleGraph::from_index_code(n, code));
        }
        ControlFlow::Continue(())
    });
    Ok(class)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
}

/// The automorphism-size test: draw t*n uniform permutations, count the
/// fixed-point events pi(U) = U, and ACCEPT iff the count reaches n/2.
/// Large automorphism groups (|Aut| >= n!/t) are accepted w.h.p.; small
/// ones (|Aut| <= n!/t^{1+alpha}) are rejected w.h.p.; the gray zone may go
/// either way.
pub fn aut_size_test(u: &SimpleGraph, t: u64, rng: &mut RandomStream) -> Verdict {
    let n = u.n();
    let draws = t.saturating_mul(n as u64);
    let mut fixed = 0u64;
    for _ in 0..draws {
        let pi = Permutation::random(n, rng);
        let image = permute_simple(&pi, u).expect("sizes match");
        if image == *u {
            fixed += 1;
        }
    }
    if 2 * fixed >= n as u64 {
        Verdict::Accept
    } else {
        Verdict::Reject
    }
}

/// Fraction of uniformly sampled n-vertex graphs with trivial automorphism
/// group.
pub fn empirical_rigidity(n: usize, samples: u64, rng: &RandomStream) -> Result<f64> {
    if n > AUT_ENUM_LIMIT {
        return Err(Error::Capability(format!("rigidity sampling capped at n = {AUT_ENUM_LIMIT}")));
    }
    let rigid: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut sub = rng.substream(i);
            let g = SimpleGraph::random(n, &mut sub);
            u64::from(is_rigid(&g).expect("within cap"))
        })
        .sum();
    Ok(rigid as f64 / samples as f64)
}

// ---------------------------------------------------------------------------
// JSON file format.
// {"kind": "simple"|"directed-multi"|"undirected-multi", "n": int,
//  "p": int (absent for simple), "edges": [[i, j, w], ...]}
// 1-based vertices, w omitted for simple graphs; unlisted entries are 0.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphFile {
    kind: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    edges: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub enum AnyGraph {
    Simple(SimpleGraph),
    Directed(DirectedMultigraph),
    Undirected(UndirectedMultigraph),
}

pub fn graph_from_json(text: &str) -> Result<AnyGraph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("bad graph file: {e}")))?;
    let n = file.n;
    match file.kind.as_str() {
        "simple" => {
            let mut g = SimpleGraph::empty(n);
            for e in &file.edges {
                let [i, j] = parse_edge(e, false, n)?;
                g.set_edge(i, j, true);
            }
            Ok(AnyGraph::Simple(g))
        }
        "directed-multi" => {
            let p = modulus_of(&file)?;
            let mut g = DirectedMultigraph::zero(n, p);
            for e in &file.edges {
                let ([i, j], w) = parse_weighted_edge(e, true, n, p)?;
                g.set_entry(i, j, w);
            }
            Ok(AnyGraph::Directed(g))
        }
        "undirected-multi" => {
            let p = modulus_of(&file)?;
            let mut g = UndirectedMultigraph::zero(n, p);
            for e in &file.edges {
                let ([i, j], w) = parse_weighted_edge(e, false, n, p)?;
                g.set_entry(i, j, w);
            }
            Ok(AnyGraph::Undirected(g))
        }
        other => Err(Error::Usage(format!("unknown graph kind {other:?}"))),
    }
}

fn modulus_of(file: &GraphFile) -> Result<PrimeModulus> {
    let p = file.p.ok_or_else(|| Error::Usage("multigraph file needs p".into()))?;
    PrimeModulus::new(p)
}

fn parse_edge(e: &[u64], allow_loop: bool, n: usize) -> Result<[usize; 2]> {
    if e.len() != 2 {
        return Err(Error::Usage("simple edge must be [i, j]".into()));
    }
    convert_endpoints(e[0], e[1], allow_loop, n)
}

fn parse_weighted_edge(e: &[u64], allow_loop: bool, n: usize, p: PrimeModulus) -> Result<([usize; 2], u64)> {
    let (ends, w) = match e.len() {
        2 => (convert_endpoints(e[0], e[1], allow_loop, n)?, 1),
        3 => (convert_endpoints(e[0], e[1], allow_loop, n)?, e[2]),
        _ => return Err(Error::Usage("edge must be [i, j] or [i, j, w]".into())),
    };
    if w >= p.value() {
        return Err(Error::Usage(format!("weight {w} not in [0, p)")));
    }
    Ok((ends, w))
}

fn convert_endpoints(i: u64, j: u64, allow_loop: bool, n: usize) -> Result<[usize; 2]> {
    let (i, j) = (i as usize, j as usize);
    if i < 1 || j < 1 || i > n || j > n || (!allow_loop && i == j) {
        return Err(Error::Usage(format!("bad endpoints ({i},{j}) for n={n}")));
    }
    Ok([i - 1, j - 1])
}

pub fn graph_to_json(g: &AnyGraph) -> String {
    let file = match g {
        AnyGraph::Simple(u) => GraphFile {
            kind: "simple".into(),
            n: u.n(),
            p: None,
            edges: canonical_pairs(u.n())
                .iter()
                .enumerate()
                .filter(|(l, _)| u.bits()[*l])
                .map(|(_, &(i, j))| vec![i as u64 + 1, j as u64 + 1])
                .collect(),
        },
        AnyGraph::Directed(d) => GraphFile {
            kind: "directed-multi".into(),
            n: d.n(),
            p: Some(d.modulus().value()),
            edges: (0..d.n())
                .flat_map(|i| (0..d.n()).map(move |j| (i, j)))
                .filter(|&(i, j)| d.entry(i, j) != 0)
                .map(|(i, j)| vec![i as u64 + 1, j as u64 + 1, d.entry(i, j)])
                .collect(),
        },
        AnyGraph::Undirected(f) => GraphFile {
            kind: "undirected-multi".into(),
            n: f.n(),
            p: Some(f.modulus().value()),
            edges: canonical_pairs(f.n())
                .iter()
                .filter(|&&(i, j)| f.entry(i, j) != 0)
                .map(|&(i, j)| vec![i as u64 + 1, j as u64 + 1, f.entry(i, j)])
                .collect(),
        },
    };
    serde_json::to_string_pretty(&file).expect("serialization cannot fail")
}
