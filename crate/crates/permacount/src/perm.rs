//! Elements of S_n, cycle types (conjugacy-class labels), and exhaustive
//! permutation enumeration used by the brute-force oracles.

use crate::algebra::RandomStream;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

/// A bijection on {0, .., n-1}. The public file formats are 1-based; the
/// in-memory representation is 0-based throughout.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::Usage("not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    /// Uniform over S_n (Fisher-Yates with unbiased draws).
    pub fn random(n: usize, rng: &mut RandomStream) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            map.swap(i, j);
        }
        Permutation { map }
    }

    /// The canonical n-cycle 0 -> 1 -> ... -> n-1 -> 0.
    pub fn canonical_cycle(n: usize) -> Self {
        Permutation { map: (0..n).map(|i| (i + 1) % n).collect() }
    }

    /// A canonical representative with the given cycle type: consecutive
    /// blocks of vertices, one cycle per part.
    pub fn with_cycle_type(t: &CycleType) -> Self {
        let mut map = vec![0usize; t.n()];
        let mut start = 0;
        for &len in t.parts() {
            for off in 0..len {
                map[start + off] = start + (off + 1) % len;
            }
            start += len;
        }
        Permutation { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    #[inline(always)]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0usize; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Composition pinned to the graph-action order: acting on a graph with
    /// the result equals acting with `self` first and `other` second, i.e.
    /// permute(self.then(other), G) = permute(other, permute(self, G)).
    /// Pointwise this is x -> self(other(x)).
    pub fn then(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::Usage("size mismatch in composition".into()));
        }
        Ok(Permutation { map: (0..self.n()).map(|x| self.apply(other.apply(x))).collect() })
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = self.map[v];
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }
}

/// An integer partition of n, stored descending; the conjugacy-class label
/// of a permutation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&x| x == 0) {
            return Err(Error::Usage("zero part in cycle type".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn has_part(&self, k: usize) -> bool {
        self.parts.contains(&k)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", strs.join("+"))
    }
}

/// Parse "3+2+1" or "3,2,1" into a cycle type.
impl std::str::FromStr for CycleType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> =
            s.split(['+', ',']).map(|t| t.trim().parse::<usize>()).collect();
        CycleType::new(parts.map_err(|e| Error::Usage(format!("bad cycle type: {e}")))?)
    }
}

/// Visit every permutation of {0..n-1} (Heap's algorithm), allowing early
/// exit. The visitation order is deterministic.
pub fn visit_permutations<F>(n: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let mut items: Vec<usize> = (0..n).collect();
    if n == 0 {
        return f(&items);
    }
    let mut c = vec![0usize; n];
    if f(&items).is_break() {
        return ControlFlow::Break(());
    }
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            if f(&items).is_break() {
                return ControlFlow::Break(());
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    ControlFlow::Continue(())
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// All cycle types of S_n (partitions of n), deterministic order.
pub fn all_cycle_types(n: usize) -> Vec<CycleType> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType { parts: current.clone() });
            return;
        }
        for next in (1..=remaining.min(max)).rev() {
            current.push(next);
            rec(remaining - next, next, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// Size of the conjugacy class with this cycle type: n! / prod(l_i) /
/// prod(m_l!), where m_l counts parts of length l.
pub fn conjugacy_class_size(t: &CycleType) -> u64 {
    let n = t.n();
    let mut mult: BTreeMap<usize, u64> = BTreeMap::new();
    let mut denom: u128 = 1;
    for &part in t.parts() {
        denom *= part as u128;
        *mult.entry(part).or_insert(0) += 1;
    }
    for &m in mult.values() {
        denom *= factorial(m as usize) as u128;
    }
    (factorial(n) as u128 / denom) as u64
}
