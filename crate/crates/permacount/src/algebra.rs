//! Arithmetic in Z_p for primes below 2^62, deterministic primality, and
//! seeded random streams used by every randomized routine in the crate.

use crate::error::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Exclusive upper bound on supported primes. Everything fits in a u64 with a
/// u128 intermediate for products.
pub const PRIME_LIMIT: u64 = 1 << 62;

#[inline(always)]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline(always)]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // a, b < p < 2^62, no overflow
    if s >= p { s - p } else { s }
}

#[inline(always)]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b { a - b } else { a + p - b }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    a %= p;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Result<u64> {
    if a % p == 0 {
        return Err(Error::Domain("inverse of zero".into()));
    }
    Ok(pow_mod(a, p - 2, p))
}

/// Deterministic Miller-Rabin, valid for all 64-bit integers with this
/// fixed witness set.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    match n {
        0 | 1 => return false,
        2 | 3 => return true,
        _ => {}
    }
    if n % 2 == 0 {
        return false;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &w in &WITNESSES {
        let w = w % n;
        if w == 0 {
            continue;
        }
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A checked prime in (2, 2^62) usable as a field modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PrimeModulus {
    p: u64,
    bit_width: u32,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= PRIME_LIMIT {
            return Err(Error::Usage(format!("modulus {p} out of range (2, 2^62)")));
        }
        if !is_prime(p) {
            return Err(Error::Usage(format!("{p} is not prime")));
        }
        Ok(PrimeModulus { p, bit_width: 64 - p.leading_zeros() })
    }

    #[inline(always)]
    pub fn value(self) -> u64 {
        self.p
    }

    pub fn bit_width(self) -> u32 {
        self.bit_width
    }

    pub fn element(self, value: u64) -> FieldElement {
        FieldElement { value: value % self.p, modulus: self }
    }
}

/// Least prime >= `lower`; `lower` must lie in [2, 2^62).
pub fn next_prime_at_least(lower: u64) -> Result<PrimeModulus> {
    if lower < 2 || lower >= PRIME_LIMIT {
        return Err(Error::Usage(format!("lower bound {lower} out of range [2, 2^62)")));
    }
    if lower <= 3 {
        return PrimeModulus::new(3);
    }
    let mut candidate = lower;
    loop {
        if candidate >= PRIME_LIMIT {
            return Err(Error::Usage("no prime below 2^62 at or above the bound".into()));
        }
        if is_prime(candidate) {
            return PrimeModulus::new(candidate);
        }
        candidate += 1;
    }
}

/// A residue mod a fixed prime. Arithmetic between distinct moduli is
/// rejected by [`field_arithmetic`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        modulus.element(value)
    }

    #[inline(always)]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline(always)]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Multiplicative inverse of `a`; `b` is ignored.
    Inv,
    /// `a` raised to the integer exponent `b.value()`.
    Pow,
}

pub fn field_arithmetic(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement> {
    if a.modulus != b.modulus {
        return Err(Error::Usage("mixed moduli".into()));
    }
    let p = a.modulus.p;
    let value = match op {
        FieldOp::Add => add_mod(a.value, b.value, p),
        FieldOp::Sub => sub_mod(a.value, b.value, p),
        FieldOp::Mul => mul_mod(a.value, b.value, p),
        FieldOp::Inv => inv_mod(a.value, p)?,
        FieldOp::Pow => pow_mod(a.value, b.value, p),
    };
    Ok(FieldElement { value, modulus: a.modulus })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Reproducible randomness: identical (seed, stream_id) produce identical
/// sequences on every platform. Substreams with distinct ids are
/// independent for testing purposes. Never shared between workers; each
/// worker derives its own substream.
#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: ChaCha12Rng,
    seed: u64,
    stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream { rng, seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream `id` of this stream; derivation is position-independent,
    /// so substreams may be created before or after drawing.
    pub fn substream(&self, id: u64) -> RandomStream {
        let child = splitmix64(self.stream_id ^ splitmix64(id ^ 0xA5A5_5A5A_C3C3_3C3C));
        RandomStream::new(self.seed, child)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in [0, bound) by rejection sampling — no modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = (u64::MAX / bound) * bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform field element in [0, p).
    pub fn field(&mut self, m: PrimeModulus) -> FieldElement {
        m.element(self.below(m.value()))
    }

    /// Uniform nonzero field element in [1, p).
    pub fn nonzero_field(&mut self, m: PrimeModulus) -> FieldElement {
        m.element(1 + self.below(m.value() - 1))
    }

    /// Bernoulli(prob) decision, derandomized only by the stream.
    pub fn chance(&mut self, prob: f64) -> bool {
        if prob >= 1.0 {
            return true;
        }
        if prob <= 0.0 {
            return false;
        }
        (self.next_u64() as f64) < prob * (u64::MAX as f64)
    }
}

/// Keyed pseudorandom 64-bit value for (key, index); used where per-index
/// deterministic decisions are needed without a stored table.
pub fn keyed_hash(key: u64, index: u64) -> u64 {
    splitmix64(splitmix64(key ^ 0xD6E8_FEB8_6659_FD93) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
