use permacount::algebra::{
    add_mod, field_arithmetic, inv_mod, is_prime, keyed_hash, mul_mod, next_prime_at_least,
    pow_mod, sub_mod, FieldOp, PrimeModulus, RandomStream, PRIME_LIMIT,
};
use permacount::error::Error;
use proptest::prelude::*;

const PRIMES: [u64; 4] = [3, 7, 1009, (1 << 31) - 1];

proptest! {
    #[test]
    fn field_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), pi in 0usize..4) {
        let p = PRIMES[pi];
        let (a, b, c) = (a % p, b % p, c % p);
        // commutativity and associativity
        prop_assert_eq!(add_mod(a, b, p), add_mod(b, a, p));
        prop_assert_eq!(mul_mod(a, b, p), mul_mod(b, a, p));
        prop_assert_eq!(add_mod(add_mod(a, b, p), c, p), add_mod(a, add_mod(b, c, p), p));
        prop_assert_eq!(mul_mod(mul_mod(a, b, p), c, p), mul_mod(a, mul_mod(b, c, p), p));
        // distributivity
        prop_assert_eq!(
            mul_mod(a, add_mod(b, c, p), p),
            add_mod(mul_mod(a, b, p), mul_mod(a, c, p), p)
        );
        // identities and inverses
        prop_assert_eq!(add_mod(a, 0, p), a);
        prop_assert_eq!(mul_mod(a, 1 % p, p), a);
        prop_assert_eq!(add_mod(a, sub_mod(0, a, p), p), 0);
        if a != 0 {
            let inv = inv_mod(a, p).unwrap();
            prop_assert_eq!(mul_mod(a, inv, p), 1 % p);
        }
    }

    #[test]
    fn fermat_little_theorem(a in 1u64..u64::MAX, pi in 0usize..4) {
        let p = PRIMES[pi];
        let a = a % p;
        prop_assume!(a != 0);
        prop_assert_eq!(pow_mod(a, p - 1, p), 1);
    }

    #[test]
    fn below_is_in_range(seed in any::<u64>(), bound in 1u64..1_000_000) {
        let mut rng = RandomStream::new(seed, 0);
        for _ in 0..16 {
            prop_assert!(rng.below(bound) < bound);
        }
    }
}

#[test]
fn primality_small_and_known() {
    let primes = [3u64, 5, 7, 11, 13, 1009, 65537, (1 << 31) - 1, 1_000_003];
    let composites = [1u64, 4, 6, 9, 15, 1001, 1007, 2_147_483_649, 3_215_031_751];
    for p in primes {
        assert!(is_prime(p), "{p} is prime");
    }
    for c in composites {
        assert!(!is_prime(c), "{c} is composite");
    }
}

#[test]
fn modulus_range_enforced() {
    assert!(PrimeModulus::new(2).is_err());
    assert!(PrimeModulus::new(4).is_err());
    assert!(PrimeModulus::new(PRIME_LIMIT + 1).is_err());
    assert!(PrimeModulus::new(1009).is_ok());
}

#[test]
fn next_prime_at_least_basics() {
    assert_eq!(next_prime_at_least(1 << 20).unwrap().value(), 1_048_583);
    assert_eq!(next_prime_at_least(1009).unwrap().value(), 1009);
    assert_eq!(next_prime_at_least(10).unwrap().value(), 11);
}

#[test]
fn inverse_of_zero_is_domain_error() {
    match inv_mod(0, 1009) {
        Err(Error::Domain(_)) => {}
        other => panic!("expected domain error, got {other:?}"),
    }
}

#[test]
fn mixed_moduli_rejected() {
    let p = PrimeModulus::new(1009).unwrap();
    let q = PrimeModulus::new(1013).unwrap();
    let r = field_arithmetic(p.element(5), q.element(5), FieldOp::Add);
    assert!(matches!(r, Err(Error::Usage(_))));
}

#[test]
fn field_ops_match_raw() {
    let p = PrimeModulus::new(1009).unwrap();
    let a = p.element(700);
    let b = p.element(900);
    assert_eq!(field_arithmetic(a, b, FieldOp::Add).unwrap().value(), (700 + 900) % 1009);
    assert_eq!(field_arithmetic(a, b, FieldOp::Mul).unwrap().value(), (700 * 900) % 1009);
    assert_eq!(field_arithmetic(a, b, FieldOp::Sub).unwrap().value(), (1009 + 700 - 900) % 1009);
    let inv = field_arithmetic(b, b, FieldOp::Inv).unwrap();
    assert_eq!(field_arithmetic(inv, b, FieldOp::Mul).unwrap().value(), 1);
    assert_eq!(
        field_arithmetic(a, p.element(2), FieldOp::Pow).unwrap().value(),
        (700 * 700) % 1009
    );
}

#[test]
fn streams_are_reproducible_and_independent() {
    let mut a = RandomStream::new(99, 7);
    let mut b = RandomStream::new(99, 7);
    let seq_a: Vec<u64> = (0..32).map(|_| a.next_u64()).collect();
    let seq_b: Vec<u64> = (0..32).map(|_| b.next_u64()).collect();
    assert_eq!(seq_a, seq_b);
    let mut c = RandomStream::new(99, 8);
    let seq_c: Vec<u64> = (0..32).map(|_| c.next_u64()).collect();
    assert_ne!(seq_a, seq_c);
    // substreams with distinct ids differ, same id agrees
    let base = RandomStream::new(5, 0);
    let x: Vec<u64> = {
        let mut s = base.substream(3);
        (0..8).map(|_| s.next_u64()).collect()
    };
    let y: Vec<u64> = {
        let mut s = base.substream(3);
        (0..8).map(|_| s.next_u64()).collect()
    };
    let z: Vec<u64> = {
        let mut s = base.substream(4);
        (0..8).map(|_| s.next_u64()).collect()
    };
    assert_eq!(x, y);
    assert_ne!(x, z);
}

#[test]
fn uniform_field_draw_statistics() {
    // chi-square over Z_7 with 7000 draws; 6 dof, 22.46 is the 0.001 tail.
    let p = PrimeModulus::new(7).unwrap();
    let mut rng = RandomStream::new(2024, 0);
    let mut counts = [0u64; 7];
    for _ in 0..7000 {
        counts[rng.field(p).value() as usize] += 1;
    }
    let stat = permacount::experiments::chi_square_uniform(&counts);
    assert!(stat < 22.46, "chi-square {stat}");
    // nonzero draw never returns zero
    for _ in 0..100 {
        assert_ne!(rng.nonzero_field(p).value(), 0);
    }
}

#[test]
fn keyed_hash_is_deterministic_and_spread() {
    assert_eq!(keyed_hash(1, 2), keyed_hash(1, 2));
    assert_ne!(keyed_hash(1, 2), keyed_hash(1, 3));
    assert_ne!(keyed_hash(1, 2), keyed_hash(2, 2));
    let mut ones = 0u32;
    for i in 0..1024 {
        ones += (keyed_hash(7, i) & 1) as u32;
    }
    assert!((400..=624).contains(&ones), "bit bias: {ones}/1024");
}
