//! Primality testing.
//!
//! Below 2^64 the Miller-Rabin test with the first twelve prime bases is
//! deterministic. Above that we run a strong probable-prime test with a base-2
//! round followed by [`RANDOM_ROUNDS`] rounds on pseudo-random bases derived
//! from the candidate itself, so results are reproducible.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pseudo-random Miller-Rabin rounds used above 2^64 (in addition to base 2).
pub const RANDOM_ROUNDS: usize = 40;

const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d_shift = (n - 1).trailing_zeros();
    let d = (n - 1) >> d_shift;
    'bases: for &a in &DETERMINISTIC_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..d_shift {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Primality test for arbitrary-precision integers.
///
/// Exact below 2^64; above, a composite passes with probability at most
/// 4^-41 over the choice of bases.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let two = BigUint::from(2u32);
    if !strong_probable_prime(n, &n_minus_1, &d, s, &two) {
        return false;
    }
    // Seed from the low bits so the verdict is a pure function of n.
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |h, limb| {
        h.rotate_left(17) ^ limb.wrapping_mul(0xbf58_476d_1ce4_e5b9)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = &n_minus_1 - 1u32;
    for _ in 0..RANDOM_ROUNDS {
        let a = rng.gen_biguint_range(&two, &upper);
        if !strong_probable_prime(n, &n_minus_1, &d, s, &a) {
            return false;
        }
    }
    true
}

/// Greatest common divisor helper used by the rho loop.
pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn agrees_with_trial_division_below_100k() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), naive(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // 3215031751 is a strong pseudoprime to bases 2, 3, 5, 7.
        assert!(!is_prime_u64(3_215_031_751));
        // Largest prime below 2^64.
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(18_446_744_073_709_551_555));
    }

    #[test]
    fn big_primes_and_composites() {
        // 2^127 - 1 is prime, 2^128 + 1 is not.
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127));
        let f7 = (BigUint::one() << 128u32) + 1u32;
        assert!(!is_probable_prime(&f7));
        // Product of two 64-bit primes.
        let a = BigUint::from(18_446_744_073_709_551_557u64);
        let b = BigUint::from(18_446_744_073_709_551_533u64);
        assert!(!is_probable_prime(&(&a * &b)));
    }
}
