//! Exact integer arithmetic, factorization, primes and explicit prime bounds.

mod bounds;
mod factor;
mod primality;
mod sieve;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use bounds::{mertens_upper, pi_lower, pi_upper, MERTENS_HI, MERTENS_LO};
pub use factor::{cyclotomic_values, factor_q_pow_minus_one, factorize, rho_of_primes, FactorBudget, Factorization};
pub use primality::{is_prime_u64, is_probable_prime, RANDOM_ROUNDS};
pub use sieve::{
    for_each_prime_in, for_each_prime_until, log_primorial, nth_prime, prime_recip_sum, prime_stats_up_to,
    primes_up_to, CompensatedSum, PrimeTable, RecipAccumulator, MAX_TABLE_PRIMES,
};

/// A closed real interval `[lo, hi]` with outward-rounded endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("factorization of zero requested")]
    Zero,
    #[error("factorization incomplete: composite cofactor {cofactor} not split within budget")]
    Incomplete { cofactor: BigUint },
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("product of factors is {actual}, expected {expected}")]
    ProductMismatch { expected: BigUint, actual: BigUint },
    #[error("requested {requested} exceeds the prime table budget of {limit}")]
    Budget { requested: u64, limit: u64 },
    #[error("domain error: {0}")]
    Domain(String),
}

/// `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q)
        .find(|d| q.is_multiple_of(*d) || d * d > q)
        .map(|d| if q.is_multiple_of(d) { d } else { q })?;
    let (mut m, mut k) = (q, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

#[cfg(test)]
mod tests {
    use super::prime_power;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(1_000_003), Some((1_000_003, 1)));
    }
}
