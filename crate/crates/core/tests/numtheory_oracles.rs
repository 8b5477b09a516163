//! Number theory checked against naive oracles: trial division, the
//! sieve of Eratosthenes by hand, and plain floating sums.

use num_bigint::BigUint;
use proptest::prelude::*;

use primsieve::numtheory::{
    factor_q_pow_minus_one, factorize, is_prime_u64, is_probable_prime, nth_prime, prime_recip_sum, primes_up_to,
    FactorBudget,
};

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn naive_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn as_u64(pairs: &[(BigUint, u32)]) -> Vec<(u64, u32)> {
    pairs.iter().map(|(p, e)| (u64::try_from(p).unwrap(), *e)).collect()
}

#[test]
fn q_pow_minus_one_matches_trial_division() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27] {
        let mut r = 1;
        while (q as f64).powi(r as i32 + 1) < 1e12 {
            r += 1;
            let n = q.pow(r) - 1;
            let fact = factor_q_pow_minus_one(q, r, FactorBudget::default()).unwrap();
            assert_eq!(as_u64(fact.factors()), trial_factor(n), "q = {q}, r = {r}");
            assert_eq!(fact.omega(), trial_factor(n).len());
        }
    }
}

#[test]
fn primality_agrees_with_trial_division() {
    for n in 0..20_000u64 {
        assert_eq!(is_prime_u64(n), naive_is_prime(n), "{n}");
    }
    // Carmichael numbers and strong pseudoprimes to small bases.
    for n in [561u64, 41041, 825265, 2047, 3215031751, 3825123056546413051] {
        assert!(!is_prime_u64(n), "{n}");
        assert!(!is_probable_prime(&BigUint::from(n)), "{n}");
    }
    for p in [(1u64 << 61) - 1, 1_000_000_007, 18446744073709551557] {
        assert!(is_prime_u64(p), "{p}");
    }
    let m127 = (BigUint::from(1u32) << 127) - 1u32;
    assert!(is_probable_prime(&m127));
    assert!(!is_probable_prime(&((BigUint::from(1u32) << 128) + 1u32)));
}

#[test]
fn sieve_and_indexing() {
    let naive: Vec<u64> = (0..50_000).filter(|&n| naive_is_prime(n)).collect();
    assert_eq!(primes_up_to(49_999), naive);
    for (i, &p) in naive.iter().enumerate().step_by(97) {
        assert_eq!(nth_prime(i + 1).unwrap(), p);
    }
    assert!(nth_prime(0).is_err());
    assert_eq!(nth_prime(1_000_000).unwrap(), 15_485_863);
}

#[test]
fn reciprocal_sums_bracket_the_plain_sum() {
    let primes = primes_up_to(2_000_000);
    for t in [1usize, 2, 10, 1000, 30_000, 148_933] {
        // Summed smallest-term first, the plain sum is accurate to ~1e-15.
        let plain: f64 = primes[..t].iter().rev().map(|&p| 1.0 / p as f64).sum();
        let iv = prime_recip_sum(t).unwrap();
        assert!(
            iv.lo <= plain + 1e-13 && plain - 1e-13 <= iv.hi,
            "t = {t}: {iv:?} vs {plain}"
        );
        assert!(iv.width() < 1e-10, "t = {t}: {iv:?}");
    }
    assert!(prime_recip_sum(3).unwrap().contains(1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0));
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn factorize_products_of_random_primes(
        ps in prop::collection::vec(2u64..200_000, 1..5),
        big in prop::sample::select(vec![1_000_000_007u64, 2_147_483_647, 998_244_353]),
    ) {
        let ps: Vec<u64> = ps.into_iter().filter(|&p| naive_is_prime(p)).collect();
        let mut n = BigUint::from(big);
        for &p in &ps {
            n *= p;
        }
        let fact = factorize(&n, &[], FactorBudget::default()).unwrap();
        let mut want = ps.clone();
        want.push(big);
        want.sort();
        let mut got = Vec::new();
        for (p, e) in as_u64(fact.factors()) {
            got.extend(std::iter::repeat_n(p, e as usize));
        }
        prop_assert_eq!(got, want);
        prop_assert_eq!(fact.n(), &n);
    }

    #[test]
    fn rad_phi_and_mobius(n in 2u64..5_000_000) {
        let fact = factorize(&BigUint::from(n), &[], FactorBudget::default()).unwrap();
        let pairs = trial_factor(n);
        let rad: u64 = pairs.iter().map(|p| p.0).product();
        let phi: u64 = pairs.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product();
        prop_assert_eq!(fact.rad(), BigUint::from(rad));
        prop_assert_eq!(fact.phi(), BigUint::from(phi));
        prop_assert_eq!(fact.w(), BigUint::from(1u64 << pairs.len()));
        // mu on divisors of n: zero off the square-free ones.
        for d in [1u64, rad, pairs[0].0 * pairs[0].0] {
            if n % d != 0 {
                continue;
            }
            let sq_free = trial_factor(d).iter().all(|&(_, e)| e == 1);
            let want = match (sq_free, trial_factor(d).len() % 2) {
                (false, _) => 0,
                (true, 0) => 1,
                (true, _) => -1,
            };
            prop_assert_eq!(fact.mobius_of_divisor(&BigUint::from(d)), Some(want));
        }
    }
}
