//! Sieve configurations `rad = k * prod p_i * prod l_j` and the threshold
//! multiplier T with `|A| > T*K` forcing a primitive element in A.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::surd::{rat, rat_u};
use super::CriteriaError;
use crate::numtheory::{nth_prime, rho_of_primes, Factorization};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveConfig {
    /// Factorization of the radical being partitioned.
    pub base: Factorization,
    #[serde(with = "crate::text::string")]
    pub k: BigUint,
    #[serde(with = "crate::text::string_vec")]
    pub sieved: Vec<BigUint>,
    #[serde(with = "crate::text::string_vec")]
    pub modified: Vec<BigUint>,
    #[serde(with = "crate::text::string")]
    pub delta: BigRational,
    #[serde(with = "crate::text::string")]
    pub epsilon: BigRational,
}

pub(crate) fn delta_of<'a>(primes: impl IntoIterator<Item = &'a BigUint>) -> BigRational {
    let mut d = BigRational::one();
    for p in primes {
        d -= BigRational::new(1.into(), p.clone().into());
    }
    d
}

pub(crate) fn epsilon_of<'a>(primes: impl IntoIterator<Item = &'a BigUint>) -> BigRational {
    let mut e = BigRational::zero();
    for p in primes {
        e += BigRational::new(1.into(), p.clone().into());
    }
    e
}

impl SieveConfig {
    /// Partitions `base` (only its distinct primes matter) into the sieved
    /// primes, the modified primes, and the core `k` holding the rest.
    pub fn new(base: &Factorization, sieved: Vec<BigUint>, modified: Vec<BigUint>) -> Result<Self, CriteriaError> {
        let base = base.radical();
        for p in sieved.iter().chain(&modified) {
            if !base.primes().any(|b| b == p) {
                return Err(CriteriaError::NotInBase(p.clone()));
            }
        }
        let mut seen: Vec<&BigUint> = sieved.iter().chain(&modified).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(CriteriaError::Domain("sieved and modified primes overlap".into()));
        }
        let k = base
            .primes()
            .filter(|p| !seen.contains(p))
            .fold(BigUint::one(), |acc, p| acc * p);
        let delta = delta_of(&sieved);
        let epsilon = epsilon_of(&modified);
        Ok(Self {
            base,
            k,
            sieved,
            modified,
            delta,
            epsilon,
        })
    }

    /// The prime sieve with the `s` largest primes of `base` sieved.
    pub fn prime_sieve(base: &Factorization, s: usize) -> Result<Self, CriteriaError> {
        let sieved: Vec<BigUint> = base.primes().rev().take(s).cloned().collect();
        if sieved.len() < s {
            return Err(CriteriaError::Domain(format!(
                "cannot sieve {s} primes from omega = {}",
                base.omega()
            )));
        }
        Self::new(base, sieved, Vec::new())
    }

    pub fn unsieved(base: &Factorization) -> Self {
        Self::new(base, Vec::new(), Vec::new()).expect("empty partition is valid")
    }

    pub fn s1(&self) -> usize {
        self.sieved.len()
    }

    pub fn s2(&self) -> usize {
        self.modified.len()
    }

    fn core_primes(&self) -> impl Iterator<Item = &BigUint> {
        self.base
            .primes()
            .filter(move |p| !self.sieved.contains(p) && !self.modified.contains(p))
    }

    pub fn omega_k(&self) -> usize {
        self.core_primes().count()
    }

    pub fn rho_k(&self) -> BigRational {
        rho_of_primes(self.core_primes())
    }

    /// `delta * rho(k) > epsilon`.
    pub fn is_valid(&self) -> bool {
        &self.delta * self.rho_k() > self.epsilon
    }
}

/// The threshold from the general criterion, with `rho_k`, `W(k)` supplied.
pub(crate) fn threshold_from_parts(
    rho_k: &BigRational,
    w_k: &BigUint,
    s1: usize,
    s2: usize,
    delta: &BigRational,
    epsilon: &BigRational,
) -> Result<BigRational, CriteriaError> {
    let denom = delta * rho_k - epsilon;
    if !denom.is_positive() {
        return Err(CriteriaError::InvalidConfig {
            delta: Box::new(delta.clone()),
            epsilon: Box::new(epsilon.clone()),
        });
    }
    let two = rat(2);
    let numer =
        rho_k * rat_u(w_k) * (rat(s1 as i64) + &two * delta - rat(1)) + rat(s2 as i64) - delta * rho_k - epsilon;
    Ok(numer / denom)
}

pub fn sieve_threshold(config: &SieveConfig) -> Result<BigRational, CriteriaError> {
    let w_k = BigUint::one() << config.omega_k();
    threshold_from_parts(
        &config.rho_k(),
        &w_k,
        config.s1(),
        config.s2(),
        &config.delta,
        &config.epsilon,
    )
}

/// Ordering used when two configurations give the same threshold.
fn tie_key(c: &SieveConfig) -> (usize, usize) {
    (c.s1() + c.s2(), c.s2())
}

fn better(candidate: &(BigRational, SieveConfig), best: &Option<(BigRational, SieveConfig)>) -> bool {
    match best {
        None => true,
        Some((t, c)) => candidate.0 < *t || (candidate.0 == *t && tie_key(&candidate.1) < tie_key(c)),
    }
}

/// Largest-primes heuristic: for each `(s1, s2)` the `l_j` are the `s2`
/// largest primes and the `p_i` the next `s1` largest.
pub fn choose_config(base: &Factorization) -> (SieveConfig, BigRational) {
    let desc: Vec<BigUint> = base.primes().rev().cloned().collect();
    let omega = desc.len();
    let mut best: Option<(BigRational, SieveConfig)> = None;
    for s2 in 0..=omega {
        for s1 in 0..=omega - s2 {
            let modified = desc[..s2].to_vec();
            let sieved = desc[s2..s2 + s1].to_vec();
            let config = SieveConfig::new(base, sieved, modified).expect("primes from base");
            if let Ok(t) = sieve_threshold(&config) {
                let cand = (t, config);
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
        }
    }
    let (t, c) = best.expect("unsieved configuration is always valid");
    (c, t)
}

/// Exhaustive search over every assignment of primes to core / sieved /
/// modified. Exponential; refuses `omega > 8`.
pub fn choose_config_exhaustive(base: &Factorization) -> Result<(SieveConfig, BigRational), CriteriaError> {
    let primes: Vec<BigUint> = base.primes().cloned().collect();
    let omega = primes.len();
    if omega > 8 {
        return Err(CriteriaError::Domain(format!(
            "exhaustive configuration search limited to omega <= 8, got {omega}"
        )));
    }
    let mut best: Option<(BigRational, SieveConfig)> = None;
    for code in 0..3usize.pow(omega as u32) {
        let (mut sieved, mut modified) = (Vec::new(), Vec::new());
        let mut c = code;
        for p in &primes {
            match c % 3 {
                1 => sieved.push(p.clone()),
                2 => modified.push(p.clone()),
                _ => {}
            }
            c /= 3;
        }
        let config = SieveConfig::new(base, sieved, modified)?;
        if let Ok(t) = sieve_threshold(&config) {
            let cand = (t, config);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
    }
    let (t, c) = best.expect("unsieved configuration is always valid");
    Ok((c, t))
}

/// Threshold for an unknown factorization with `omega_r` prime factors,
/// modelling the primes as the first `omega_r` primes: the `l_j` are the
/// `s2` largest of these, the `p_i` the next `s1`, and `rho(k)` is bounded
/// below by its worst case over the remaining first primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericThreshold {
    pub omega_r: usize,
    pub sieved: Vec<u64>,
    pub modified: Vec<u64>,
    #[serde(with = "crate::text::string")]
    pub delta: BigRational,
    #[serde(with = "crate::text::string")]
    pub epsilon: BigRational,
    #[serde(with = "crate::text::string")]
    pub rho_k_lower: BigRational,
    #[serde(with = "crate::text::string")]
    pub threshold: BigRational,
}

pub fn generic_prime_config(omega_r: usize, s1: usize, s2: usize) -> Result<GenericThreshold, CriteriaError> {
    if s1 + s2 > omega_r {
        return Err(CriteriaError::Domain(format!(
            "s1 + s2 = {} exceeds omega_r = {omega_r}",
            s1 + s2
        )));
    }
    let prime = |i: usize| -> Result<u64, CriteriaError> { Ok(nth_prime(i)?) };
    let modified = (0..s2).map(|j| prime(omega_r - j)).collect::<Result<Vec<_>, _>>()?;
    let sieved = (0..s1)
        .map(|i| prime(omega_r - s2 - i))
        .collect::<Result<Vec<_>, _>>()?;
    let core: Vec<BigUint> = (1..=omega_r - s1 - s2)
        .map(|i| prime(i).map(BigUint::from))
        .collect::<Result<_, _>>()?;
    let rho_k_lower = rho_of_primes(&core);
    let big = |v: &[u64]| v.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>();
    let delta = delta_of(&big(&sieved));
    let epsilon = epsilon_of(&big(&modified));
    let w_k = BigUint::one() << core.len();
    let threshold = threshold_from_parts(&rho_k_lower, &w_k, s1, s2, &delta, &epsilon)?;
    Ok(GenericThreshold {
        omega_r,
        sieved,
        modified,
        delta,
        epsilon,
        rho_k_lower,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{factorize, FactorBudget};

    fn fact(n: u64) -> Factorization {
        factorize(&BigUint::from(n), &[], FactorBudget::default()).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn unsieved_is_w_minus_one() {
        for n in [2u64, 6, 30, 78, 624, 9699690] {
            let f = fact(n);
            let t = sieve_threshold(&SieveConfig::unsieved(&f)).unwrap();
            assert_eq!(t, rat((1i64 << f.omega()) - 1));
        }
    }

    #[test]
    fn worked_mixed_partition() {
        let f = fact(30);
        let c = SieveConfig::new(&f, vec![5u32.into()], vec![3u32.into()]).unwrap();
        assert_eq!(c.k, BigUint::from(2u32));
        assert_eq!(c.delta, r(4, 5));
        assert_eq!(c.epsilon, r(1, 3));
        // ((1/2)*2*(1 + 3/5) + 1 - 2/5 - 1/3) / (2/5 - 1/3), evaluated by hand: 28
        let expect = (r(1, 2) * rat(2) * (rat(1) + r(3, 5)) + rat(1) - r(2, 5) - r(1, 3)) / (r(2, 5) - r(1, 3));
        assert_eq!(sieve_threshold(&c).unwrap(), expect);
        assert_eq!(expect, rat(28));
    }

    #[test]
    fn invalid_config_rejected() {
        // delta = 4/5 against epsilon = 1/2 + 1/3
        let f = fact(30);
        let c = SieveConfig::new(&f, vec![5u32.into()], vec![2u32.into(), 3u32.into()]).unwrap();
        assert!(!c.is_valid());
        assert!(matches!(sieve_threshold(&c), Err(CriteriaError::InvalidConfig { .. })));
    }

    #[test]
    fn omega_one_ties_to_unsieved() {
        let f = fact(2);
        let (c, t) = choose_config(&f);
        assert_eq!((c.s1(), c.s2()), (0, 0));
        assert_eq!(t, rat(1));
        let one_sieved = SieveConfig::prime_sieve(&f, 1).unwrap();
        assert_eq!(sieve_threshold(&one_sieved).unwrap(), rat(1));
        let (ce, te) = choose_config_exhaustive(&f).unwrap();
        assert_eq!((ce.s1(), ce.s2(), te), (0, 0, rat(1)));
    }

    #[test]
    fn bad_partitions() {
        let f = fact(30);
        assert!(matches!(
            SieveConfig::new(&f, vec![7u32.into()], vec![]),
            Err(CriteriaError::NotInBase(_))
        ));
        assert!(SieveConfig::new(&f, vec![3u32.into()], vec![3u32.into()]).is_err());
    }

    #[test]
    fn generic_examples() {
        let g = generic_prime_config(5, 0, 0).unwrap();
        assert_eq!(g.threshold, rat(31));
        let g = generic_prime_config(5, 2, 0).unwrap();
        assert_eq!(g.sieved, vec![11, 7]);
        assert_eq!(g.delta, rat(1) - r(1, 7) - r(1, 11));
        let g = generic_prime_config(5, 1, 1).unwrap();
        assert_eq!((g.sieved.clone(), g.modified.clone()), (vec![7], vec![11]));
        assert!(generic_prime_config(3, 2, 2).is_err());
    }
}
