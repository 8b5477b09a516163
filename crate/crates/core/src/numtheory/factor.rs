//! Integer factorization: trial division, then Brent's variant of Pollard rho,
//! with every reported prime passing [`is_probable_prime`].

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::primality::{gcd_u64, is_prime_u64, is_probable_prime, mul_mod};
use super::sieve::small_primes;
use super::NumError;

/// A positive integer together with its prime factorization.
///
/// Factors are stored strictly increasing in `p` with multiplicity `e >= 1`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "FactorizationRepr", try_from = "FactorizationRepr")]
pub struct Factorization {
    n: BigUint,
    factors: Vec<(BigUint, u32)>,
}

/// JSON shape: decimal strings, so large primes survive any JSON reader.
#[derive(Serialize, Deserialize)]
struct FactorizationRepr {
    n: String,
    factors: Vec<(String, u32)>,
}

impl From<Factorization> for FactorizationRepr {
    fn from(f: Factorization) -> Self {
        Self {
            n: f.n.to_string(),
            factors: f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        }
    }
}

impl TryFrom<FactorizationRepr> for Factorization {
    type Error = NumError;

    fn try_from(repr: FactorizationRepr) -> Result<Self, NumError> {
        let parse = |s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| NumError::Domain(format!("not a decimal integer: {s:?}")))
        };
        let n = parse(&repr.n)?;
        let pairs = repr
            .factors
            .iter()
            .map(|(p, e)| Ok((parse(p)?, *e)))
            .collect::<Result<Vec<_>, NumError>>()?;
        Factorization::checked(&n, pairs)
    }
}

impl fmt::Debug for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.n, self)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Self {
            n: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs, merging repeated
    /// primes and checking every base for primality.
    pub fn from_prime_powers<I>(pairs: I) -> Result<Self, NumError>
    where
        I: IntoIterator<Item = (BigUint, u32)>,
    {
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for (p, e) in pairs {
            if e == 0 {
                continue;
            }
            if !is_probable_prime(&p) {
                return Err(NumError::NotPrime(p));
            }
            factors.push((p, e));
        }
        factors.sort();
        let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == p => *le += e,
                _ => merged.push((p, e)),
            }
        }
        let n = merged.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        Ok(Self { n, factors: merged })
    }

    /// Like [`from_prime_powers`](Self::from_prime_powers) but also checks the
    /// product against `n`.
    pub fn checked(n: &BigUint, pairs: Vec<(BigUint, u32)>) -> Result<Self, NumError> {
        let f = Self::from_prime_powers(pairs)?;
        if &f.n != n {
            return Err(NumError::ProductMismatch {
                expected: n.clone(),
                actual: f.n,
            });
        }
        Ok(f)
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// Distinct primes, increasing.
    pub fn primes(&self) -> impl DoubleEndedIterator<Item = &BigUint> + ExactSizeIterator {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn rad(&self) -> BigUint {
        self.primes().fold(BigUint::one(), |acc, p| acc * p)
    }

    /// Number of squarefree divisors, `2^omega`.
    pub fn w(&self) -> BigUint {
        BigUint::one() << self.omega()
    }

    /// Euler's totient, exact.
    pub fn phi(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e - 1) * (p - 1u32))
    }

    /// `phi(n) / n` as an exact rational.
    pub fn rho(&self) -> BigRational {
        rho_of_primes(self.primes())
    }

    /// The factorization of `rad(n)`.
    pub fn radical(&self) -> Factorization {
        Factorization {
            n: self.rad(),
            factors: self.factors.iter().map(|(p, _)| (p.clone(), 1)).collect(),
        }
    }

    /// Moebius function of a divisor `d` of `rad(n)`, or of any `d` whose
    /// prime support lies in this factorization. Returns `None` if `d` has a
    /// prime factor outside the support.
    pub fn mobius_of_divisor(&self, d: &BigUint) -> Option<i8> {
        let mut rest = d.clone();
        let mut sign = 1i8;
        for p in self.primes() {
            if (&rest % p).is_zero() {
                rest /= p;
                if (&rest % p).is_zero() {
                    return if self.divides_support(&rest) { Some(0) } else { None };
                }
                sign = -sign;
            }
        }
        if rest.is_one() {
            Some(sign)
        } else {
            None
        }
    }

    fn divides_support(&self, d: &BigUint) -> bool {
        let mut rest = d.clone();
        for p in self.primes() {
            while (&rest % p).is_zero() {
                rest /= p;
            }
        }
        rest.is_one()
    }
}

/// `prod (1 - 1/p)` over the given primes.
pub fn rho_of_primes<'a, I>(primes: I) -> BigRational
where
    I: IntoIterator<Item = &'a BigUint>,
{
    let (num, den) = primes
        .into_iter()
        .fold((BigUint::one(), BigUint::one()), |(num, den), p| {
            (num * (p - 1u32), den * p)
        });
    BigRational::new(num.into(), den.into())
}

/// Effort limits for [`factorize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division bound.
    pub trial_limit: u32,
    /// Total rho iterations per composite before giving up.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        Self {
            trial_limit: 1_000_000,
            rho_iterations: 2_000_000,
        }
    }
}

impl FactorBudget {
    /// The default budget with the rho effort multiplied by the integer in
    /// `PRIMSIEVE_EFFORT`, if set.
    pub fn from_env() -> Self {
        let mut budget = Self::default();
        if let Some(scale) = std::env::var("PRIMSIEVE_EFFORT")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            budget.rho_iterations = budget.rho_iterations.saturating_mul(scale.max(1));
        }
        budget
    }
}

/// Factors `n` completely or reports the composite cofactor that exhausted
/// the budget. `hints` are candidate primes tried before trial division;
/// they need not divide `n`.
pub fn factorize(n: &BigUint, hints: &[BigUint], budget: FactorBudget) -> Result<Factorization, NumError> {
    if n.is_zero() {
        return Err(NumError::Zero);
    }
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut pending: Vec<BigUint> = Vec::new();

    for h in hints {
        if h <= &BigUint::one() || !(&rest % h).is_zero() {
            continue;
        }
        let mut e = 0;
        while (&rest % h).is_zero() {
            rest /= h;
            e += 1;
        }
        if is_probable_prime(h) {
            found.push((h.clone(), e));
        } else {
            for _ in 0..e {
                pending.push(h.clone());
            }
        }
    }

    trial_divide(&mut rest, budget.trial_limit, &mut found);
    if !rest.is_one() {
        pending.push(rest);
    }
    // Pending composites from hints have not been trial divided.
    let mut stack: Vec<BigUint> = Vec::new();
    for mut m in pending {
        trial_divide(&mut m, budget.trial_limit.min(10_000), &mut found);
        if !m.is_one() {
            stack.push(m);
        }
    }

    while let Some(m) = stack.pop() {
        if is_probable_prime(&m) {
            found.push((m, 1));
            continue;
        }
        if let Some(root) = perfect_square_root(&m) {
            stack.push(root.clone());
            stack.push(root);
            continue;
        }
        match rho_split(&m, budget.rho_iterations) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => return Err(NumError::Incomplete { cofactor: m }),
        }
    }
    Factorization::checked(n, found)
}

fn trial_divide(rest: &mut BigUint, limit: u32, found: &mut Vec<(BigUint, u32)>) {
    for &pb in small_primes().iter().take_while(|&&p| p <= limit) {
        let p = pb as u64;
        if let Some(small) = rest.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
        }
        if (&*rest % pb).is_zero() {
            let mut e = 0;
            while (&*rest % pb).is_zero() {
                *rest /= pb;
                e += 1;
            }
            found.push((BigUint::from(pb), e));
        }
    }
    if let Some(small) = rest.to_u64() {
        if small > 1 && is_prime_u64(small) {
            found.push((rest.clone(), 1));
            *rest = BigUint::one();
        }
    }
}

fn perfect_square_root(m: &BigUint) -> Option<BigUint> {
    let root = m.sqrt();
    (&root * &root == *m).then_some(root)
}

/// Finds a nontrivial divisor of the composite `m`.
fn rho_split(m: &BigUint, iterations: u64) -> Option<BigUint> {
    if m.is_even() {
        return Some(BigUint::from(2u32));
    }
    if let Some(small) = m.to_u64() {
        return rho_u64(small, iterations).map(BigUint::from);
    }
    rho_big(m, iterations)
}

fn rho_u64(n: u64, iterations: u64) -> Option<u64> {
    let mut c = 1u64;
    let mut spent = 0u64;
    while spent < iterations {
        let (d, used) = brent_u64(n, c, iterations - spent);
        spent += used;
        if let Some(d) = d {
            return Some(d);
        }
        c += 1;
    }
    None
}

/// One Brent cycle search with x -> x^2 + c.
fn brent_u64(n: u64, c: u64, cap: u64) -> (Option<u64>, u64) {
    const BATCH: u64 = 128;
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut spent = 0u64;
    loop {
        let x = y;
        for _ in 0..r {
            y = f(y);
        }
        spent += r;
        let mut k = 0;
        while k < r {
            let ys = y;
            let batch = BATCH.min(r - k);
            for _ in 0..batch {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            spent += batch;
            let g = gcd_u64(q, n);
            if g != 1 {
                return (backtrack_u64(n, x, ys, g, &f), spent);
            }
            k += batch;
        }
        r *= 2;
        if spent >= cap {
            return (None, spent);
        }
    }
}

fn backtrack_u64(n: u64, x: u64, mut ys: u64, g: u64, f: &dyn Fn(u64) -> u64) -> Option<u64> {
    if g != n {
        return Some(g);
    }
    loop {
        ys = f(ys);
        let g = gcd_u64(x.abs_diff(ys), n);
        if g == n {
            return None;
        }
        if g != 1 {
            return Some(g);
        }
    }
}

fn rho_big(n: &BigUint, iterations: u64) -> Option<BigUint> {
    const BATCH: u64 = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut spent = 0u64;
    let one = BigUint::one();
    while spent < iterations {
        let c = rng.gen_biguint_range(&one, n);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = rng.gen_biguint_range(&one, n);
        let (mut r, mut q) = (1u64, BigUint::one());
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut g = BigUint::one();
        while g.is_one() && spent < iterations {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            spent += r;
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = BATCH.min(r - k);
                for _ in 0..batch {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                spent += batch;
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if g.is_one() {
            continue;
        }
        if &g == n {
            // Collapsed; step one at a time from the saved point.
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// Values of the cyclotomic polynomials `Phi_d(q)` for every `d | r`, computed
/// exactly from `Phi_d(q) = prod_{e | d} (q^e - 1)^{mu(d/e)}`.
pub fn cyclotomic_values(q: u64, r: u32) -> Vec<(u32, BigUint)> {
    let divisors: Vec<u32> = (1..=r).filter(|d| r.is_multiple_of(*d)).collect();
    divisors
        .iter()
        .map(|&d| {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for e in (1..=d).filter(|e| d % e == 0) {
                let term = BigUint::from(q).pow(e) - 1u32;
                match small_mobius(d / e) {
                    1 => num *= term,
                    -1 => den *= term,
                    _ => {}
                }
            }
            (d, num / den)
        })
        .collect()
}

pub(crate) fn small_mobius(mut n: u32) -> i8 {
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Factors `q^r - 1` by splitting it into cyclotomic values first; primes
/// already found in earlier pieces are used as hints for later ones.
pub fn factor_q_pow_minus_one(q: u64, r: u32, budget: FactorBudget) -> Result<Factorization, NumError> {
    let n = BigUint::from(q).pow(r) - 1u32;
    let mut hints: Vec<BigUint> = Vec::new();
    let mut pairs: Vec<(BigUint, u32)> = Vec::new();
    for (_, value) in cyclotomic_values(q, r) {
        let piece = factorize(&value, &hints, budget)?;
        for (p, e) in piece.factors() {
            if !hints.contains(p) {
                hints.push(p.clone());
            }
            pairs.push((p.clone(), *e));
        }
    }
    Factorization::checked(&n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn naive_factor(mut n: u64) -> Vec<(u64, u32)> {
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

    #[test]
    fn factor_624() {
        let f = factorize(&big(624), &[], FactorBudget::default()).unwrap();
        let expect: Vec<(BigUint, u32)> = vec![(big(2), 4), (big(3), 1), (big(13), 1)];
        assert_eq!(f.factors(), expect.as_slice());
        assert_eq!(f.omega(), 3);
        assert_eq!(f.rad(), big(78));
    }

    #[test]
    fn factor_8_and_1() {
        let f = factorize(&big(8), &[], FactorBudget::default()).unwrap();
        assert_eq!(f.omega(), 1);
        assert_eq!(f.w(), big(2));
        assert_eq!(f.phi(), big(4));
        let one = factorize(&big(1), &[], FactorBudget::default()).unwrap();
        assert!(one.factors().is_empty());
        assert_eq!(one.rad(), big(1));
        assert_eq!(one.w(), big(1));
        assert_eq!(one.omega(), 0);
    }

    #[test]
    fn zero_rejected() {
        assert!(matches!(
            factorize(&big(0), &[], FactorBudget::default()),
            Err(NumError::Zero)
        ));
    }

    #[test]
    fn agrees_with_naive_up_to_20k() {
        // The full 10^6 sweep lives in the integration tests.
        for n in 1..20_000u64 {
            let f = factorize(&big(n), &[], FactorBudget::default()).unwrap();
            let naive = naive_factor(n);
            let got: Vec<(u64, u32)> = f.factors().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
            assert_eq!(got, naive, "n = {n}");
        }
    }

    #[test]
    fn rho_splits_semiprimes_beyond_trial_division() {
        // Two primes above the trial bound.
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        let n = big(p) * big(q);
        let f = factorize(&n, &[], FactorBudget::default()).unwrap();
        assert_eq!(f.factors(), &[(big(p), 1), (big(q), 1)]);
        // 2^67 - 1 = 193707721 * 761838257287, above 64 bits.
        let m67 = (BigUint::one() << 67u32) - 1u32;
        let f = factorize(&m67, &[], FactorBudget::default()).unwrap();
        assert_eq!(f.factors(), &[(big(193_707_721), 1), (big(761_838_257_287), 1)]);
    }

    #[test]
    fn hints_are_divided_first_and_may_be_irrelevant() {
        let n = big(3 * 5 * 1_000_003 * 1_000_033);
        let hints = [big(7), big(1_000_033), big(1_000_003 * 1_000_033)];
        let f = factorize(&n, &hints, FactorBudget::default()).unwrap();
        assert_eq!(f.n(), &n);
        assert_eq!(f.omega(), 4);
    }

    #[test]
    fn budget_exhaustion_reports_cofactor() {
        let p = big(1_000_000_007);
        let q = big(1_000_000_009);
        let n = &p * &q;
        let budget = FactorBudget {
            trial_limit: 1000,
            rho_iterations: 10,
        };
        match factorize(&n, &[], budget) {
            Err(NumError::Incomplete { cofactor }) => assert_eq!(cofactor, n),
            other => panic!("expected incomplete, got {other:?}"),
        }
    }

    #[test]
    fn mobius_support() {
        let f = factorize(&big(624), &[], FactorBudget::default()).unwrap();
        assert_eq!(f.mobius_of_divisor(&big(1)), Some(1));
        assert_eq!(f.mobius_of_divisor(&big(2)), Some(-1));
        assert_eq!(f.mobius_of_divisor(&big(6)), Some(1));
        assert_eq!(f.mobius_of_divisor(&big(78)), Some(-1));
        assert_eq!(f.mobius_of_divisor(&big(4)), Some(0));
        assert_eq!(f.mobius_of_divisor(&big(5)), None);
    }

    #[test]
    fn cyclotomic_pieces_multiply_back() {
        for (q, r) in [(5u64, 4u32), (3, 12), (8, 6), (9, 10)] {
            let prod = cyclotomic_values(q, r)
                .into_iter()
                .fold(BigUint::one(), |acc, (_, v)| acc * v);
            assert_eq!(prod, BigUint::from(q).pow(r) - 1u32);
        }
        // Phi_4(5) = 26
        let vals = cyclotomic_values(5, 4);
        assert_eq!(vals.last().unwrap(), &(4, big(26)));
    }

    #[test]
    fn q_pow_minus_one() {
        let f = factor_q_pow_minus_one(5, 4, FactorBudget::default()).unwrap();
        assert_eq!(f.n(), &big(624));
        let f = factor_q_pow_minus_one(9, 13, FactorBudget::default()).unwrap();
        assert_eq!(f.n(), &(BigUint::from(9u32).pow(13) - 1u32));
    }
}
