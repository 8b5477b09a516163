//! Per-(q, r) elimination: the hyperplane sieve inequalities, the two
//! totient/binomial criteria, and the combined classification record.

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::charbound::{char_bound, BoundKind, CharBound};
use super::surd::{rat_u, Surd};
use super::threshold::{sieve_threshold, SieveConfig};
use super::CriteriaError;
use crate::numtheory::Factorization;

pub const RECORD_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Eliminated,
    PossibleException,
    GenuineException,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// (q-1)^r > T^2 (2 q^(3r/2-k) + q^k)
    HypersieveKatz,
    /// (q-1)^(r/2) > 4 T^2 q^(r/4), even r
    HypersieveEven,
    /// (q-1)^r > q^r - phi(q^r - 1)
    FrTotient,
    /// (q-1)^r > alpha(q, r) 2^omega
    FrAlpha,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub schema: u32,
    pub q: u64,
    pub r: u32,
    pub verdict: Verdict,
    pub criterion: Option<Criterion>,
    pub omega_r: usize,
    #[serde(with = "crate::text::string")]
    pub phi: BigUint,
    /// Number of sieved primes for the hyperplane sieve verdicts.
    pub s: Option<usize>,
    pub config: Option<SieveConfig>,
    #[serde(with = "crate::text::opt_string")]
    pub threshold: Option<BigRational>,
    pub bound: Option<CharBound>,
    pub certificate: Option<String>,
    pub notes: String,
}

/// Which criteria hold, each evaluated independently.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaFlags {
    /// Smallest s for which the Katz-type inequality holds.
    pub katz: Option<usize>,
    /// Smallest s for which the even-r inequality holds.
    pub even: Option<usize>,
    pub fr_totient: bool,
    pub fr_alpha: bool,
}

impl CriteriaFlags {
    pub fn hypersieve(&self) -> bool {
        self.katz.is_some() || self.even.is_some()
    }

    pub fn fr(&self) -> bool {
        self.fr_totient || self.fr_alpha
    }

    pub fn any(&self) -> bool {
        self.hypersieve() || self.fr()
    }
}

fn pow(q: u64, e: u32) -> BigUint {
    BigUint::from(q).pow(e)
}

fn s_range(omega: usize) -> std::ops::RangeInclusive<usize> {
    if omega == 0 {
        0..=0
    } else {
        1..=omega
    }
}

/// `(q-1)^(2r) - T^2 * K^2`, whose sign decides the hyperplane sieve.
fn sieve_gap(q: u64, r: u32, t: &BigRational, bound: &CharBound) -> Surd {
    let lhs = Surd::rational(rat_u(&pow(q - 1, 2 * r)), q);
    lhs - bound.value_sq.clone() * &(t * t)
}

fn first_s(q: u64, r: u32, base: &Factorization, bound: &CharBound) -> Result<Option<usize>, CriteriaError> {
    for s in s_range(base.omega()) {
        let config = SieveConfig::prime_sieve(base, s)?;
        let t = match sieve_threshold(&config) {
            Ok(t) => t,
            Err(CriteriaError::InvalidConfig { .. }) => continue,
            Err(e) => return Err(e),
        };
        if sieve_gap(q, r, &t, bound).is_positive() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Log margins `ln |G_A| - ln(T K)` for each s, for display. Positive
/// means the inequality holds (the exact check is done separately).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveMargin {
    pub s: usize,
    pub threshold: f64,
    pub katz: f64,
    pub even: Option<f64>,
}

pub fn hypersieve_margins(q: u64, r: u32, base: &Factorization) -> Result<Vec<SieveMargin>, CriteriaError> {
    let katz = char_bound(BoundKind::KatzOptimalK, q, r)?;
    let even = if r.is_multiple_of(2) {
        Some(char_bound(BoundKind::EvenR, q, r)?)
    } else {
        None
    };
    let lhs = 2.0 * r as f64 * ((q - 1) as f64).ln();
    let mut out = Vec::new();
    for s in s_range(base.omega()) {
        let config = SieveConfig::prime_sieve(base, s)?;
        let Ok(t) = sieve_threshold(&config) else { continue };
        let t2 = Surd::rational(&t * &t, q);
        let lt = t2.ln();
        out.push(SieveMargin {
            s,
            threshold: super::surd::ratio_to_f64(&t),
            katz: 0.5 * (lhs - lt - katz.value_sq.ln()),
            even: even.as_ref().map(|b| 0.5 * (lhs - lt - b.value_sq.ln())),
        });
    }
    Ok(out)
}

/// Evaluates every criterion for `(q, r)`; `fact` must factor `q^r - 1`.
pub fn evaluate_all(q: u64, r: u32, fact: &Factorization) -> Result<CriteriaFlags, CriteriaError> {
    check_fact(q, r, fact)?;
    let katz_bound = char_bound(BoundKind::KatzOptimalK, q, r)?;
    let katz = first_s(q, r, fact, &katz_bound)?;
    let even = if r.is_multiple_of(2) {
        first_s(q, r, fact, &char_bound(BoundKind::EvenR, q, r)?)?
    } else {
        None
    };
    Ok(CriteriaFlags {
        katz,
        even,
        fr_totient: fr_criterion1(q, r, &fact.phi()),
        fr_alpha: fr_criterion2(q, r, fact.omega()),
    })
}

fn check_fact(q: u64, r: u32, fact: &Factorization) -> Result<(), CriteriaError> {
    let n = pow(q, r) - 1u32;
    if fact.n() != &n {
        return Err(CriteriaError::WrongFactorization { q, r });
    }
    Ok(())
}

/// Hyperplane sieve alone: eliminated if either inequality holds for some s.
pub fn hypersieve_check(q: u64, r: u32, fact: &Factorization) -> Result<ClassificationRecord, CriteriaError> {
    check_fact(q, r, fact)?;
    let mut record = ClassificationRecord::open(q, r, fact);
    if let Some(found) = hypersieve_witness(q, r, fact)? {
        record.eliminate_by_sieve(found);
    }
    Ok(record)
}

type SieveWitness = (Criterion, usize, SieveConfig, BigRational, CharBound);

fn hypersieve_witness(q: u64, r: u32, fact: &Factorization) -> Result<Option<SieveWitness>, CriteriaError> {
    let mut tries = vec![(Criterion::HypersieveKatz, char_bound(BoundKind::KatzOptimalK, q, r)?)];
    if r.is_multiple_of(2) {
        tries.push((Criterion::HypersieveEven, char_bound(BoundKind::EvenR, q, r)?));
    }
    for (criterion, bound) in tries {
        if let Some(s) = first_s(q, r, fact, &bound)? {
            let config = SieveConfig::prime_sieve(fact, s)?;
            let t = sieve_threshold(&config)?;
            return Ok(Some((criterion, s, config, t, bound)));
        }
    }
    Ok(None)
}

/// `(q-1)^r > q^r - phi(q^r - 1)`.
pub fn fr_criterion1(q: u64, r: u32, phi_of_order: &BigUint) -> bool {
    let rhs = pow(q, r) - phi_of_order;
    pow(q - 1, r) > rhs
}

/// `alpha(q, r) = sum_{i<r} C(r,i) q^min(i, r/2)` with the rational `r/2`,
/// as `a + b*sqrt(q)`.
pub fn fr_alpha(q: u64, r: u32) -> Surd {
    let mut a = BigUint::zero();
    let mut b = BigUint::zero();
    for i in 0..r {
        let c = binomial(BigUint::from(r), BigUint::from(i));
        if 2 * i <= r {
            a += c * pow(q, i);
        } else if r.is_multiple_of(2) {
            a += c * pow(q, r / 2);
        } else {
            b += c * pow(q, (r - 1) / 2);
        }
    }
    Surd::new(rat_u(&a), rat_u(&b), q)
}

/// `(q-1)^r > alpha(q, r) * 2^omega_r`.
pub fn fr_criterion2(q: u64, r: u32, omega_r: usize) -> bool {
    let w = rat_u(&(BigUint::one() << omega_r));
    let lhs = Surd::rational(rat_u(&pow(q - 1, r)), q);
    (lhs - fr_alpha(q, r) * &w).is_positive()
}

/// Hyperplane sieve first, then the two totient/binomial criteria.
pub fn classify(q: u64, r: u32, fact: &Factorization) -> Result<ClassificationRecord, CriteriaError> {
    let mut record = hypersieve_check(q, r, fact)?;
    if record.verdict == Verdict::Eliminated {
        return Ok(record);
    }
    if fr_criterion1(q, r, &record.phi) {
        record.verdict = Verdict::Eliminated;
        record.criterion = Some(Criterion::FrTotient);
    } else if fr_criterion2(q, r, record.omega_r) {
        record.verdict = Verdict::Eliminated;
        record.criterion = Some(Criterion::FrAlpha);
    }
    Ok(record)
}

impl ClassificationRecord {
    fn open(q: u64, r: u32, fact: &Factorization) -> Self {
        Self {
            schema: RECORD_SCHEMA,
            q,
            r,
            verdict: Verdict::PossibleException,
            criterion: None,
            omega_r: fact.omega(),
            phi: fact.phi(),
            s: None,
            config: None,
            threshold: None,
            bound: None,
            certificate: None,
            notes: String::new(),
        }
    }

    fn eliminate_by_sieve(&mut self, (criterion, s, config, t, bound): SieveWitness) {
        self.verdict = Verdict::Eliminated;
        self.criterion = Some(criterion);
        self.s = Some(s);
        self.config = Some(config);
        self.threshold = Some(t);
        self.bound = Some(bound);
    }

    /// Marks a possible exception as genuine, given a certificate line that
    /// the caller has verified.
    pub fn with_certificate(mut self, certificate: String) -> Self {
        if self.verdict == Verdict::PossibleException {
            self.verdict = Verdict::GenuineException;
            self.certificate = Some(certificate);
        }
        self
    }

    /// Re-derives an elimination from the stored parameters alone.
    pub fn recheck(&self) -> Result<bool, CriteriaError> {
        let (q, r) = (self.q, self.r);
        match self.criterion {
            None => Ok(self.verdict != Verdict::Eliminated),
            Some(Criterion::FrTotient) => Ok(fr_criterion1(q, r, &self.phi)),
            Some(Criterion::FrAlpha) => Ok(fr_criterion2(q, r, self.omega_r)),
            Some(kind) => {
                let (Some(config), Some(t), Some(bound)) = (&self.config, &self.threshold, &self.bound) else {
                    return Ok(false);
                };
                // The stored radical must be the full radical of q^r - 1.
                let mut rest = pow(q, r) - 1u32;
                for p in config.base.primes() {
                    if !(&rest % p).is_zero() {
                        return Ok(false);
                    }
                    while (&rest % p).is_zero() {
                        rest /= p;
                    }
                }
                let expected_kind = match kind {
                    Criterion::HypersieveEven => BoundKind::EvenR,
                    _ => BoundKind::KatzOptimalK,
                };
                let fresh = char_bound(expected_kind, q, r)?;
                Ok(rest.is_one()
                    && config.base.omega() == self.omega_r
                    && &fresh == bound
                    && &sieve_threshold(config)? == t
                    && sieve_gap(q, r, t, bound).is_positive())
            }
        }
    }
}
