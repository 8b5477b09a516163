//! Leaping: a fixed lower bound m on delta turns one eliminated omega_0
//! into a whole interval (omega_0, omega_1], with omega_1 certified by the
//! Mertens and prime-counting bounds.

use serde::{Deserialize, Serialize};

use super::naive::{crude_r_bound, naive_prime_limit};
use super::profile::{BoundProfile, Track, GUARD};
use super::OmegaError;
use crate::numtheory::{mertens_upper, pi_lower, Interval, PrimeTable, MAX_TABLE_PRIMES};

/// Side-condition thresholds: s(omega_0), (K o r)(omega_0), (K o R)(omega_0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideConditions {
    pub min_s: f64,
    pub min_k_of_r: f64,
    pub min_k_of_big_r: f64,
}

impl SideConditions {
    /// The thresholds proved for q = 4 and q = 3; for other q, thresholds
    /// derived the same way: s >= 19 keeps each step of r below 1/9, K o r
    /// must sit where B is concave with B' * step < 1, and K o R where B
    /// increases.
    pub fn for_profile(p: &BoundProfile) -> Self {
        match (p.q, p.track) {
            (4, Track::General) => Self {
                min_s: 19.0,
                min_k_of_r: 6.0,
                min_k_of_big_r: 2.0,
            },
            (3, Track::EvenR) => Self {
                min_s: 15.0,
                min_k_of_r: 7.0,
                min_k_of_big_r: 3.0,
            },
            _ => {
                let lq = (p.q as f64).ln();
                let step = (1.0 / 9.0) / p.k_denominator;
                let mut k = (std::f64::consts::E.powi(2) / lq).ceil().max(6.0);
                while p.b_prime(k) * step >= 1.0 {
                    k += 1.0;
                }
                Self {
                    min_s: 19.0,
                    min_k_of_r: k,
                    min_k_of_big_r: (std::f64::consts::E / lq).ceil().max(2.0),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeapState {
    pub q: u64,
    pub track: Track,
    pub omega0: f64,
    pub t: usize,
    pub m: f64,
    /// Certified bracket for delta(omega_0); the upper end is 1 when
    /// omega_0 is beyond the prime table.
    pub delta: Interval,
    pub s: f64,
    /// r(omega_0), the m-substituted function.
    pub small_r: f64,
    pub k_of_small_r: f64,
    pub b_of_k_of_small_r: f64,
    /// Lower bound for R(omega_0), from the upper end of delta.
    pub big_r: f64,
    pub k_of_big_r: f64,
    pub conditions: SideConditions,
    /// Certified lower bound for sum_{i<=t} 1/p_i.
    pub prefix_lo: f64,
    /// Largest n found with mertens_upper(n) < 1 - m + prefix_lo.
    pub n: f64,
    pub omega1: f64,
}

/// Smallest n (to about 1e-12 relative) with pi_lower(n) >= target.
fn n_for_prime_count(target: f64) -> f64 {
    let (mut lo, mut hi) = (59f64, 1e40f64);
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if pi_lower(mid).unwrap() >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Certified lower bound on delta(omega0) when the sum cannot be tabulated:
/// p_{omega0} <= n whenever pi_lower(n) >= omega0.
fn delta_lower_by_mertens(omega0: f64, prefix_lo: f64) -> f64 {
    let n = n_for_prime_count(omega0);
    1.0 - mertens_upper(n).unwrap() * (1.0 + GUARD) + prefix_lo
}

pub fn leap(q: u64, omega0: f64, t: usize, m: f64) -> Result<LeapState, OmegaError> {
    let profile = BoundProfile::for_q(q)?;
    leap_with(&profile, omega0, t, m)
}

pub fn leap_with(profile: &BoundProfile, omega0: f64, t: usize, m: f64) -> Result<LeapState, OmegaError> {
    if !(m > 0.0 && m < 1.0) {
        return Err(OmegaError::Domain(format!("m must lie in (0, 1), got {m}")));
    }
    if (t as f64) > omega0 {
        return Err(OmegaError::Domain(format!("t = {t} exceeds omega_0 = {omega0}")));
    }
    let table = PrimeTable::shared(t.max(1))?;
    let prefix = table.recip_sum(t)?;
    let delta = if omega0 <= MAX_TABLE_PRIMES as f64 && omega0.fract() == 0.0 {
        let table = PrimeTable::shared(omega0 as usize)?;
        let s = table.recip_sum_range(t, omega0 as usize)?;
        Interval {
            lo: 1.0 - s.hi,
            hi: 1.0 - s.lo,
        }
    } else {
        Interval {
            lo: delta_lower_by_mertens(omega0, prefix.lo),
            hi: 1.0,
        }
    };
    let conditions = SideConditions::for_profile(profile);
    let s = omega0 - t as f64;
    let small_r = profile.leap_r_of(t as f64, s, m);
    let k_of_small_r = profile.k_of(small_r);
    let b_of_k_of_small_r = profile.b_of(k_of_small_r).unwrap_or(f64::INFINITY);
    let big_r = profile.r_of(t as f64, s, delta.hi);
    let k_of_big_r = profile.k_of(big_r);

    let fail = |name: &str, value: f64, needed: f64| OmegaError::LeapPrecondition {
        condition: name.to_string(),
        value,
        needed,
    };
    if delta.lo <= m * (1.0 + GUARD) {
        return Err(fail("delta(omega0) > m", delta.lo, m));
    }
    if omega0 < b_of_k_of_small_r * (1.0 + GUARD) {
        return Err(fail("omega0 >= (B o K o r)(omega0)", omega0, b_of_k_of_small_r));
    }
    if s < conditions.min_s {
        return Err(fail("s(omega0) lower bound", s, conditions.min_s));
    }
    if k_of_small_r < conditions.min_k_of_r {
        return Err(fail("(K o r)(omega0) lower bound", k_of_small_r, conditions.min_k_of_r));
    }
    if k_of_big_r < conditions.min_k_of_big_r {
        return Err(fail(
            "(K o R)(omega0) lower bound",
            k_of_big_r,
            conditions.min_k_of_big_r,
        ));
    }

    // delta(omega1) > m  <=  sum_{i<=omega1} 1/p_i < 1 - m + sum_{i<=t} 1/p_i.
    let target = (1.0 - m + prefix.lo) * (1.0 - GUARD);
    let (mut lo, mut hi) = (100f64, 1e40f64);
    if mertens_upper(lo)? >= target {
        return Err(fail("mertens target reachable", mertens_upper(lo)?, target));
    }
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if mertens_upper(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n = lo;
    let omega1 = (pi_lower(n)? * (1.0 - GUARD)).floor();
    Ok(LeapState {
        q: profile.q,
        track: profile.track,
        omega0,
        t,
        m,
        delta,
        s,
        small_r,
        k_of_small_r,
        b_of_k_of_small_r,
        big_r,
        k_of_big_r,
        conditions,
        prefix_lo: prefix.lo,
        n,
        omega1,
    })
}

/// How the omega ceiling was certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CeilingProof {
    NaivePrimorial {
        n: usize,
    },
    Leaps {
        crude_omega_limit: f64,
        leaps: Vec<LeapState>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaCeiling {
    pub q: u64,
    /// If G_A lacks a primitive element then omega_r <= ceiling.
    pub ceiling: usize,
    pub proof: CeilingProof,
}

/// The leap schedules: (omega_0, t, m) for the first jump; later jumps
/// start at the previous omega_1 with the listed (t, m).
fn leap_schedule(q: u64) -> Option<(usize, Vec<(usize, f64)>)> {
    match q {
        4 => Some((100_000, vec![(30_000, 0.05), (15_000_000, 0.05)])),
        3 => Some((100_000, vec![(30_000, 0.01)])),
        _ => None,
    }
}

pub fn omega_ceiling(q: u64) -> Result<OmegaCeiling, OmegaError> {
    if let Some((start, jumps)) = leap_schedule(q) {
        let crude = crude_r_bound(q)?;
        let mut leaps = Vec::new();
        let mut omega0 = start as f64;
        for (t, m) in jumps {
            let state = leap(q, omega0, t, m)?;
            omega0 = state.omega1;
            leaps.push(state);
            if omega0 >= crude.omega_limit {
                return Ok(OmegaCeiling {
                    q,
                    ceiling: start,
                    proof: CeilingProof::Leaps {
                        crude_omega_limit: crude.omega_limit,
                        leaps,
                    },
                });
            }
        }
        return Err(OmegaError::Domain(format!(
            "leap chain for q = {q} stopped at {omega0}, short of {}",
            crude.omega_limit
        )));
    }
    match q {
        5 | 7 | 8 | 9 => {
            let n = naive_prime_limit(q)?.n;
            Ok(OmegaCeiling {
                q,
                ceiling: n - 1,
                proof: CeilingProof::NaivePrimorial { n },
            })
        }
        _ => Err(OmegaError::Unsupported(q)),
    }
}
