//! The naive primorial limit and the crude bounds on r and omega_r.

use serde::{Deserialize, Serialize};

use super::profile::{guarded_ge, BoundProfile, CheckVerdict, Track};
use super::OmegaError;
use crate::numtheory::PrimeTable;

const NAIVE_SEARCH_PRIMES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveLimit {
    pub q: u64,
    pub n: usize,
    /// `c ln(p_1...p_N) - ln q - ln 3 - N ln 4` at the returned N.
    pub log_margin: f64,
}

/// Smallest N with `(p_1...p_N)^c / q > 3 * 4^N` and `p_N^c > 4`.
pub fn naive_prime_limit(q: u64) -> Result<NaiveLimit, OmegaError> {
    if q <= 4 {
        return Err(OmegaError::Track {
            q,
            track: Track::General,
        });
    }
    let profile = BoundProfile::new(q, Track::General)?;
    let c = profile.c;
    let table = PrimeTable::shared(NAIVE_SEARCH_PRIMES)?;
    let (lq, l3, l4) = ((q as f64).ln(), 3f64.ln(), 4f64.ln());
    let mut log_primorial = crate::numtheory::CompensatedSum::default();
    for (i, &p) in table.primes()[..NAIVE_SEARCH_PRIMES].iter().enumerate() {
        let n = i + 1;
        let lp = (p as f64).ln();
        log_primorial.add(lp);
        let lhs = c * log_primorial.value() - lq;
        let rhs = l3 + n as f64 * l4;
        if guarded_ge(lhs, rhs) == CheckVerdict::Eliminated && guarded_ge(c * lp, l4) == CheckVerdict::Eliminated {
            return Ok(NaiveLimit {
                q,
                n,
                log_margin: lhs - rhs,
            });
        }
    }
    Err(OmegaError::Domain(format!(
        "naive limit for q = {q} not reached within {NAIVE_SEARCH_PRIMES} primes"
    )))
}

/// `0.96 r log2 q / (ln r + ln ln q)`, the upper bound on omega(q^r - 1).
pub fn robin_omega_bound(q: u64, r: f64) -> f64 {
    let lq = (q as f64).ln();
    0.96 * r * (q as f64).log2() / (r.ln() + lq.ln())
}

/// The defining inequality of the crude r bound, as `rhs - lhs`: positive
/// means every r at least this large is eliminated.
pub fn crude_margin(q: u64, track: Track, r: f64) -> f64 {
    let qf = q as f64;
    let lq = qf.ln();
    let lr = r.ln() + lq.ln();
    match track {
        Track::General => -(3.0 * qf).ln() / r + ((qf - 1.0) / qf.powf(0.75)).ln() - 1.92 * lq / lr,
        Track::EvenR => -(2f64.ln()) / r + 0.25 * (qf - 1.0).ln() - 0.125 * lq - 0.96 * lq / lr,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrudeBound {
    pub q: u64,
    pub track: Track,
    /// Where the defining inequality starts to hold.
    pub r_crossing: f64,
    /// `r_crossing` rounded up to four significant figures.
    pub r_limit: f64,
    /// Upper bound on omega_r for r below `r_limit`, rounded up to three
    /// significant figures.
    pub omega_limit: f64,
}

pub(crate) fn round_up_sig(x: f64, digits: i32) -> f64 {
    let e = x.log10().floor() as i32 - (digits - 1);
    let scale = 10f64.powi(e);
    let y = (x / scale).ceil() * scale;
    // Guard against the division landing just below an integer.
    if y < x {
        y + scale
    } else {
        y
    }
}

pub fn crude_r_bound(q: u64) -> Result<CrudeBound, OmegaError> {
    let profile = BoundProfile::for_q(q)?;
    let track = profile.track;
    let f = |r: f64| crude_margin(q, track, r);
    let (mut lo, mut hi) = (10f64, 1e60f64);
    if f(hi) <= 0.0 {
        return Err(OmegaError::Domain(format!("crude bound for q = {q} beyond 1e60")));
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r_limit = round_up_sig(hi, 4);
    Ok(CrudeBound {
        q,
        track,
        r_crossing: hi,
        r_limit,
        omega_limit: round_up_sig(robin_omega_bound(q, r_limit), 3),
    })
}
