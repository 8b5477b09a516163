//! Per-q constants for the omega elimination functions R, K and B.

use serde::{Deserialize, Serialize};

use super::OmegaError;
use crate::numtheory::{Interval, PrimeTable};

/// Relative width of the band inside which a floating comparison is
/// reported as inconclusive.
pub const GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    /// Katz-type bound, any r; needs q >= 4.
    General,
    /// Even-r bound; the only track available for q = 3.
    EvenR,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub q: u64,
    pub track: Track,
    /// log_q(q-1) - 3/4, the exponent in the naive primorial criterion.
    pub c: f64,
    /// Constant multiplying the squared threshold inside R: 3 or 4.
    pub r_constant: f64,
    pub k_denominator: f64,
    pub k_numerator_shift: f64,
}

impl BoundProfile {
    pub fn new(q: u64, track: Track) -> Result<Self, OmegaError> {
        if q < 3 {
            return Err(OmegaError::Unsupported(q));
        }
        let lq = (q as f64).ln();
        let lq1 = ((q - 1) as f64).ln();
        let profile = match track {
            Track::General => Self {
                q,
                track,
                c: lq1 / lq - 0.75,
                r_constant: 3.0,
                k_denominator: lq1 - 0.75 * lq,
                k_numerator_shift: lq,
            },
            Track::EvenR => Self {
                q,
                track,
                c: lq1 / lq - 0.75,
                r_constant: 4.0,
                k_denominator: 0.5 * lq1 - 0.25 * lq,
                k_numerator_shift: 0.0,
            },
        };
        if profile.k_denominator <= 0.0 {
            return Err(OmegaError::Track { q, track });
        }
        Ok(profile)
    }

    /// The track used for q in the tables: even r for q = 3, general above.
    pub fn for_q(q: u64) -> Result<Self, OmegaError> {
        Self::new(q, if q == 3 { Track::EvenR } else { Track::General })
    }

    /// `ln(c [2^t ((s-1)/delta + 2) - 1]^2)`, in log space.
    pub fn r_of(&self, t: f64, s: f64, delta: f64) -> f64 {
        let inner = (s - 1.0) / delta + 2.0;
        // ln(2^t * inner - 1) = t ln 2 + ln inner + ln(1 - 2^-t / inner)
        let ln_x = t * std::f64::consts::LN_2 + inner.ln() + (-(-t).exp2() / inner).ln_1p();
        self.r_constant.ln() + 2.0 * ln_x
    }

    /// The leaping variant: delta replaced by its lower bound m and the -1
    /// dropped.
    pub fn leap_r_of(&self, t: f64, s: f64, m: f64) -> f64 {
        let inner = (s - 1.0) / m + 2.0;
        self.r_constant.ln() + 2.0 * (t * std::f64::consts::LN_2 + inner.ln())
    }

    pub fn k_of(&self, r: f64) -> f64 {
        (r + self.k_numerator_shift) / self.k_denominator
    }

    /// `0.96 K log2 q / (ln K + ln ln q)`; `None` where the denominator is
    /// not positive.
    pub fn b_of(&self, k: f64) -> Option<f64> {
        let lq = (self.q as f64).ln();
        let d = k.ln() + lq.ln();
        (k > 0.0 && d > 0.0).then(|| 0.96 * k * (self.q as f64).log2() / d)
    }

    /// dB/dK.
    pub fn b_prime(&self, k: f64) -> f64 {
        let d = k.ln() + (self.q as f64).ln().ln();
        0.96 * (self.q as f64).log2() / d * (1.0 - 1.0 / d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckVerdict {
    Eliminated,
    Survives,
    /// Within the guard band; never counted as eliminated.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaCheck {
    pub q: u64,
    pub omega: usize,
    pub t: usize,
    /// Certified bracket for delta(omega) = 1 - sum_{t < i <= omega} 1/p_i.
    pub delta: Interval,
    /// R, K(R) and B(K(R)) evaluated at the lower end of delta, the
    /// conservative direction.
    pub r_val: f64,
    pub k_of_r: f64,
    pub b_of_k: Option<f64>,
    pub verdict: CheckVerdict,
}

impl OmegaCheck {
    pub fn eliminated(&self) -> bool {
        self.verdict == CheckVerdict::Eliminated
    }
}

/// `x >= y` with the guard band.
pub(crate) fn guarded_ge(x: f64, y: f64) -> CheckVerdict {
    let band = GUARD * x.abs().max(y.abs()).max(1.0);
    if x - y > band {
        CheckVerdict::Eliminated
    } else if y - x > band {
        CheckVerdict::Survives
    } else {
        CheckVerdict::Inconclusive
    }
}

/// Certified bracket for `1 - sum_{t < i <= omega} 1/p_i`.
pub fn delta_interval(table: &PrimeTable, omega: usize, t: usize) -> Result<Interval, OmegaError> {
    let s = table.recip_sum_range(t, omega)?;
    Ok(Interval {
        lo: 1.0 - s.hi,
        hi: 1.0 - s.lo,
    })
}

/// Decides whether `omega >= (B o K o R)(omega)` for the given split `t`.
pub fn check_omega_with(
    profile: &BoundProfile,
    table: &PrimeTable,
    omega: usize,
    t: usize,
) -> Result<OmegaCheck, OmegaError> {
    if t > omega {
        return Err(OmegaError::Domain(format!("t = {t} exceeds omega = {omega}")));
    }
    let delta = delta_interval(table, omega, t)?;
    if delta.lo <= 0.0 {
        return Err(OmegaError::DeltaNotPositive {
            omega,
            t,
            delta: delta.lo,
        });
    }
    let s = (omega - t) as f64;
    let r_val = profile.r_of(t as f64, s, delta.lo);
    let k_of_r = profile.k_of(r_val);
    let b_of_k = profile.b_of(k_of_r);
    let verdict = match b_of_k {
        Some(b) => guarded_ge(omega as f64, b),
        None => CheckVerdict::Survives,
    };
    Ok(OmegaCheck {
        q: profile.q,
        omega,
        t,
        delta,
        r_val,
        k_of_r,
        b_of_k,
        verdict,
    })
}

/// [`check_omega_with`] using the track of [`BoundProfile::for_q`] and the
/// shared prime table.
pub fn check_omega(q: u64, omega: usize, t: usize) -> Result<OmegaCheck, OmegaError> {
    let profile = BoundProfile::for_q(q)?;
    let table = PrimeTable::shared(omega.max(1))?;
    check_omega_with(&profile, &table, omega, t)
}
