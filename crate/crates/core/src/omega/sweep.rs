//! Downward omega sweep: eliminate omega values from the ceiling until no
//! split t works, then turn the survivors into an r threshold.

use serde::{Deserialize, Serialize};

use super::leap::omega_ceiling;
use super::profile::{check_omega_with, BoundProfile, Track};
use super::OmegaError;
use crate::numtheory::PrimeTable;

/// Splits tried at each omega.
pub const SWEEP_T: [usize; 11] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 33, 41];

/// A maximal run of omega values eliminated with one split t.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStage {
    pub t: usize,
    pub omega_lo: usize,
    pub omega_hi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub q: u64,
    pub track: Track,
    pub ceiling: usize,
    /// Every omega >= this is eliminated.
    pub omega_threshold: usize,
    /// Every r >= this (even r on the even track) is eliminated.
    pub r_threshold: u32,
    /// The survivor omega and split realising the r threshold.
    pub r_witness: (usize, usize),
    pub r_witness_value: f64,
    /// Stages from the ceiling downward.
    pub stages: Vec<SweepStage>,
}

pub fn table2_sweep(q: u64) -> Result<SweepResult, OmegaError> {
    let ceiling = omega_ceiling(q)?.ceiling;
    sweep_from(q, ceiling)
}

/// The sweep with an explicit ceiling (any omega above it is assumed
/// already eliminated).
pub fn sweep_from(q: u64, ceiling: usize) -> Result<SweepResult, OmegaError> {
    let profile = BoundProfile::for_q(q)?;
    let table = PrimeTable::shared(ceiling.max(1))?;
    let works = |omega: usize, t: usize| -> Result<bool, OmegaError> {
        if t > omega {
            return Ok(false);
        }
        match check_omega_with(&profile, &table, omega, t) {
            Ok(c) => Ok(c.eliminated()),
            Err(OmegaError::DeltaNotPositive { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    // Length of the downward run starting at omega with split t.
    let run = |omega: usize, t: usize| -> Result<usize, OmegaError> {
        let mut w = omega;
        while w >= 1 && works(w, t)? {
            w -= 1;
        }
        Ok(omega - w)
    };

    let mut stages: Vec<SweepStage> = Vec::new();
    let mut omega = ceiling;
    while omega >= 1 {
        let mut best: Option<(usize, usize)> = None;
        for &t in &SWEEP_T {
            let len = run(omega, t)?;
            if len > 0 && best.is_none_or(|(_, l)| len > l) {
                best = Some((t, len));
            }
        }
        let Some((t, len)) = best else { break };
        stages.push(SweepStage {
            t,
            omega_lo: omega + 1 - len,
            omega_hi: omega,
        });
        omega -= len;
    }
    let omega_threshold = omega + 1;

    // Survivors: for each omega below the threshold, the best split gives
    // the smallest r beyond which that omega is impossible.
    let mut worst = (0usize, 0usize, f64::NEG_INFINITY);
    for w in 1..omega_threshold {
        let mut best: Option<(usize, f64)> = None;
        for t in 0..=w {
            let Ok(c) = check_omega_with(&profile, &table, w, t) else {
                continue;
            };
            if best.is_none_or(|(_, k)| c.k_of_r < k) {
                best = Some((t, c.k_of_r));
            }
        }
        if let Some((t, k)) = best {
            if k > worst.2 {
                worst = (w, t, k);
            }
        }
    }
    let mut r_threshold = if worst.2.is_finite() {
        worst.2.floor() as u32 + 1
    } else {
        2
    };
    if profile.track == Track::EvenR && r_threshold % 2 == 1 {
        r_threshold += 1;
    }
    Ok(SweepResult {
        q,
        track: profile.track,
        ceiling,
        omega_threshold,
        r_threshold,
        r_witness: (worst.0, worst.1),
        r_witness_value: worst.2,
        stages,
    })
}
