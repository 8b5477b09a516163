//! Bounds on omega(q^r - 1) for pairs that might lack a primitive element:
//! the naive primorial limit, crude r bounds, the omega check, leaping, and
//! the sweep that produces the omega and r thresholds.

mod leap;
mod naive;
mod profile;
mod sweep;

pub use leap::{leap, leap_with, omega_ceiling, CeilingProof, LeapState, OmegaCeiling, SideConditions};
pub use naive::{crude_margin, crude_r_bound, naive_prime_limit, robin_omega_bound, CrudeBound, NaiveLimit};
pub use profile::{
    check_omega, check_omega_with, delta_interval, BoundProfile, CheckVerdict, OmegaCheck, Track, GUARD,
};
pub use sweep::{sweep_from, table2_sweep, SweepResult, SweepStage, SWEEP_T};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmegaError {
    #[error("q = {0} is not supported here")]
    Unsupported(u64),
    #[error("q = {q} cannot use the {track:?} track")]
    Track { q: u64, track: Track },
    #[error("delta({omega}) with t = {t} is not positive ({delta})")]
    DeltaNotPositive { omega: usize, t: usize, delta: f64 },
    #[error("leap precondition failed: {condition} (value {value}, needed {needed})")]
    LeapPrecondition { condition: String, value: f64, needed: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Num(#[from] crate::numtheory::NumError),
}
