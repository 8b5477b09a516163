//! Sieve criteria: the general threshold, character-sum bounds for
//! hyperplane complements, and per-(q, r) classification.

mod charbound;
mod classify;
mod surd;
mod threshold;

use num_bigint::BigUint;
use num_rational::BigRational;

pub use charbound::{char_bound, BoundKind, CharBound};
pub use classify::{
    classify, evaluate_all, fr_alpha, fr_criterion1, fr_criterion2, hypersieve_check, hypersieve_margins,
    ClassificationRecord, CriteriaFlags, Criterion, SieveMargin, Verdict, RECORD_SCHEMA,
};
pub use surd::Surd;
pub use threshold::{
    choose_config, choose_config_exhaustive, generic_prime_config, sieve_threshold, GenericThreshold, SieveConfig,
};

pub(crate) use surd::ratio_to_f64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error("invalid sieve configuration: delta*rho(k) <= epsilon (delta = {delta}, epsilon = {epsilon})")]
    InvalidConfig {
        delta: Box<BigRational>,
        epsilon: Box<BigRational>,
    },
    #[error("even-r bound needs even r, got r = {r}")]
    Parity { r: u32 },
    #[error("prime {0} does not divide the base")]
    NotInBase(BigUint),
    #[error("factorization supplied for (q, r) = ({q}, {r}) is not of q^r - 1")]
    WrongFactorization { q: u64, r: u32 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Num(#[from] crate::numtheory::NumError),
}
