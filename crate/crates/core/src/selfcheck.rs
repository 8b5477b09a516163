//! Brute-force property suites over small fields: the character-sum
//! counting identity and the sieve inequalities built on it, the hyperplane
//! complement bounds, end-to-end soundness of the sieve criterion, and
//! agreement between the classifier and the exhaustive search.
//!
//! Every case draws its data from its own ChaCha8 seed, which failures
//! report so a single case can be replayed.

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{classify, ratio_to_f64, sieve_threshold, SieveConfig, Verdict};
use crate::field::{FieldCtx, MuSign};
use crate::hyperplane::{
    exhaustive_exception_search, make_g_a, HyperplaneError, HyperplaneSet, SearchBudget, SEARCH_CEILING,
};
use crate::numtheory::{factor_q_pow_minus_one, FactorBudget, Factorization};

/// Largest field the self-check will build.
pub const SELFCHECK_CEILING: u32 = 531_441;

/// Slack for comparing float-valued bounds against exact counts.
const TOL: f64 = 1e-6;

pub const INDICATOR_CASES: usize = 100;
pub const INEQUALITY_SUBSETS: usize = 12;
pub const HSET_CASES: usize = 50;
pub const SOUNDNESS_CASES: usize = 40;

/// Fields as (p, k, r), smallest first.
const CATALOGUE: &[(u32, u32, u32)] = &[
    (2, 1, 3),
    (3, 1, 2),
    (2, 2, 2),
    (5, 1, 2),
    (3, 1, 3),
    (2, 1, 5),
    (7, 1, 2),
    (2, 2, 3),
    (3, 2, 2),
    (5, 1, 3),
    (3, 1, 5),
    (2, 4, 2),
    (7, 1, 3),
    (3, 1, 6),
    (3, 2, 3),
    (3, 2, 6),
];

/// The default run.
pub const DEFAULT_FIELDS: &[(u32, u32, u32)] = &[(3, 1, 2), (2, 2, 2), (5, 1, 2), (3, 1, 3), (2, 2, 3), (3, 2, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of every Moebius factor in the counting identity.
    FlippedMobius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Character-sum expansion of N(e, A) equals the direct count.
    IndicatorExpansion,
    /// N(e, A) >= rho(e) (|A| - (W(e) - 1) K).
    SieveLowerBound,
    /// |N(e, A) - rho(e/d) N(d, A)| <= rho(e) (W(e) - W(d)) K for coprime d, e/d.
    CoprimeSplit,
    /// N(lcm) >= N(e1) + N(e2) - N(gcd).
    LcmGcd,
    /// N(e) >= (1 - s) N(k) + sum N(k p_i).
    CorePartition,
    /// The bound with modified primes and epsilon.
    ModifiedPartition,
    /// N(e, A) = N(rad e, A).
    RadicalInvariance,
    /// phi(d) characters of each order d, multiplicativity, orthogonality.
    CharacterTable,
    /// |G_A| = (q - 1)^r.
    ComplementSize,
    /// max |S(G_A, chi)| <= sqrt(3 (q-1)^r q^ceil(3r/4)).
    KatzBound,
    /// max |S(G_A, chi)| < 2 (q-1)^(3r/4) q^(r/8) for even r.
    EvenRBound,
    /// |A| > T K forces a primitive element into A.
    SieveSoundness,
    /// Pairs the classifier eliminates have no exceptional configuration.
    SearchConsistency,
}

impl Property {
    pub const ALL: [Property; 13] = [
        Property::IndicatorExpansion,
        Property::SieveLowerBound,
        Property::CoprimeSplit,
        Property::LcmGcd,
        Property::CorePartition,
        Property::ModifiedPartition,
        Property::RadicalInvariance,
        Property::CharacterTable,
        Property::ComplementSize,
        Property::KatzBound,
        Property::EvenRBound,
        Property::SieveSoundness,
        Property::SearchConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::IndicatorExpansion => "indicator-expansion",
            Property::SieveLowerBound => "sieve-lower-bound",
            Property::CoprimeSplit => "coprime-split",
            Property::LcmGcd => "lcm-gcd",
            Property::CorePartition => "core-partition",
            Property::ModifiedPartition => "modified-partition",
            Property::RadicalInvariance => "radical-invariance",
            Property::CharacterTable => "character-table",
            Property::ComplementSize => "complement-size",
            Property::KatzBound => "katz-bound",
            Property::EvenRBound => "even-r-bound",
            Property::SieveSoundness => "sieve-soundness",
            Property::SearchConsistency => "search-consistency",
        }
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SelfcheckOptions {
    /// `None` runs the default fields; otherwise every catalogued field of
    /// order at most this.
    pub max_order: Option<u32>,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            max_order: None,
            seed: 0x5eed,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub property: Property,
    /// `F_q^r`, or `(q, r)` for search consistency.
    pub field: String,
    /// Replays the failing case with [`replay_subset`] / [`replay_hset`].
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub property: Option<Property>,
    pub cases: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub fault: Option<Fault>,
    /// (p, k, r) of every field checked.
    pub fields: Vec<(u32, u32, u32)>,
    pub tallies: Vec<Tally>,
    /// Soundness cases where the criterion actually applied.
    pub soundness_applied: u64,
    /// (q, r) pairs compared against the exhaustive search.
    pub searched: Vec<(u32, u32)>,
    pub failures: Vec<Failure>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed_properties(&self) -> Vec<Property> {
        let mut v: Vec<Property> = self.failures.iter().map(|f| f.property).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let fields: Vec<String> = self.fields.iter().map(|&(p, k, r)| field_label(p, k, r)).collect();
        writeln!(out, "fields: {}", fields.join(" ")).unwrap();
        writeln!(out, "seed: {}", self.seed).unwrap();
        if let Some(fault) = self.fault {
            writeln!(out, "fault injected: {fault:?}").unwrap();
        }
        for t in &self.tallies {
            let name = t.property.map_or("?", Property::name);
            let status = if t.failures == 0 { "ok" } else { "FAIL" };
            writeln!(out, "{status:<4} {name:<20} {} cases, {} failures", t.cases, t.failures).unwrap();
        }
        writeln!(
            out,
            "soundness cases where the criterion applied: {}",
            self.soundness_applied
        )
        .unwrap();
        let searched: Vec<String> = self.searched.iter().map(|(q, r)| format!("({q},{r})")).collect();
        writeln!(out, "searched: {}", searched.join(" ")).unwrap();
        for f in &self.failures {
            writeln!(
                out,
                "failure: {} on {} seed {}: {}",
                f.property, f.field, f.seed, f.detail
            )
            .unwrap();
        }
        writeln!(
            out,
            "{}",
            if self.passed() {
                "selfcheck passed"
            } else {
                "selfcheck FAILED"
            }
        )
        .unwrap();
        out
    }
}

/// `F_q^r`, so the two towers of the same order stay distinct.
fn field_label(p: u32, k: u32, r: u32) -> String {
    format!("F_{}^{r}", p.pow(k))
}

/// Fields a run covers.
pub fn selfcheck_fields(max_order: Option<u32>) -> Vec<(u32, u32, u32)> {
    match max_order {
        None => DEFAULT_FIELDS.to_vec(),
        Some(m) => CATALOGUE
            .iter()
            .copied()
            .filter(|&(p, k, r)| (p as u64).pow(k * r) <= m as u64)
            .collect(),
    }
}

/// A random subset of the nonzero elements: dense, sparse, nearly
/// everything, or a coset-like set, chosen by the seed.
pub fn replay_subset(ctx: &FieldCtx, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ctx.order() - 1;
    let all: Vec<u32> = ctx.nonzero().collect();
    let out: Vec<u32> = match rng.gen_range(0..4) {
        0 => {
            let density: f64 = rng.gen_range(0.05..1.0);
            all.into_iter().filter(|_| rng.gen_bool(density)).collect()
        }
        1 => {
            let drop = rng.gen_range(0..=3.min(n));
            let mut v = all;
            for _ in 0..drop {
                let i = rng.gen_range(0..v.len());
                v.swap_remove(i);
            }
            v
        }
        2 => {
            // Elements whose discrete log lies in a random residue class
            // modulo a divisor: subsets with one very large character sum.
            let ds: Vec<u64> = divisors(n as u64).into_iter().filter(|&d| d > 1).collect();
            let d = ds[rng.gen_range(0..ds.len())];
            let c = rng.gen_range(0..d);
            all.into_iter()
                .filter(|&a| ctx.dlog(a).unwrap() as u64 % d == c)
                .collect()
        }
        _ => {
            let size = rng.gen_range(1..=n.min(8)) as usize;
            (0..size).map(|_| all[rng.gen_range(0..all.len())]).collect()
        }
    };
    let mut out = out;
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        out.push(ctx.generator());
    }
    out
}

/// A random hyperplane set in general position.
pub fn replay_hset(ctx: &FieldCtx, seed: u64) -> HyperplaneSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (q, r) = (ctx.q(), ctx.r() as usize);
    loop {
        let m: Vec<Vec<u32>> = (0..r).map(|_| (0..r).map(|_| rng.gen_range(0..q)).collect()).collect();
        let b: Vec<u32> = (0..r).map(|_| rng.gen_range(0..q)).collect();
        match HyperplaneSet::new(ctx, m, b) {
            Ok(h) => return h,
            Err(HyperplaneError::NotGeneralPosition { .. }) => continue,
            Err(e) => panic!("random hyperplane set: {e}"),
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..)
        .take_while(|d| d * d <= n)
        .filter(|d| n.is_multiple_of(*d))
        .collect();
    let upper: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&d| d * d != n).collect();
    out.extend(upper);
    out
}

fn primes_of(e: u64) -> Vec<u64> {
    crate::field::prime_divisors(e)
}

fn rho(e: u64) -> f64 {
    primes_of(e).iter().map(|&l| (l - 1) as f64 / l as f64).product()
}

fn w(e: u64) -> f64 {
    (1u64 << primes_of(e).len()) as f64
}

/// All assignments of `primes` to `parts` labelled groups.
fn assignments(primes: &[u64], parts: u32) -> Vec<Vec<Vec<u64>>> {
    let total = (parts as usize).pow(primes.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut groups = vec![Vec::new(); parts as usize];
            for &p in primes {
                groups[code % parts as usize].push(p);
                code /= parts as usize;
            }
            groups
        })
        .collect()
}

struct Run<'a> {
    ctx: &'a FieldCtx,
    label: String,
    tallies: Vec<Tally>,
    failures: Vec<Failure>,
    soundness_applied: u64,
}

impl Run<'_> {
    fn check(&mut self, prop: Property, seed: u64, ok: bool, detail: impl FnOnce() -> String) {
        let t = &mut self.tallies[Property::ALL.iter().position(|&p| p == prop).unwrap()];
        t.cases += 1;
        if !ok {
            t.failures += 1;
            self.failures.push(Failure {
                property: prop,
                field: self.label.clone(),
                seed,
                detail: detail(),
            });
        }
    }

    fn n(&self, subset: &[u32], e: u64) -> f64 {
        self.ctx.count_e_free(subset, e).expect("divisor of the group order") as f64
    }
}

fn empty_tallies() -> Vec<Tally> {
    Property::ALL
        .iter()
        .map(|&p| Tally {
            property: Some(p),
            ..Tally::default()
        })
        .collect()
}

fn check_indicator(run: &mut Run, rng: &mut ChaCha8Rng, sign: MuSign) {
    let n = run.ctx.order() as u64 - 1;
    let divs = divisors(n);
    for _ in 0..INDICATOR_CASES {
        let seed = rng.next_u64();
        let subset = replay_subset(run.ctx, seed);
        let e = divs[ChaCha8Rng::seed_from_u64(seed).gen_range(0..divs.len())];
        let v = run.ctx.vinogradov_count_with(&subset, e, sign).expect("valid input");
        let direct = run.n(&subset, e);
        run.check(Property::IndicatorExpansion, seed, (v - direct).abs() < TOL, || {
            format!(
                "e = {e}, |A| = {}: expansion {v:.9}, direct count {direct}",
                subset.len()
            )
        });
    }
}

fn check_inequalities(run: &mut Run, rng: &mut ChaCha8Rng) {
    let n = run.ctx.order() as u64 - 1;
    let divs = divisors(n);
    for _ in 0..INEQUALITY_SUBSETS {
        let seed = rng.next_u64();
        let a = replay_subset(run.ctx, seed);
        let size = a.len() as f64;
        let k = run.ctx.true_k(&a);
        let counts: std::collections::HashMap<u64, f64> = divs.iter().map(|&e| (e, run.n(&a, e))).collect();
        let nf = |e: u64| counts[&e];

        for &e in &divs {
            let lower = rho(e) * (size - (w(e) - 1.0) * k);
            run.check(Property::SieveLowerBound, seed, nf(e) + TOL >= lower, || {
                format!("e = {e}: N = {}, bound {lower:.6}, K = {k:.6}", nf(e))
            });

            let rad: u64 = primes_of(e).iter().product();
            run.check(Property::RadicalInvariance, seed, nf(e) == nf(rad), || {
                format!("N({e}) = {} but N({rad}) = {}", nf(e), nf(rad))
            });

            for &d in divs.iter().filter(|&&d| e % d == 0 && d.gcd(&(e / d)) == 1) {
                let gap = (nf(e) - rho(e / d) * nf(d)).abs();
                let bound = rho(e) * (w(e) - w(d)) * k;
                run.check(Property::CoprimeSplit, seed, gap <= bound + TOL, || {
                    format!("e = {e}, d = {d}: gap {gap:.6} > {bound:.6}")
                });
            }

            let ps = primes_of(e);
            // rad(e) = k * prod p_i
            for groups in assignments(&ps, 2) {
                let core: u64 = groups[0].iter().product();
                let s = groups[1].len() as f64;
                let rhs = (1.0 - s) * nf(core) + groups[1].iter().map(|&p| nf(core * p)).sum::<f64>();
                run.check(Property::CorePartition, seed, nf(e) + TOL >= rhs, || {
                    format!("e = {e}, k = {core}, sieved {:?}: N = {} < {rhs}", groups[1], nf(e))
                });
            }
            // rad(e) = k * prod p_i * prod l_j
            for groups in assignments(&ps, 3) {
                let kp: u64 = groups[0].iter().chain(&groups[1]).product();
                let eps: f64 = groups[2].iter().map(|&l| 1.0 / l as f64).sum();
                let rhs = nf(kp) - eps * size
                    + groups[2]
                        .iter()
                        .map(|&l| nf(l) - (1.0 - 1.0 / l as f64) * size)
                        .sum::<f64>();
                run.check(Property::ModifiedPartition, seed, nf(e) + TOL >= rhs, || {
                    format!("e = {e}, partition {groups:?}: N = {} < {rhs:.6}", nf(e))
                });
            }
        }
        for &e1 in &divs {
            for &e2 in &divs {
                let (big, small) = (e1.lcm(&e2), e1.gcd(&e2));
                let ok = nf(big) >= nf(e1) + nf(e2) - nf(small);
                run.check(Property::LcmGcd, seed, ok, || {
                    format!(
                        "e1 = {e1}, e2 = {e2}: N(lcm) = {}, N(e1) + N(e2) - N(gcd) = {}",
                        nf(big),
                        nf(e1) + nf(e2) - nf(small)
                    )
                });
            }
        }
    }
}

fn check_characters(run: &mut Run, rng: &mut ChaCha8Rng) {
    let ctx = run.ctx;
    let n = ctx.order() as u64 - 1;
    let seed = rng.next_u64();
    let mut total = 0u64;
    for d in divisors(n) {
        let chars = ctx.characters_of_order(d).expect("divisor");
        let phi: u64 =
            Factorization::from_prime_powers(primes_of(d).into_iter().map(|p| (BigUint::from(p), multiplicity(d, p))))
                .expect("primes")
                .phi()
                .try_into()
                .expect("small");
        total += chars.len() as u64;
        let ok = chars.len() as u64 == phi && chars.iter().all(|c| c.order as u64 == d);
        run.check(Property::CharacterTable, seed, ok, || {
            format!("{} characters listed for order {d}, expected {phi}", chars.len())
        });
    }
    run.check(Property::CharacterTable, seed, total == n, || {
        format!("{total} characters in all, expected {n}")
    });

    let mut local = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let (j, k) = (local.gen_range(0..n), local.gen_range(0..n));
        let a = ctx.exp(local.gen_range(0..n));
        let lhs = ctx.char_value(ctx.character(j), a) * ctx.char_value(ctx.character(k), a);
        let rhs = ctx.char_value(ctx.character((j + k) % n), a);
        run.check(Property::CharacterTable, seed, (lhs - rhs).norm() < 1e-9, || {
            format!("chi_{j} chi_{k} != chi_{} at {}", (j + k) % n, ctx.format_elem(a))
        });
    }
    let all: Vec<u32> = ctx.nonzero().collect();
    let k = ctx.true_k(&all);
    run.check(Property::CharacterTable, seed, k < 1e-9, || {
        format!("nontrivial character sum over the whole group is {k}")
    });
}

fn multiplicity(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// sqrt(3 (q-1)^r q^ceil(3r/4)) and, for even r, 2 (q-1)^(3r/4) q^(r/8).
fn complement_bounds(q: u32, r: u32) -> (f64, Option<f64>) {
    let (qf, rf) = (q as f64, r as f64);
    let katz = (3.0 * (qf - 1.0).powf(rf) * qf.powf((3 * r).div_ceil(4) as f64)).sqrt();
    let even = r
        .is_multiple_of(2)
        .then(|| 2.0 * (qf - 1.0).powf(0.75 * rf) * qf.powf(rf / 8.0));
    (katz, even)
}

fn check_hyperplanes(run: &mut Run, rng: &mut ChaCha8Rng) {
    let ctx = run.ctx;
    let (q, r) = (ctx.q(), ctx.r());
    let (katz, even) = complement_bounds(q, r);
    for _ in 0..HSET_CASES {
        let seed = rng.next_u64();
        let hset = replay_hset(ctx, seed);
        let g_a = make_g_a(ctx, &hset).expect("general position");
        let expected = (q as usize - 1).pow(r);
        run.check(Property::ComplementSize, seed, g_a.len() == expected, || {
            format!("|G_A| = {}, expected {expected}", g_a.len())
        });
        let k = ctx.true_k(&g_a);
        run.check(Property::KatzBound, seed, k <= katz * (1.0 + 1e-12), || {
            format!("true K = {k:.6} exceeds {katz:.6}")
        });
        if let Some(bound) = even {
            run.check(Property::EvenRBound, seed, k < bound, || {
                format!("true K = {k:.6} not below {bound:.6}")
            });
        }
        let units: Vec<u32> = g_a.into_iter().filter(|&a| a != 0).collect();
        soundness_case(run, seed, &units);
    }
}

/// Every valid partition of rad(q^r - 1): if |A| > T K then A must hold a
/// primitive element.
fn soundness_case(run: &mut Run, seed: u64, a: &[u32]) {
    let ctx = run.ctx;
    let base = ctx.order_fact().radical();
    let primes: Vec<u64> = ctx.order_primes();
    let k = ctx.true_k(a);
    let has_primitive = a.iter().any(|&x| ctx.is_primitive(x));
    for groups in assignments(&primes, 3) {
        let big = |v: &[u64]| v.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>();
        let config = SieveConfig::new(&base, big(&groups[1]), big(&groups[2])).expect("primes of the base");
        let Ok(t) = sieve_threshold(&config) else { continue };
        let t = ratio_to_f64(&t);
        if (a.len() as f64) > t * k * (1.0 + 1e-9) + 1e-9 {
            run.soundness_applied += 1;
            run.check(Property::SieveSoundness, seed, has_primitive, || {
                format!(
                    "|A| = {} > T K = {t:.6} * {k:.6} for partition {groups:?}, yet no primitive element",
                    a.len()
                )
            });
        } else {
            run.check(Property::SieveSoundness, seed, true, String::new);
        }
    }
}

fn check_soundness(run: &mut Run, rng: &mut ChaCha8Rng) {
    for _ in 0..SOUNDNESS_CASES {
        let seed = rng.next_u64();
        let a = replay_subset(run.ctx, seed);
        soundness_case(run, seed, &a);
    }
}

fn field_seed(base: u64, (p, k, r): (u32, u32, u32)) -> u64 {
    base ^ ((p as u64) << 40 | (k as u64) << 20 | r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// All suites on one field; failures are collected, not raised.
pub fn check_field(ctx: &FieldCtx, seed: u64, fault: Option<Fault>) -> (Vec<Tally>, Vec<Failure>, u64) {
    let mut run = Run {
        ctx,
        label: field_label(ctx.p(), ctx.k(), ctx.r()),
        tallies: empty_tallies(),
        failures: Vec::new(),
        soundness_applied: 0,
    };
    let sign = match fault {
        Some(Fault::FlippedMobius) => MuSign::Flipped,
        None => MuSign::Correct,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    check_indicator(&mut run, &mut rng, sign);
    check_inequalities(&mut run, &mut rng);
    check_characters(&mut run, &mut rng);
    check_hyperplanes(&mut run, &mut rng);
    check_soundness(&mut run, &mut rng);
    (run.tallies, run.failures, run.soundness_applied)
}

/// (q, r) pairs with r >= 2, q^r <= `limit` and a search within the default
/// budget.
pub fn consistency_pairs(limit: u32) -> Vec<(u32, u32)> {
    let limit = limit.min(SEARCH_CEILING);
    let budget = SearchBudget::default();
    let mut out = Vec::new();
    for q in 2..=limit {
        if crate::numtheory::prime_power(q as u64).is_none() {
            continue;
        }
        let mut r = 2;
        while (q as u64).pow(r) <= limit as u64 {
            if crate::hyperplane::search_classes(q, r) <= budget.max_classes / 10 {
                out.push((q, r));
            }
            r += 1;
        }
    }
    out
}

/// Classifier against exhaustive search on the given pairs.
pub fn check_consistency(pairs: &[(u32, u32)]) -> (Tally, Vec<Failure>) {
    let mut tally = Tally {
        property: Some(Property::SearchConsistency),
        ..Tally::default()
    };
    let mut failures = Vec::new();
    for &(q, r) in pairs {
        tally.cases += 1;
        let mut fail = |detail: String| {
            failures.push(Failure {
                property: Property::SearchConsistency,
                field: format!("({q}, {r})"),
                seed: 0,
                detail,
            })
        };
        let fact = match factor_q_pow_minus_one(q as u64, r, FactorBudget::default()) {
            Ok(f) => f,
            Err(e) => {
                fail(format!("factoring: {e}"));
                continue;
            }
        };
        let verdict = match classify(q as u64, r, &fact) {
            Ok(rec) => rec.verdict,
            Err(e) => {
                fail(format!("classify: {e}"));
                continue;
            }
        };
        let found = crate::hyperplane::canonical_field(q, r)
            .map_err(HyperplaneError::from)
            .and_then(|ctx| exhaustive_exception_search(&ctx, SearchBudget::default()));
        match found {
            Ok(certs) if verdict == Verdict::Eliminated && !certs.is_empty() => fail(format!(
                "eliminated, but the search found {} configurations",
                certs.len()
            )),
            Ok(_) => {}
            Err(e) => fail(format!("search: {e}")),
        }
    }
    tally.failures = failures.len() as u64;
    (tally, failures)
}

pub fn run_selfcheck(opts: &SelfcheckOptions) -> Result<SelfcheckReport, crate::field::FieldError> {
    if let Some(m) = opts.max_order {
        if m > SELFCHECK_CEILING {
            return Err(crate::field::FieldError::TooLarge {
                order: m as u64,
                limit: SELFCHECK_CEILING as u64,
            });
        }
    }
    let fields = selfcheck_fields(opts.max_order);
    let ctxs = fields
        .iter()
        .map(|&(p, k, r)| FieldCtx::build_with_ceiling(p, k, r, 0, SELFCHECK_CEILING))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = ctxs
            .iter()
            .zip(&fields)
            .map(|(ctx, &f)| s.spawn(move || check_field(ctx, field_seed(opts.seed, f), opts.fault)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("selfcheck worker panicked"))
            .collect()
    });

    let mut tallies = empty_tallies();
    let mut failures = Vec::new();
    let mut soundness_applied = 0;
    for (t, f, applied) in results {
        for (acc, x) in tallies.iter_mut().zip(t) {
            acc.cases += x.cases;
            acc.failures += x.failures;
        }
        failures.extend(f);
        soundness_applied += applied;
    }
    let largest = fields.iter().map(|&(p, k, r)| p.pow(k * r)).max().unwrap_or(0);
    let searched = consistency_pairs(opts.max_order.map_or(SEARCH_CEILING, |_| largest));
    let (tally, fs) = check_consistency(&searched);
    *tallies.last_mut().expect("nonempty") = tally;
    failures.extend(fs);
    Ok(SelfcheckReport {
        seed: opts.seed,
        fault: opts.fault,
        fields,
        tallies,
        soundness_applied,
        searched,
        failures,
    })
}
