//! Prime generation: a plain sieve for small bounds, a segmented odd-only
//! sieve for streaming, and a growable [`PrimeTable`] holding the first N
//! primes with certified reciprocal sums.

use std::sync::{Arc, Mutex, OnceLock};

use super::{Interval, NumError};

/// Largest number of primes a [`PrimeTable`] will hold (about 200 MB of
/// storage at the limit).
pub const MAX_TABLE_PRIMES: usize = 40_000_000;

const SEGMENT_BYTES: usize = 1 << 18;
const TRIAL_PRIMES_LIMIT: u64 = 1_000_000;

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit <= TRIAL_PRIMES_LIMIT {
        let small = small_primes();
        let end = small.partition_point(|&p| p as u64 <= limit);
        return small[..end].iter().map(|&p| p as u64).collect();
    }
    let mut out = Vec::new();
    for_each_prime_in(2, limit + 1, |p| out.push(p));
    out
}

/// Primes below 10^6, computed once.
pub(crate) fn small_primes() -> &'static [u32] {
    static SMALL: OnceLock<Vec<u32>> = OnceLock::new();
    SMALL.get_or_init(|| simple_sieve(TRIAL_PRIMES_LIMIT as usize))
}

fn simple_sieve(limit: usize) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Calls `f` on every prime in `[lo, hi)` in increasing order. Stops early if
/// `f` returns `false`.
pub fn for_each_prime_until<F: FnMut(u64) -> bool>(lo: u64, hi: u64, mut f: F) {
    if hi <= lo || hi <= 2 {
        return;
    }
    if lo <= 2 && !f(2) {
        return;
    }
    let base: Vec<u64> = primes_up_to(isqrt(hi) + 1).into_iter().filter(|&p| p > 2).collect();
    // Odd numbers only: index i stands for start + 2i.
    let mut start = lo.max(3) | 1;
    let mut seg = vec![false; SEGMENT_BYTES];
    while start < hi {
        let end = (start + 2 * SEGMENT_BYTES as u64).min(hi);
        let len = (end - start).div_ceil(2) as usize;
        seg[..len].fill(false);
        for &p in &base {
            if p * p >= end {
                break;
            }
            let mut m = (p * p).max(start.div_ceil(p) * p);
            if m % 2 == 0 {
                m += p;
            }
            let mut i = ((m - start) / 2) as usize;
            while i < len {
                seg[i] = true;
                i += p as usize;
            }
        }
        for (i, &c) in seg[..len].iter().enumerate() {
            if !c {
                let n = start + 2 * i as u64;
                if n > 1 && !f(n) {
                    return;
                }
            }
        }
        start = end | 1;
    }
}

/// Calls `f` on every prime in `[lo, hi)` in increasing order.
pub fn for_each_prime_in<F: FnMut(u64)>(lo: u64, hi: u64, mut f: F) {
    for_each_prime_until(lo, hi, |p| {
        f(p);
        true
    });
}

/// Fixed-point accumulator for sums of 1/p: each term is `floor(2^100 / p)`,
/// so the true sum lies in `[units, units + terms] * 2^-100`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RecipAccumulator {
    units: u128,
    terms: u64,
}

const FIXED_SHIFT: i32 = 100;
const FIXED_ONE: u128 = 1 << FIXED_SHIFT;

impl RecipAccumulator {
    #[inline]
    pub fn add(&mut self, p: u64) {
        self.units += FIXED_ONE / p as u128;
        self.terms += 1;
    }

    pub fn interval(&self) -> Interval {
        let scale = (-FIXED_SHIFT as f64).exp2();
        Interval {
            lo: u128_to_f64_down(self.units) * scale,
            hi: u128_to_f64_up(self.units + self.terms as u128) * scale,
        }
    }

    fn minus(&self, other: &RecipAccumulator) -> RecipAccumulator {
        RecipAccumulator {
            units: self.units - other.units,
            terms: self.terms - other.terms,
        }
    }
}

fn u128_to_f64_down(x: u128) -> f64 {
    let f = x as f64;
    if f as u128 > x {
        f.next_down()
    } else {
        f
    }
}

fn u128_to_f64_up(x: u128) -> f64 {
    let f = x as f64;
    if (f as u128) < x {
        f.next_up()
    } else {
        f
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact prime count and certified reciprocal sum over the primes `<= x`,
/// by streaming; no table is kept.
pub fn prime_stats_up_to(x: u64) -> (u64, Interval) {
    let mut acc = RecipAccumulator::default();
    for_each_prime_in(2, x.saturating_add(1), |p| acc.add(p));
    (acc.terms, acc.interval())
}

// Recip checkpoints every CHECKPOINT primes keep the table at ~4 bytes/prime.
const CHECKPOINT: usize = 256;

/// The first `len()` primes with certified reciprocal prefix sums and
/// compensated log-primorial prefix sums.
#[derive(Debug)]
pub struct PrimeTable {
    primes: Vec<u32>,
    recip_checkpoints: Vec<RecipAccumulator>,
    log_checkpoints: Vec<f64>,
}

impl PrimeTable {
    /// A table holding at least the first `count` primes.
    pub fn with_count(count: usize) -> Result<Self, NumError> {
        let mut t = PrimeTable {
            primes: Vec::new(),
            recip_checkpoints: vec![RecipAccumulator::default()],
            log_checkpoints: vec![0.0],
        };
        t.extend_to(count)?;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    fn extend_to(&mut self, count: usize) -> Result<(), NumError> {
        if count > MAX_TABLE_PRIMES {
            return Err(NumError::Budget {
                requested: count as u64,
                limit: MAX_TABLE_PRIMES as u64,
            });
        }
        if count <= self.primes.len() {
            return Ok(());
        }
        let bound = nth_prime_upper_bound(count as u64);
        let from = self.primes.last().map_or(2, |&p| p as u64 + 1);
        let need = count - self.primes.len();
        self.primes.reserve(need);
        let primes = &mut self.primes;
        for_each_prime_until(from, bound + 1, |p| {
            primes.push(p as u32);
            primes.len() < count
        });
        debug_assert!(self.primes.len() >= count);
        self.rebuild_checkpoints();
        Ok(())
    }

    fn rebuild_checkpoints(&mut self) {
        let done = self.recip_checkpoints.len() - 1;
        let mut recip = *self.recip_checkpoints.last().unwrap();
        let mut log = CompensatedSum::default();
        log.add(*self.log_checkpoints.last().unwrap());
        let full = self.primes.len() / CHECKPOINT;
        for block in done..full {
            for &p in &self.primes[block * CHECKPOINT..(block + 1) * CHECKPOINT] {
                recip.add(p as u64);
                log.add((p as f64).ln());
            }
            self.recip_checkpoints.push(recip);
            self.log_checkpoints.push(log.value());
        }
    }

    /// `p_i`, 1-based.
    pub fn nth(&self, i: usize) -> Option<u64> {
        if i == 0 {
            return None;
        }
        self.primes.get(i - 1).map(|&p| p as u64)
    }

    fn recip_acc(&self, t: usize) -> RecipAccumulator {
        let block = t / CHECKPOINT;
        let mut acc = self.recip_checkpoints[block];
        for &p in &self.primes[block * CHECKPOINT..t] {
            acc.add(p as u64);
        }
        acc
    }

    /// Certified bracket for `sum_{i <= t} 1/p_i`.
    pub fn recip_sum(&self, t: usize) -> Result<Interval, NumError> {
        self.check(t)?;
        Ok(self.recip_acc(t).interval())
    }

    /// Certified bracket for `sum_{a < i <= b} 1/p_i`.
    pub fn recip_sum_range(&self, a: usize, b: usize) -> Result<Interval, NumError> {
        self.check(b)?;
        assert!(a <= b);
        Ok(self.recip_acc(b).minus(&self.recip_acc(a)).interval())
    }

    /// `sum_{i <= n} ln p_i` with compensated summation.
    pub fn log_primorial(&self, n: usize) -> Result<f64, NumError> {
        self.check(n)?;
        let block = n / CHECKPOINT;
        let mut sum = CompensatedSum::default();
        sum.add(self.log_checkpoints[block]);
        for &p in &self.primes[block * CHECKPOINT..n] {
            sum.add((p as f64).ln());
        }
        Ok(sum.value())
    }

    fn check(&self, t: usize) -> Result<(), NumError> {
        if t > self.primes.len() {
            return Err(NumError::Budget {
                requested: t as u64,
                limit: self.primes.len() as u64,
            });
        }
        Ok(())
    }

    /// Process-wide table holding at least `count` primes, grown on demand.
    /// Growth is serialized; readers keep their `Arc` to the old table.
    pub fn shared(count: usize) -> Result<Arc<PrimeTable>, NumError> {
        static SHARED: OnceLock<Mutex<Arc<PrimeTable>>> = OnceLock::new();
        let cell = SHARED.get_or_init(|| Mutex::new(Arc::new(PrimeTable::with_count(0).unwrap())));
        let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
        if guard.len() < count {
            // Round up so repeated small requests do not rebuild each time.
            let target = count.max(guard.len() * 2).min(MAX_TABLE_PRIMES.max(count));
            let mut next = PrimeTable {
                primes: guard.primes.clone(),
                recip_checkpoints: guard.recip_checkpoints.clone(),
                log_checkpoints: guard.log_checkpoints.clone(),
            };
            next.extend_to(target)?;
            *guard = Arc::new(next);
        }
        Ok(guard.clone())
    }
}

/// Upper bound for the n-th prime: n(ln n + ln ln n) for n >= 6.
fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// `p_i`, 1-based, via the shared table.
pub fn nth_prime(i: usize) -> Result<u64, NumError> {
    if i == 0 {
        return Err(NumError::Domain("prime index starts at 1".into()));
    }
    Ok(PrimeTable::shared(i)?.nth(i).expect("table extended"))
}

/// Certified bracket for `sum_{i <= t} 1/p_i`, via the shared table.
pub fn prime_recip_sum(t: usize) -> Result<Interval, NumError> {
    PrimeTable::shared(t)?.recip_sum(t)
}

/// `ln(p_1 ... p_n)`, via the shared table.
pub fn log_primorial(n: usize) -> Result<f64, NumError> {
    PrimeTable::shared(n)?.log_primorial(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_indices() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(4).unwrap(), 7);
        assert!(nth_prime(0).is_err());
    }

    #[test]
    fn segmented_matches_simple() {
        let simple = simple_sieve(200_000);
        let mut seg = Vec::new();
        for_each_prime_in(0, 200_001, |p| seg.push(p as u32));
        assert_eq!(seg, simple);
        // Odd window boundaries.
        let mut window = Vec::new();
        for_each_prime_in(99_990, 100_100, |p| window.push(p as u32));
        let expect: Vec<u32> = simple
            .iter()
            .copied()
            .filter(|&p| (99_990..100_100).contains(&p))
            .collect();
        assert_eq!(window, expect);
    }

    #[test]
    fn table_growth_is_consistent() {
        let a = PrimeTable::with_count(1000).unwrap();
        let b = PrimeTable::with_count(5000).unwrap();
        assert_eq!(&b.primes()[..1000], a.primes());
        for t in [0, 1, 255, 256, 257, 1000] {
            assert_eq!(a.recip_sum(t).unwrap(), b.recip_sum(t).unwrap());
        }
        assert!(a.recip_sum(1001).is_err());
    }

    #[test]
    fn empty_sums() {
        let t = PrimeTable::with_count(10).unwrap();
        assert_eq!(t.recip_sum(0).unwrap(), Interval { lo: 0.0, hi: 0.0 });
        assert_eq!(t.log_primorial(0).unwrap(), 0.0);
        assert!((t.log_primorial(3).unwrap() - 30f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn budget_refused() {
        assert!(matches!(
            PrimeTable::with_count(MAX_TABLE_PRIMES + 1),
            Err(NumError::Budget { .. })
        ));
    }
}
