//! Multiplicative characters, character sums and e-free counting.

use num_complex::Complex64;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{FieldCtx, FieldError};
use crate::numtheory::CompensatedSum;

/// chi_j(g^t) = exp(2 pi i j t / (q^r - 1)), chi_j(0) = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub j: u32,
    /// (q^r - 1) / gcd(j, q^r - 1).
    pub order: u32,
}

/// Sign convention for the Moebius factor in the indicator expansion; the
/// flipped variant exists only as a negative control for the self-check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MuSign {
    Correct,
    Flipped,
}

/// Distinct prime divisors of `n` by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

const DIRECT_TERMS: u64 = 1 << 22;

#[derive(Default)]
struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FieldCtx {
    fn group_order(&self) -> u64 {
        self.order as u64 - 1
    }

    fn check_divisor(&self, e: u64) -> Result<(), FieldError> {
        if e == 0 || !self.group_order().is_multiple_of(e) {
            return Err(FieldError::NotDivisor {
                e,
                group_order: self.group_order(),
            });
        }
        Ok(())
    }

    pub fn character(&self, j: u64) -> Character {
        let m = self.group_order();
        let j = j % m;
        Character {
            j: j as u32,
            order: (m / j.gcd(&m)) as u32,
        }
    }

    /// The phi(d) characters of exact order d.
    pub fn characters_of_order(&self, d: u64) -> Result<Vec<Character>, FieldError> {
        self.check_divisor(d)?;
        let step = self.group_order() / d;
        Ok((0..d)
            .filter(|u| u.gcd(&d) == 1)
            .map(|u| self.character(u * step))
            .collect())
    }

    pub fn char_value(&self, chi: Character, a: u32) -> Complex64 {
        match self.dlog(a) {
            Ok(t) => self.roots[((chi.j as u64 * t as u64) % self.group_order()) as usize],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// S(A, chi), compensated.
    pub fn char_sum(&self, subset: &[u32], chi: Character) -> Complex64 {
        let mut acc = ComplexSum::default();
        for &a in subset {
            acc.add(self.char_value(chi, a));
        }
        acc.value()
    }

    /// True iff no prime divisor of e divides dlog(a).
    pub fn is_e_free(&self, a: u32, e: u64) -> Result<bool, FieldError> {
        self.check_divisor(e)?;
        let t = self.dlog(a)? as u64;
        Ok(prime_divisors(e).iter().all(|l| !t.is_multiple_of(*l)))
    }

    /// N(e, A) by direct testing; 0 never counts.
    pub fn count_e_free(&self, subset: &[u32], e: u64) -> Result<usize, FieldError> {
        self.check_divisor(e)?;
        let primes = prime_divisors(e);
        Ok(subset
            .iter()
            .filter_map(|&a| self.dlog(a).ok())
            .filter(|&t| primes.iter().all(|l| !(t as u64).is_multiple_of(*l)))
            .count())
    }

    /// rho(e) (|A| + sum over squarefree 1 < d | e of mu(d)/phi(d) times the
    /// sum of S(A, chi) over the characters of order d).
    pub fn vinogradov_count(&self, subset: &[u32], e: u64) -> Result<f64, FieldError> {
        self.vinogradov_count_with(subset, e, MuSign::Correct)
    }

    pub(crate) fn vinogradov_count_with(&self, subset: &[u32], e: u64, sign: MuSign) -> Result<f64, FieldError> {
        self.check_divisor(e)?;
        if subset.contains(&0) {
            return Err(FieldError::ZeroInSubset);
        }
        let primes = prime_divisors(e);
        let rho: f64 = primes.iter().map(|&l| (l - 1) as f64 / l as f64).product();
        // rad(e) characters in all; past a few million terms one FFT over
        // the whole group is cheaper than summing each character directly.
        let rad: u64 = primes.iter().product();
        let spectrum = (rad.saturating_mul(subset.len() as u64) > DIRECT_TERMS).then(|| self.char_sum_spectrum(subset));
        let mut total = ComplexSum::default();
        total.add(Complex64::new(subset.len() as f64, 0.0));
        for mask in 1u32..(1 << primes.len()) {
            let (mut d, mut phi, mut mu) = (1u64, 1u64, 1f64);
            for (i, &l) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d *= l;
                    phi *= l - 1;
                    mu = -mu;
                }
            }
            if sign == MuSign::Flipped {
                mu = -mu;
            }
            let mut inner = ComplexSum::default();
            for chi in self.characters_of_order(d)? {
                inner.add(match &spectrum {
                    Some(s) => s[chi.j as usize],
                    None => self.char_sum(subset, chi),
                });
            }
            total.add(inner.value() * (mu / phi as f64));
        }
        Ok(rho * total.value().re)
    }

    /// S(A, chi_j) for every j, through one FFT of the indicator of A on
    /// discrete logs.
    pub fn char_sum_spectrum(&self, subset: &[u32]) -> Vec<Complex64> {
        let m = self.group_order() as usize;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for &a in subset {
            if let Ok(t) = self.dlog(a) {
                buf[t as usize].re += 1.0;
            }
        }
        // The forward transform uses exp(-2 pi i j t / m); the indicator is
        // real, so S(A, chi_j) is its conjugate.
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        buf.iter().map(|z| z.conj()).collect()
    }

    /// max over nontrivial chi of |S(A, chi)|.
    pub fn true_k(&self, subset: &[u32]) -> f64 {
        self.char_sum_spectrum(subset)
            .iter()
            .skip(1)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// [`true_k`](Self::true_k) by direct summation, O(q^r |A|).
    pub fn true_k_direct(&self, subset: &[u32]) -> f64 {
        (1..self.group_order())
            .map(|j| self.char_sum(subset, self.character(j)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::f9;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn e_free_basics() {
        let f = FieldCtx::build(3, 1, 3, 2).unwrap();
        let g = f.generator();
        for e in [1, 2, 13, 26] {
            assert!(f.is_e_free(g, e).unwrap());
        }
        assert!(!f.is_e_free(f.pow(g, 2), 2).unwrap());
        assert!(f.is_e_free(f.pow(g, 2), 13).unwrap());
        assert_eq!(f.is_e_free(0, 2), Err(FieldError::ZeroElement));
        assert!(matches!(f.is_e_free(g, 5), Err(FieldError::NotDivisor { .. })));
    }

    #[test]
    fn primitive_counts() {
        let f = f9();
        let all: Vec<u32> = f.nonzero().collect();
        assert_eq!(f.count_e_free(&all, 8).unwrap(), 4);
        assert_eq!(f.count_e_free(&[0], 2).unwrap(), 0);
        assert!((f.vinogradov_count(&all, 8).unwrap() - 4.0).abs() < 1e-6);
        assert!((f.vinogradov_count(&all, 1).unwrap() - 8.0).abs() < 1e-9);
        assert_eq!(f.vinogradov_count(&[0, 1], 2), Err(FieldError::ZeroInSubset));
    }

    #[test]
    fn orthogonality_and_trivial_character() {
        let f = FieldCtx::build(2, 2, 2, 5).unwrap();
        let all: Vec<u32> = f.nonzero().collect();
        for j in 1..15 {
            assert!(f.char_sum(&all, f.character(j)).norm() < 1e-9);
        }
        let sub = [1, 3, 7, 0];
        assert!((f.char_sum(&sub, f.character(0)) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(f.true_k(&all) < 1e-9);
        assert!((f.true_k(&[f.generator()]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn characters_by_order() {
        let f = FieldCtx::build(3, 1, 4, 0).unwrap(); // 80 = 2^4 * 5
        let mut total = 0;
        for d in 1..=80u64 {
            if 80 % d != 0 {
                continue;
            }
            let chars = f.characters_of_order(d).unwrap();
            let phi = (1..=d).filter(|u| u.gcd(&d) == 1).count();
            assert_eq!(chars.len(), phi);
            assert!(chars.iter().all(|c| c.order as u64 == d));
            total += chars.len();
        }
        assert_eq!(total, 80);
        // chi_j chi_j' = chi_{j+j'}
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (j, k, a) = (rng.gen_range(0..80), rng.gen_range(0..80), rng.gen_range(1..81));
            let lhs = f.char_value(f.character(j), a) * f.char_value(f.character(k), a);
            assert!((lhs - f.char_value(f.character(j + k), a)).norm() < 1e-12);
        }
    }

    #[test]
    fn vinogradov_matches_direct_count_f27() {
        let f = FieldCtx::with_polys(3, None, vec![2, 2, 0, 1], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let subset: Vec<u32> = f.nonzero().filter(|_| rng.gen_bool(0.4)).collect();
            for e in [2, 13, 26] {
                let v = f.vinogradov_count(&subset, e).unwrap();
                assert!((v - f.count_e_free(&subset, e).unwrap() as f64).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn vinogradov_through_the_spectrum() {
        // 3^7 - 1 = 2 * 1093: a dense subset pushes past the direct-sum limit.
        let f = FieldCtx::build(3, 1, 7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let subset: Vec<u32> = f.nonzero().filter(|_| rng.gen_bool(0.9)).collect();
        assert!(2186 * subset.len() as u64 > DIRECT_TERMS);
        for e in [2, 1093, 2186] {
            let v = f.vinogradov_count(&subset, e).unwrap();
            assert!(
                (v - f.count_e_free(&subset, e).unwrap() as f64).abs() < 1e-6,
                "e = {e}: {v}"
            );
        }
    }

    #[test]
    fn fft_agrees_with_direct_sums() {
        let f = FieldCtx::build(5, 1, 3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let subset: Vec<u32> = (0..f.order()).filter(|_| rng.gen_bool(0.3)).collect();
        let spec = f.char_sum_spectrum(&subset);
        for j in [0, 1, 2, 31, 62, 123] {
            assert!((spec[j as usize] - f.char_sum(&subset, f.character(j))).norm() < 1e-9);
        }
        assert!((f.true_k(&subset) - f.true_k_direct(&subset)).abs() < 1e-9);
    }

    #[test]
    fn flipped_sign_breaks_the_identity() {
        // On all of F* the nontrivial sums vanish, so probe proper subsets.
        let f = f9();
        let subset = [1, f.generator(), 5];
        let good = f.vinogradov_count(&subset, 8).unwrap();
        let bad = f.vinogradov_count_with(&subset, 8, MuSign::Flipped).unwrap();
        assert!((good - f.count_e_free(&subset, 8).unwrap() as f64).abs() < 1e-6);
        assert!((bad - good).abs() > 1e-3);
    }

    #[test]
    fn prime_divisors_small() {
        assert_eq!(prime_divisors(1), Vec::<u64>::new());
        assert_eq!(prime_divisors(80), vec![2, 5]);
        assert_eq!(prime_divisors(728), vec![2, 7, 13]);
    }
}
