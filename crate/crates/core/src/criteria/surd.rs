//! Exact numbers of the form `a + b*sqrt(q)` with rational `a`, `b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    #[serde(with = "crate::text::string")]
    pub a: BigRational,
    #[serde(with = "crate::text::string")]
    pub b: BigRational,
    pub radicand: u64,
}

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn rat_u(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

impl Surd {
    pub fn rational(a: BigRational, radicand: u64) -> Self {
        Self {
            a,
            b: BigRational::zero(),
            radicand,
        }
    }

    pub fn new(a: BigRational, b: BigRational, radicand: u64) -> Self {
        Self { a, b, radicand }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign, by comparing squares when `a` and `b` disagree.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (Ordering::Greater, _) => {
                // a > 0 > b: positive iff a^2 > b^2 q
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * rat(self.radicand);
                lhs.cmp(&rhs)
            }
            _ => {
                // a < 0 < b: positive iff b^2 q > a^2
                let lhs = &self.b * &self.b * rat(self.radicand);
                let rhs = &self.a * &self.a;
                lhs.cmp(&rhs)
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    /// Exact comparison with another surd over the same radicand.
    pub fn cmp_exact(&self, other: &Surd) -> Ordering {
        (self.clone() - other.clone()).sign()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.a) + ratio_to_f64(&self.b) * (self.radicand as f64).sqrt()
    }

    /// Natural log of a positive surd, safe for values beyond f64 range.
    pub fn ln(&self) -> f64 {
        if self.b.is_zero() {
            return ln_ratio(&self.a);
        }
        if self.a.is_zero() {
            return ln_ratio(&self.b) + 0.5 * (self.radicand as f64).ln();
        }
        let la = ln_ratio(&self.a.abs());
        let lb = ln_ratio(&self.b.abs()) + 0.5 * (self.radicand as f64).ln();
        let (big, small, sign) = if la >= lb {
            (la, lb, self.a.is_negative() != self.b.is_negative())
        } else {
            (lb, la, self.a.is_negative() != self.b.is_negative())
        };
        let ratio = (small - big).exp();
        big + if sign { (-ratio).ln_1p() } else { ratio.ln_1p() }
    }
}

pub(crate) fn ratio_to_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let l = ln_ratio(&x.abs());
            let v = l.exp();
            if x.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}

/// ln of a positive rational, via bit lengths so huge values are fine.
pub(crate) fn ln_ratio(x: &BigRational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Sub for Surd {
    type Output = Surd;

    fn sub(self, o: Surd) -> Surd {
        debug_assert!(self.radicand == o.radicand || self.b.is_zero() || o.b.is_zero());
        let radicand = if self.b.is_zero() { o.radicand } else { self.radicand };
        Surd::new(self.a - o.a, self.b - o.b, radicand)
    }
}

impl Neg for Surd {
    type Output = Surd;

    fn neg(self) -> Surd {
        Surd::new(-self.a, -self.b, self.radicand)
    }
}

impl Mul<&BigRational> for Surd {
    type Output = Surd;

    fn mul(self, k: &BigRational) -> Surd {
        Surd::new(self.a * k, self.b * k, self.radicand)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.radicand)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.radicand)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: i64, b: i64, q: u64) -> Surd {
        Surd::new(rat(a), rat(b), q)
    }

    #[test]
    fn signs() {
        assert_eq!(s(3, -1, 8).sign(), Ordering::Greater); // 3 > sqrt 8
        assert_eq!(s(2, -1, 5).sign(), Ordering::Less); // 2 < sqrt 5
        assert_eq!(s(-3, 1, 8).sign(), Ordering::Less);
        assert_eq!(s(-2, 1, 5).sign(), Ordering::Greater);
        assert_eq!(s(2, -1, 4).sign(), Ordering::Equal);
        assert_eq!(s(0, 0, 7).sign(), Ordering::Equal);
        assert_eq!(s(-1, -1, 7).sign(), Ordering::Less);
    }

    #[test]
    fn signs_agree_with_floats_away_from_zero() {
        for a in -40i64..40 {
            for b in -12i64..12 {
                for q in [2u64, 3, 5, 7, 8] {
                    let v = a as f64 + b as f64 * (q as f64).sqrt();
                    if v.abs() > 1e-9 {
                        let expect = if v > 0.0 { Ordering::Greater } else { Ordering::Less };
                        assert_eq!(s(a, b, q).sign(), expect, "{a} + {b} sqrt {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn logs() {
        let x = s(10, 3, 7);
        assert!((x.ln() - x.to_f64().ln()).abs() < 1e-12);
        let y = s(10, -3, 7);
        assert!((y.ln() - y.to_f64().ln()).abs() < 1e-12);
        let huge = Surd::rational(rat(BigInt::from(3u32).pow(2000)), 3);
        assert!((huge.ln() - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
