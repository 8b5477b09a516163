//! Squared character-sum bounds K(q,r)^2 for complements of hyperplane
//! unions, all kept exact as `a + b*sqrt(q)`.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::surd::{rat_u, Surd};
use super::CriteriaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// 3 (q-1)^r q^ceil(3r/4)
    KatzCeiling,
    /// (q-1)^r (2 q^(3r/2-k) + q^k), minimised over k
    KatzOptimalK,
    /// 4 (q-1)^(3r/2) q^(r/4), even r only
    EvenR,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharBound {
    pub kind: BoundKind,
    pub q: u64,
    pub r: u32,
    pub value_sq: Surd,
    pub k_used: Option<u32>,
}

fn pow(q: u64, e: u32) -> BigUint {
    BigUint::from(q).pow(e)
}

/// `2 q^(3r/2 - k) + q^k` as a surd in `sqrt(q)`.
fn katz_inner(q: u64, r: u32, k: u32) -> Surd {
    let qk = rat_u(&pow(q, k));
    if r.is_multiple_of(2) {
        let e = 3 * r / 2 - k;
        Surd::rational(rat_u(&(pow(q, e) * 2u32)) + qk, q)
    } else {
        // 3r/2 - k = (3r-1)/2 - k + 1/2, and k <= r keeps the exponent >= 0.
        let e = (3 * r - 1) / 2 - k;
        Surd::new(qk, rat_u(&(pow(q, e) * 2u32)), q)
    }
}

pub fn char_bound(kind: BoundKind, q: u64, r: u32) -> Result<CharBound, CriteriaError> {
    if q < 2 || r < 1 {
        return Err(CriteriaError::Domain(format!(
            "char_bound needs q >= 2, r >= 1 (q={q}, r={r})"
        )));
    }
    let qm1_r = rat_u(&pow(q - 1, r));
    let bound = match kind {
        BoundKind::KatzCeiling => {
            let k = (3 * r).div_ceil(4);
            let v = rat_u(&(pow(q - 1, r) * pow(q, k) * 3u32));
            CharBound {
                kind,
                q,
                r,
                value_sq: Surd::rational(v, q),
                k_used: Some(k),
            }
        }
        BoundKind::KatzOptimalK => {
            let mut best: Option<(Surd, u32)> = None;
            for k in 1..=r {
                let v = katz_inner(q, r, k);
                let better = match &best {
                    None => true,
                    Some((b, _)) => v.cmp_exact(b).is_lt(),
                };
                if better {
                    best = Some((v, k));
                }
            }
            let (inner, k) = best.expect("r >= 1");
            CharBound {
                kind,
                q,
                r,
                value_sq: inner * &qm1_r,
                k_used: Some(k),
            }
        }
        BoundKind::EvenR => {
            if !r.is_multiple_of(2) {
                return Err(CriteriaError::Parity { r });
            }
            let base = pow(q - 1, 3 * r / 2) * 4u32;
            let value_sq = if r.is_multiple_of(4) {
                Surd::rational(rat_u(&(base * pow(q, r / 4))), q)
            } else {
                Surd::new(
                    num_rational::BigRational::zero(),
                    rat_u(&(base * pow(q, (r - 2) / 4))),
                    q,
                )
            };
            CharBound {
                kind,
                q,
                r,
                value_sq,
                k_used: None,
            }
        }
    };
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::surd::rat;

    #[test]
    fn even_r_3_4() {
        let b = char_bound(BoundKind::EvenR, 3, 4).unwrap();
        assert_eq!(b.value_sq, Surd::rational(rat(768), 3));
        assert!(matches!(
            char_bound(BoundKind::EvenR, 3, 5),
            Err(CriteriaError::Parity { r: 5 })
        ));
    }

    #[test]
    fn even_r_half_power() {
        // r = 6: 4 * 2^9 * 3^(3/2) = 2048 * 3 * sqrt 3
        let b = char_bound(BoundKind::EvenR, 3, 6).unwrap();
        assert_eq!(b.value_sq, Surd::new(rat(0), rat(6144), 3));
    }

    #[test]
    fn ceiling_k() {
        for r in [4u32, 8, 12] {
            let b = char_bound(BoundKind::KatzCeiling, 5, r).unwrap();
            assert_eq!(b.k_used, Some(3 * r / 4));
        }
        let b = char_bound(BoundKind::KatzCeiling, 5, 5).unwrap();
        assert_eq!(b.k_used, Some(4));
    }

    #[test]
    fn optimal_never_worse_than_ceiling() {
        for q in [3u64, 4, 5, 7, 8, 9, 11] {
            for r in 2..40 {
                let opt = char_bound(BoundKind::KatzOptimalK, q, r).unwrap();
                let ceil = char_bound(BoundKind::KatzCeiling, q, r).unwrap();
                assert!(opt.value_sq.cmp_exact(&ceil.value_sq).is_le(), "q={q} r={r}");
            }
        }
    }

    #[test]
    fn optimal_k_near_three_quarters() {
        // The minimiser sits at floor or ceil of 3r/4 + ln 2 / (2 ln q).
        for q in [3u64, 4, 5, 7, 8, 9] {
            for r in 2..60u32 {
                let k = char_bound(BoundKind::KatzOptimalK, q, r).unwrap().k_used.unwrap();
                let x = 0.75 * r as f64 + 2f64.ln() / (2.0 * (q as f64).ln());
                assert!(k == x.floor() as u32 || k == x.ceil() as u32, "q={q} r={r} k={k} x={x}");
            }
        }
    }
}
