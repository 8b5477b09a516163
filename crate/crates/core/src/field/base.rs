//! The base field F_q = F_p[y]/(f) with full addition and multiplication
//! tables, and polynomial arithmetic over it.

use super::FieldError;

/// Largest base field we tabulate (q^2 table entries).
pub const MAX_BASE_Q: u32 = 1024;

#[derive(Clone, Debug)]
pub struct BaseField {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    /// Monic modulus over F_p, low degree first; `[0, 1]` (y) when k = 1.
    pub poly: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

fn is_prime_small(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Digits of `x` in base `b`, `len` of them, low first.
pub(crate) fn digits(mut x: u32, b: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % b);
        x /= b;
    }
    out
}

pub(crate) fn undigits(d: &[u32], b: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * b + c)
}

impl BaseField {
    /// F_p[y]/(poly); `poly` must be monic of degree k and irreducible.
    pub fn new(p: u32, poly: Vec<u32>) -> Result<Self, FieldError> {
        if !is_prime_small(p) {
            return Err(FieldError::NotPrime(p));
        }
        let k = poly.len() as u32 - 1;
        if k == 0 || *poly.last().unwrap() != 1 || poly.iter().any(|&c| c >= p) {
            return Err(FieldError::BadPolynomial(format!("{poly:?} is not monic over F_{p}")));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_BASE_Q)
            .ok_or(FieldError::TooLarge {
                order: p as u64,
                limit: MAX_BASE_Q as u64,
            })?;
        let prime = PrimeField(p);
        if k > 1 && !is_irreducible(&prime, &poly) {
            return Err(FieldError::Reducible(format!("{poly:?} over F_{p}")));
        }
        let qq = q as usize;
        let mut add = vec![0u16; qq * qq];
        let mut mul = vec![0u16; qq * qq];
        for a in 0..q {
            let da = digits(a, p, k as usize);
            for b in 0..q {
                let db = digits(b, p, k as usize);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qq + b as usize] = undigits(&s, p) as u16;
                let m = poly_mulmod(&prime, &da, &db, &poly);
                mul[a as usize * qq + b as usize] = undigits(&m, p) as u16;
            }
        }
        let mut neg = vec![0u16; qq];
        let mut inv = vec![0u16; qq];
        for a in 0..qq {
            for b in 0..qq {
                if add[a * qq + b] == 0 {
                    neg[a] = b as u16;
                }
                if mul[a * qq + b] == 1 {
                    inv[a] = b as u16;
                }
            }
        }
        Ok(Self {
            p,
            k,
            q,
            poly,
            add,
            mul,
            neg,
            inv,
        })
    }

    /// F_p itself.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, vec![0, 1])
    }

    /// F_{p^k} with the first irreducible monic modulus in lexicographic
    /// order of its coefficient vector.
    pub fn first(p: u32, k: u32) -> Result<Self, FieldError> {
        if k == 1 {
            return Self::prime(p);
        }
        if !is_prime_small(p) {
            return Err(FieldError::NotPrime(p));
        }
        let prime = PrimeField(p);
        let count = p.checked_pow(k).ok_or(FieldError::TooLarge {
            order: u64::MAX,
            limit: MAX_BASE_Q as u64,
        })?;
        for code in 0..count {
            let mut poly = digits(code, p, k as usize);
            poly.push(1);
            if is_irreducible(&prime, &poly) {
                return Self::new(p, poly);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

/// Minimal arithmetic interface shared by F_p and F_q.
pub(crate) trait Arith {
    fn size(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

pub(crate) struct PrimeField(pub u32);

impl Arith for PrimeField {
    fn size(&self) -> u32 {
        self.0
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }
    fn neg(&self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: u32) -> u32 {
        (1..self.0).find(|&b| self.mul(a, b) == 1).expect("nonzero")
    }
}

impl Arith for BaseField {
    #[inline]
    fn size(&self) -> u32 {
        self.q
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline]
    fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.inv[a as usize] as u32
    }
}

impl BaseField {
    pub fn add(&self, a: u32, b: u32) -> u32 {
        Arith::add(self, a, b)
    }
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        Arith::sub(self, a, b)
    }
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        Arith::mul(self, a, b)
    }
    pub fn neg(&self, a: u32) -> u32 {
        Arith::neg(self, a)
    }
    /// Inverse of a nonzero element.
    pub fn inv(&self, a: u32) -> u32 {
        Arith::inv(self, a)
    }
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic `m`.
pub(crate) fn poly_rem<F: Arith>(f: &F, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = trim(a.to_vec());
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(lead, c));
        }
        r = trim(r);
    }
    r.resize(dm, 0);
    r
}

pub(crate) fn poly_mulmod<F: Arith>(f: &F, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = f.add(prod[i + j], f.mul(x, y));
        }
    }
    poly_rem(f, &prod, m)
}

/// Irreducibility by trial division by every monic polynomial of degree
/// at most half the degree.
pub(crate) fn is_irreducible<F: Arith>(f: &F, m: &[u32]) -> bool {
    let d = m.len() - 1;
    if d <= 1 {
        return d == 1;
    }
    let q = f.size();
    for deg in 1..=d / 2 {
        let count = q.pow(deg as u32);
        for code in 0..count {
            let mut div = digits(code, q, deg);
            div.push(1);
            if poly_rem(f, m, &div).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_tables() {
        let f = BaseField::first(2, 2).unwrap();
        assert_eq!(f.poly, vec![1, 1, 1]); // y^2 + y + 1
                                           // y * y = y + 1: index 2 * 2 = 3
        assert_eq!(f.mul(2, 2), 3);
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.add(a, f.neg(a)), 0);
        }
    }

    #[test]
    fn reducible_rejected() {
        // y^2 + 1 = (y + 1)^2 over F_2
        assert!(matches!(
            BaseField::new(2, vec![1, 0, 1]),
            Err(FieldError::Reducible(_))
        ));
        assert!(BaseField::new(4, vec![0, 1]).is_err());
    }

    #[test]
    fn field_axioms_f9() {
        let f = BaseField::first(3, 2).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..9 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }
}
