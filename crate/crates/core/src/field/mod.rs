//! Explicit small fields F_{q^r} as a tower F_p -> F_q -> F_{q^r}, with a
//! full discrete-log table and multiplicative characters.
//!
//! Elements are `u32` indices: the coefficient vector (c_0, ..., c_{r-1})
//! over F_q, c_i being themselves indices of F_q, packed as sum c_i q^i.

mod base;
mod chars;

use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use base::{BaseField, MAX_BASE_Q};
pub(crate) use chars::MuSign;
pub use chars::{prime_divisors, Character};

use crate::numtheory::{factorize, FactorBudget, Factorization, NumError};
pub(crate) use base::digits;
use base::{is_irreducible, poly_mulmod, undigits};

/// Default size ceiling for enumeration: 3^12.
pub const FIELD_CEILING: u32 = 531_441;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("bad polynomial: {0}")]
    BadPolynomial(String),
    #[error("polynomial is reducible: {0}")]
    Reducible(String),
    #[error("field of order {order} exceeds the ceiling {limit}")]
    TooLarge { order: u64, limit: u64 },
    #[error("element {0} is not primitive")]
    NotPrimitive(String),
    #[error("the zero element has no discrete logarithm")]
    ZeroElement,
    #[error("{e} does not divide {group_order}")]
    NotDivisor { e: u64, group_order: u64 },
    #[error("subset contains 0")]
    ZeroInSubset,
    #[error("element index {0} out of range")]
    OutOfRange(u32),
    #[error("cannot parse element {0:?}")]
    Parse(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone)]
pub struct FieldCtx {
    base: BaseField,
    r: u32,
    ext_poly: Vec<u32>,
    order: u32,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    order_fact: Factorization,
    /// exp(2 pi i t / (order - 1)) for t in 0..order-1.
    roots: Vec<Complex64>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.base.p)
            .field("q", &self.base.q)
            .field("r", &self.r)
            .field("base_poly", &self.base.poly)
            .field("ext_poly", &self.ext_poly)
            .field("generator", &self.format_elem(self.generator))
            .finish()
    }
}

fn check_order(q: u32, r: u32, ceiling: u32) -> Result<u32, FieldError> {
    let order = (q as u64).checked_pow(r).unwrap_or(u64::MAX);
    if r == 0 || order > ceiling as u64 {
        return Err(FieldError::TooLarge {
            order,
            limit: ceiling as u64,
        });
    }
    Ok(order as u32)
}

/// Builds F_{p^{k r}} with the first irreducible base modulus and a seeded
/// random irreducible extension modulus and generator.
pub fn build_field(p: u32, k: u32, r: u32, seed: u64) -> Result<FieldCtx, FieldError> {
    FieldCtx::build(p, k, r, seed)
}

impl FieldCtx {
    pub fn build(p: u32, k: u32, r: u32, seed: u64) -> Result<Self, FieldError> {
        Self::build_with_ceiling(p, k, r, seed, FIELD_CEILING)
    }

    pub fn build_with_ceiling(p: u32, k: u32, r: u32, seed: u64, ceiling: u32) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::BadPolynomial("base degree must be at least 1".into()));
        }
        let q = p.checked_pow(k).ok_or(FieldError::TooLarge {
            order: u64::MAX,
            limit: ceiling as u64,
        })?;
        check_order(q, r, ceiling)?;
        let base = BaseField::first(p, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ext_poly = if r == 1 {
            vec![0, 1]
        } else {
            loop {
                let mut poly: Vec<u32> = (0..r).map(|_| rng.gen_range(0..q)).collect();
                poly.push(1);
                if poly[0] != 0 && is_irreducible(&base, &poly) {
                    break poly;
                }
            }
        };
        Self::assemble(base, ext_poly, GeneratorChoice::Random(&mut rng), ceiling)
    }

    /// A field with explicitly given moduli: `base_poly` over F_p (None for
    /// q = p) and `ext_poly` over F_q, both monic and low degree first.
    /// With `generator` the given element must be primitive; otherwise the
    /// first primitive element in index order is used.
    pub fn with_polys(
        p: u32,
        base_poly: Option<Vec<u32>>,
        ext_poly: Vec<u32>,
        generator: Option<u32>,
    ) -> Result<Self, FieldError> {
        let base = match base_poly {
            Some(poly) => BaseField::new(p, poly)?,
            None => BaseField::prime(p)?,
        };
        if ext_poly.len() < 2 || *ext_poly.last().unwrap() != 1 || ext_poly.iter().any(|&c| c >= base.q) {
            return Err(FieldError::BadPolynomial(format!(
                "{ext_poly:?} is not monic over F_{}",
                base.q
            )));
        }
        if !is_irreducible(&base, &ext_poly) {
            return Err(FieldError::Reducible(format!("{ext_poly:?} over F_{}", base.q)));
        }
        let choice = match generator {
            Some(g) => GeneratorChoice::Given(g),
            None => GeneratorChoice::First,
        };
        Self::assemble(base, ext_poly, choice, FIELD_CEILING)
    }

    fn assemble(
        base: BaseField,
        ext_poly: Vec<u32>,
        choice: GeneratorChoice<'_>,
        ceiling: u32,
    ) -> Result<Self, FieldError> {
        let r = ext_poly.len() as u32 - 1;
        let order = check_order(base.q, r, ceiling)?;
        let order_fact = factorize(&BigUint::from(order - 1), &[], FactorBudget::default())?;
        let mut ctx = Self {
            base,
            r,
            ext_poly,
            order,
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
            order_fact,
            roots: Vec::new(),
        };
        let g = match choice {
            GeneratorChoice::Given(g) => {
                if g == 0 || g >= order || !ctx.is_primitive_by_powering(g) {
                    return Err(FieldError::NotPrimitive(ctx.format_elem(g.min(order - 1))));
                }
                g
            }
            GeneratorChoice::First => (1..order)
                .find(|&g| ctx.is_primitive_by_powering(g))
                .expect("a field has a primitive element"),
            GeneratorChoice::Random(rng) => loop {
                let g = rng.gen_range(1..order);
                if ctx.is_primitive_by_powering(g) {
                    break g;
                }
            },
        };
        ctx.generator = g;
        ctx.tabulate()?;
        Ok(ctx)
    }

    /// Power table g^0..g^{n-2}, and its inverse; fails if g is not a
    /// generator (some element repeats).
    fn tabulate(&mut self) -> Result<(), FieldError> {
        let n = self.order as usize;
        let mut exp = Vec::with_capacity(n - 1);
        let mut log = vec![u32::MAX; n];
        // g * x^i for each basis vector, as coordinate vectors.
        let g = self.coords(self.generator);
        let columns: Vec<Vec<u32>> = (0..self.r as usize)
            .map(|i| {
                let mut xi = vec![0; i + 1];
                xi[i] = 1;
                poly_mulmod(&self.base, &g, &xi, &self.ext_poly)
            })
            .collect();
        let mut cur = vec![0u32; self.r as usize];
        cur[0] = 1;
        for t in 0..n - 1 {
            let idx = undigits(&cur, self.base.q);
            if log[idx as usize] != u32::MAX {
                return Err(FieldError::NotPrimitive(self.format_elem(self.generator)));
            }
            log[idx as usize] = t as u32;
            exp.push(idx);
            let mut next = vec![0u32; self.r as usize];
            for (c, col) in cur.iter().zip(&columns) {
                if *c == 0 {
                    continue;
                }
                for (slot, &v) in next.iter_mut().zip(col) {
                    *slot = self.base.add(*slot, self.base.mul(*c, v));
                }
            }
            cur = next;
        }
        if undigits(&cur, self.base.q) != 1 {
            return Err(FieldError::NotPrimitive(self.format_elem(self.generator)));
        }
        let m = (n - 1) as f64;
        self.roots = (0..n - 1)
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / m))
            .collect();
        self.exp = exp;
        self.log = log;
        Ok(())
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = self.coords(a);
        let mut acc = vec![0u32; self.r as usize];
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&self.base, &acc, &base, &self.ext_poly);
            }
            base = poly_mulmod(&self.base, &base, &base, &self.ext_poly);
            e >>= 1;
        }
        undigits(&acc, self.base.q)
    }

    /// g^(n-1) = 1 and g^((n-1)/l) != 1 for every prime l | n-1, by
    /// polynomial powering (independent of the log table).
    pub fn is_primitive_by_powering(&self, g: u32) -> bool {
        let m = (self.order - 1) as u64;
        g != 0 && self.pow_slow(g, m) == 1 && self.order_primes().iter().all(|&l| self.pow_slow(g, m / l) != 1)
    }

    pub fn p(&self) -> u32 {
        self.base.p
    }

    /// Degree of F_q over F_p.
    pub fn k(&self) -> u32 {
        self.base.k
    }

    pub fn q(&self) -> u32 {
        self.base.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// q^r.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn base_poly(&self) -> &[u32] {
        &self.base.poly
    }

    pub fn ext_poly(&self) -> &[u32] {
        &self.ext_poly
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn order_fact(&self) -> &Factorization {
        &self.order_fact
    }

    /// Prime divisors of q^r - 1.
    pub fn order_primes(&self) -> Vec<u64> {
        self.order_fact
            .primes()
            .map(|p| p.try_into().expect("small field"))
            .collect()
    }

    pub fn coords(&self, a: u32) -> Vec<u32> {
        digits(a, self.base.q, self.r as usize)
    }

    pub fn from_coords(&self, c: &[u32]) -> u32 {
        debug_assert!(c.len() == self.r as usize && c.iter().all(|&x| x < self.base.q));
        undigits(c, self.base.q)
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let q = self.base.q;
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.r {
            out += self.base.add(a % q, b % q) * scale;
            a /= q;
            b /= q;
            scale *= q;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let c: Vec<u32> = self.coords(a).into_iter().map(|x| self.base.neg(x)).collect();
        undigits(&c, self.base.q)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let m = self.order as u64 - 1;
        self.exp[((self.log[a as usize] as u64 + self.log[b as usize] as u64) % m) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        let t = self.dlog(a)?;
        let m = self.order - 1;
        Ok(self.exp[((m - t) % m) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return u32::from(e == 0);
        }
        let m = self.order as u64 - 1;
        self.exp[((self.log[a as usize] as u64 * (e % m)) % m) as usize]
    }

    /// F_q-scalar multiple of a field element.
    pub fn scale(&self, c: u32, a: u32) -> u32 {
        let v: Vec<u32> = self.coords(a).into_iter().map(|x| self.base.mul(c, x)).collect();
        undigits(&v, self.base.q)
    }

    pub fn dlog(&self, a: u32) -> Result<u32, FieldError> {
        match self.log.get(a as usize) {
            None => Err(FieldError::OutOfRange(a)),
            Some(&u32::MAX) => Err(FieldError::ZeroElement),
            Some(&t) => Ok(t),
        }
    }

    /// g^t.
    pub fn exp(&self, t: u64) -> u32 {
        self.exp[(t % (self.order as u64 - 1)) as usize]
    }

    /// All nonzero elements, in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = u32> {
        1..self.order
    }

    /// Primitive elements in increasing order of discrete log.
    pub fn primitive_elements(&self) -> Vec<u32> {
        let m = (self.order - 1) as u64;
        let primes = self.order_primes();
        (0..m)
            .filter(|t| primes.iter().all(|l| t % l != 0))
            .map(|t| self.exp[t as usize])
            .collect()
    }

    pub fn is_primitive(&self, a: u32) -> bool {
        match self.dlog(a) {
            Ok(t) => self.order_primes().iter().all(|l| !(t as u64).is_multiple_of(*l)),
            Err(_) => false,
        }
    }

    /// Polynomial notation in x when q = p (`2+2x+x^2`), otherwise a tuple
    /// of F_q indices (`(1,0,3)`).
    pub fn format_elem(&self, a: u32) -> String {
        let c = self.coords(a);
        if self.base.k > 1 {
            let parts: Vec<String> = c.iter().map(u32::to_string).collect();
            return format!("({})", parts.join(","));
        }
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let coef = if ci == 1 && i > 0 {
                String::new()
            } else {
                ci.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Inverse of [`format_elem`](Self::format_elem); also accepts the tuple
    /// form for any field.
    pub fn parse_elem(&self, s: &str) -> Result<u32, FieldError> {
        let err = || FieldError::Parse(s.to_string());
        let s = s.trim();
        let q = self.base.q;
        let mut c = vec![0u32; self.r as usize];
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != c.len() {
                return Err(err());
            }
            for (slot, part) in c.iter_mut().zip(parts) {
                *slot = part.trim().parse::<u32>().ok().filter(|&v| v < q).ok_or_else(err)?;
            }
            return Ok(undigits(&c, q));
        }
        if self.base.k > 1 {
            return Err(err());
        }
        for term in s.split('+') {
            let term = term.trim();
            let (coef, power) = match term.find('x') {
                None => (term, 0usize),
                Some(pos) => {
                    let coef = term[..pos].trim_end_matches('*');
                    let rest = &term[pos + 1..];
                    let power = match rest.strip_prefix('^') {
                        Some(e) => e.parse().map_err(|_| err())?,
                        None if rest.is_empty() => 1,
                        None => return Err(err()),
                    };
                    (if coef.is_empty() { "1" } else { coef }, power)
                }
            };
            let v: u32 = coef.parse().map_err(|_| err())?;
            if power >= c.len() {
                return Err(err());
            }
            c[power] = self.base.add(c[power], v % q);
        }
        Ok(undigits(&c, q))
    }
}

enum GeneratorChoice<'a> {
    Given(u32),
    First,
    Random(&'a mut ChaCha8Rng),
}
