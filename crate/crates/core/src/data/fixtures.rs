//! Factorization fixtures: one `q r p1[^e1] p2[^e2] ...` line per entry,
//! `#` starts a comment. Every entry is re-multiplied and primality-checked
//! on load.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::numtheory::{factor_q_pow_minus_one, FactorBudget, Factorization, NumError};

const BUNDLED: &str = include_str!("../../data/factors.txt");

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: entry ({q}, {r}): {reason}")]
    Invalid {
        line: usize,
        q: u64,
        r: u32,
        reason: String,
    },
    #[error("line {line}: duplicate entry ({q}, {r})")]
    Duplicate { line: usize, q: u64, r: u32 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorFixtures {
    entries: BTreeMap<(u64, u32), Factorization>,
}

fn parse_power(tok: &str) -> Option<(BigUint, u32)> {
    match tok.split_once('^') {
        Some((p, e)) => Some((p.parse().ok()?, e.parse().ok().filter(|&e: &u32| e >= 1)?)),
        None => Some((tok.parse().ok()?, 1)),
    }
}

impl FactorFixtures {
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut out = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |msg: String| FixtureError::Syntax { line, msg };
            let mut toks = content.split_whitespace();
            let q: u64 = toks
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|&q| q >= 2)
                .ok_or_else(|| syntax("expected q >= 2".into()))?;
            let r: u32 = toks
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|&r| r >= 1)
                .ok_or_else(|| syntax("expected r >= 1".into()))?;
            let pairs = toks
                .map(|t| parse_power(t).ok_or_else(|| syntax(format!("bad factor {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let n = BigUint::from(q).pow(r) - 1u32;
            // Only 2^1 - 1 = 1 has an empty factorization.
            if pairs.is_empty() && !n.is_one() {
                return Err(syntax("no factors listed".into()));
            }
            let fact = Factorization::checked(&n, pairs).map_err(|e| FixtureError::Invalid {
                line,
                q,
                r,
                reason: match e {
                    NumError::NotPrime(p) => format!("{p} is composite"),
                    NumError::ProductMismatch { actual, .. } => {
                        format!("product is {actual}, not q^r - 1 = {n}")
                    }
                    other => other.to_string(),
                },
            })?;
            if out.entries.insert((q, r), fact).is_some() {
                return Err(FixtureError::Duplicate { line, q, r });
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The fixtures shipped with the crate.
    pub fn bundled() -> &'static Self {
        static CELL: OnceLock<FactorFixtures> = OnceLock::new();
        CELL.get_or_init(|| Self::parse(BUNDLED).expect("bundled fixtures are valid"))
    }

    /// Entries of `other` override ours.
    pub fn merged(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(k, v)| (*k, v.clone())));
        Self { entries }
    }

    pub fn get(&self, q: u64, r: u32) -> Option<&Factorization> {
        self.entries.get(&(q, r))
    }

    pub fn insert(&mut self, q: u64, r: u32, fact: Factorization) {
        self.entries.insert((q, r), fact);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.keys().copied()
    }

    /// Canonical text: sorted by (q, r), primes increasing.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# q r p1[^e1] p2[^e2] ...\n");
        for ((q, r), f) in &self.entries {
            write!(out, "{q} {r}").unwrap();
            for (p, e) in f.factors() {
                if *e == 1 {
                    write!(out, " {p}").unwrap();
                } else {
                    write!(out, " {p}^{e}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Where a factorization came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorSource {
    Fixture,
    Computed,
}

/// `q^r - 1` from the fixtures if present, otherwise factored within the
/// budget.
pub fn factor_for(
    q: u64,
    r: u32,
    fixtures: &FactorFixtures,
    budget: FactorBudget,
) -> Result<(Factorization, FactorSource), NumError> {
    if let Some(f) = fixtures.get(q, r) {
        return Ok((f.clone(), FactorSource::Fixture));
    }
    factor_q_pow_minus_one(q, r, budget).map(|f| (f, FactorSource::Computed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_lines() {
        let f = FactorFixtures::parse("# comment\n5 4 2^4 3 13\n3 2 2^3   # trailing\n").unwrap();
        assert_eq!(f.get(5, 4).unwrap().n(), &BigUint::from(624u32));
        assert_eq!(f.get(3, 2).unwrap().omega(), 1);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn composite_factor_rejected_with_line() {
        let err = FactorFixtures::parse("3 2 2^3\n5 4 2^4 3 14\n").unwrap_err();
        match err {
            FixtureError::Invalid { line, q, r, reason } => {
                assert_eq!((line, q, r), (2, 5, 4));
                assert!(reason.contains("14 is composite"), "{reason}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn product_mismatch_and_syntax() {
        assert!(matches!(
            FactorFixtures::parse("5 4 2^4 3 11"),
            Err(FixtureError::Invalid { line: 1, .. })
        ));
        assert!(matches!(
            FactorFixtures::parse("\n5 x 2"),
            Err(FixtureError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            FactorFixtures::parse("5 4 2^0 3"),
            Err(FixtureError::Syntax { .. })
        ));
        assert!(matches!(FactorFixtures::parse("5 4"), Err(FixtureError::Syntax { .. })));
    }

    #[test]
    fn duplicates_rejected() {
        let err = FactorFixtures::parse("3 2 2^3\n3 2 2^3\n").unwrap_err();
        assert!(matches!(err, FixtureError::Duplicate { line: 2, q: 3, r: 2 }));
    }

    #[test]
    fn round_trip() {
        let f = FactorFixtures::parse("5 4 3 2^4 13\n3 3 2 13\n").unwrap();
        let again = FactorFixtures::parse(&f.to_text()).unwrap();
        assert_eq!(f, again);
        assert_eq!(again.to_text(), f.to_text());
    }

    #[test]
    fn bundled_loads() {
        let b = FactorFixtures::bundled();
        assert!(b.get(9, 38).is_some());
        assert!(b.get(4, 40).is_some());
    }
}
