//! Exhaustive search over hyperplane sets, one representative per set of
//! hyperplanes: rows normalised (first nonzero entry 1), taken as unordered
//! r-subsets, times all q^r offset vectors.

use std::thread;

use super::{dot, rank, ExceptionCertificate, HyperplaneError, HyperplaneSet};
use crate::field::{digits, FieldCtx};

/// Largest field searched: 3^6.
pub const SEARCH_CEILING: u32 = 729;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Upper bound on representatives examined.
    pub max_classes: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_classes: 200_000_000,
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of representatives for (q, r) before discarding dependent row
/// subsets: C((q^r - 1)/(q - 1), r) q^r.
pub fn search_classes(q: u32, r: u32) -> u128 {
    let n = (q as u128).pow(r);
    binomial((n - 1) / (q as u128 - 1), r as u128) * n
}

fn normalized_rows(ctx: &FieldCtx) -> Vec<Vec<u32>> {
    let (q, r) = (ctx.q(), ctx.r() as usize);
    (1..q.pow(r as u32))
        .map(|code| digits(code, q, r))
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every hyperplane set (one per set of hyperplanes) whose G_A contains
/// no primitive element, sorted.
pub fn exhaustive_exception_search(
    ctx: &FieldCtx,
    budget: SearchBudget,
) -> Result<Vec<ExceptionCertificate>, HyperplaneError> {
    if ctx.order() > SEARCH_CEILING {
        return Err(HyperplaneError::TooLarge {
            order: ctx.order() as u64,
            limit: SEARCH_CEILING as u64,
        });
    }
    let (q, r) = (ctx.q(), ctx.r() as usize);
    let classes = search_classes(q, r as u32);
    if classes > budget.max_classes {
        return Err(HyperplaneError::Budget {
            classes,
            budget: budget.max_classes,
        });
    }
    let rows = normalized_rows(ctx);
    let prim: Vec<Vec<u32>> = ctx.primitive_elements().iter().map(|&a| ctx.coords(a)).collect();
    let offsets: Vec<Vec<u32>> = (0..q.pow(r as u32)).map(|code| digits(code, q, r)).collect();
    let subsets = combinations(rows.len(), r);

    let examine = |subset: &Vec<usize>, found: &mut Vec<HyperplaneSet>| {
        let m: Vec<Vec<u32>> = subset.iter().map(|&i| rows[i].clone()).collect();
        if rank(ctx.base(), &m) < r {
            return;
        }
        // Images of the primitive elements under v -> (L_i(v))_i; offset b
        // covers everything iff each image agrees with b somewhere.
        let images: Vec<Vec<u32>> = prim
            .iter()
            .map(|v| m.iter().map(|row| dot(ctx.base(), row, v)).collect())
            .collect();
        for b in &offsets {
            if images.iter().all(|w| w.iter().zip(b).any(|(x, y)| x == y)) {
                found.push(HyperplaneSet {
                    q,
                    r: r as u32,
                    functionals: m.clone(),
                    offsets: b.clone(),
                });
            }
        }
    };

    let threads = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = subsets.len().div_ceil(threads).max(1);
    // Single-threaded targets (wasm) cannot spawn.
    let sets: Vec<HyperplaneSet> = if threads == 1 {
        let mut found = Vec::new();
        for subset in &subsets {
            examine(subset, &mut found);
        }
        found
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = subsets
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        let mut found = Vec::new();
                        for subset in part {
                            examine(subset, &mut found);
                        }
                        found
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };
    let mut sets: Vec<HyperplaneSet> = sets.iter().map(|h| h.canonical(ctx)).collect();
    sets.sort();
    sets.into_iter()
        .map(|h| ExceptionCertificate::from_hset(ctx, h))
        .collect::<Result<Option<Vec<_>>, _>>()
        .map(|certs| certs.expect("search only keeps covering sets"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        // (3,3): 13 normalised rows, 286 triples, 27 offsets.
        assert_eq!(search_classes(3, 3), 286 * 27);
        assert_eq!(search_classes(3, 2), 6 * 9);
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(2, 3).len(), 0);
    }

    #[test]
    fn independent_triples_over_f3() {
        let ctx = FieldCtx::build(3, 1, 3, 0).unwrap();
        let rows = normalized_rows(&ctx);
        assert_eq!(rows.len(), 13);
        let independent = combinations(13, 3)
            .iter()
            .filter(|s| rank(ctx.base(), &s.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>()) == 3)
            .count();
        // |GL_3(F_3)| / (2^3 * 3!) = 11232 / 48
        assert_eq!(independent, 234);
    }

    #[test]
    fn f9_search_contains_the_printed_configuration() {
        let c = &crate::hyperplane::printed_constructions()[0];
        let ctx = c.field().unwrap();
        let printed = c.hyperplanes(&ctx).unwrap().canonical(&ctx);
        let certs = exhaustive_exception_search(&ctx, SearchBudget::default()).unwrap();
        assert!(certs.iter().any(|cert| cert.hset == printed));
        for cert in &certs {
            cert.verify(&ctx).unwrap();
            let line = cert.to_line(&ctx);
            assert_eq!(&ExceptionCertificate::parse_line(&line, &ctx).unwrap(), cert);
        }
        let mut sorted = certs.clone();
        sorted.sort_by(|a, b| a.hset.cmp(&b.hset));
        assert_eq!(sorted, certs);
    }

    #[test]
    fn ceiling_and_budget() {
        let big = FieldCtx::build(3, 1, 7, 0).unwrap();
        assert!(matches!(
            exhaustive_exception_search(&big, SearchBudget::default()),
            Err(HyperplaneError::TooLarge { .. })
        ));
        let f = FieldCtx::build(3, 1, 3, 0).unwrap();
        assert!(matches!(
            exhaustive_exception_search(&f, SearchBudget { max_classes: 10 }),
            Err(HyperplaneError::Budget { .. })
        ));
    }
}
