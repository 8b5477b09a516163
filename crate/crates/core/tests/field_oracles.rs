//! Field arithmetic, discrete logs and characters against schoolbook
//! polynomial arithmetic and brute-force power sets.

use num_complex::Complex64;
use proptest::prelude::*;

use primsieve::field::FieldCtx;

/// Prime-q fields, where coordinates are plain residues mod p.
const PRIME_FIELDS: &[(u32, u32)] = &[(2, 5), (3, 2), (3, 4), (5, 3), (7, 2), (11, 2), (13, 2), (3, 6)];

/// Product of coordinate vectors (low degree first) modulo the monic modulus.
fn poly_mulmod(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let r = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * r];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for d in (r..2 * r).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for (k, &m) in modulus.iter().enumerate() {
            let idx = d - r + k;
            prod[idx] = (prod[idx] + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    prod[..r].iter().map(|&x| x as u32).collect()
}

fn naive_order(ctx: &FieldCtx, a: u32) -> u32 {
    let one = ctx.exp(0);
    let mut x = a;
    let mut n = 1;
    while x != one {
        x = ctx.mul(x, a);
        n += 1;
    }
    n
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn multiplication_is_polynomial_multiplication() {
    for &(p, r) in PRIME_FIELDS {
        let ctx = FieldCtx::build(p, 1, r, 7).unwrap();
        let modulus = ctx.ext_poly().to_vec();
        let step = (ctx.order() / 40).max(1);
        for a in (0..ctx.order()).step_by(step as usize) {
            for b in (0..ctx.order()).step_by(step as usize + 3) {
                let want = poly_mulmod(p, &modulus, &ctx.coords(a), &ctx.coords(b));
                assert_eq!(ctx.coords(ctx.mul(a, b)), want, "F_{p}^{r}: {a} * {b}");
                let sum: Vec<u32> = ctx
                    .coords(a)
                    .iter()
                    .zip(ctx.coords(b))
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                assert_eq!(ctx.coords(ctx.add(a, b)), sum);
            }
        }
    }
}

#[test]
fn generator_and_primitive_set() {
    for &(p, k, r) in &[(3, 1, 2), (2, 2, 3), (5, 1, 2), (2, 3, 2), (3, 2, 2), (2, 1, 6)] {
        let ctx = FieldCtx::build(p, k, r, 11).unwrap();
        let m = ctx.order() - 1;
        assert_eq!(naive_order(&ctx, ctx.generator()), m);
        let prim = ctx.primitive_elements();
        let naive: Vec<u32> = ctx.nonzero().filter(|&a| naive_order(&ctx, a) == m).collect();
        let mut sorted = prim.clone();
        sorted.sort();
        assert_eq!(sorted, naive, "F_{p}^{k}^{r}");
        let phi = (1..=m as u64).filter(|&j| gcd(j, m as u64) == 1).count();
        assert_eq!(prim.len(), phi);
        for a in ctx.nonzero() {
            assert_eq!(ctx.exp(ctx.dlog(a).unwrap() as u64), a);
            assert_eq!(ctx.is_primitive(a), ctx.is_primitive_by_powering(a));
        }
        assert!(ctx.dlog(0).is_err());
    }
}

#[test]
fn e_free_counts_match_power_sets() {
    for &(p, k, r) in &[(3, 1, 2), (2, 2, 3), (7, 1, 2), (3, 1, 4)] {
        let ctx = FieldCtx::build(p, k, r, 3).unwrap();
        let m = (ctx.order() - 1) as u64;
        let all: Vec<u32> = (0..ctx.order()).collect();
        for e in (1..=m).filter(|e| m.is_multiple_of(*e)) {
            // a is e-free iff it is not a d-th power for any prime d | e.
            let primes: Vec<u64> = (2..=e).filter(|&d| e % d == 0 && (2..d).all(|x| d % x != 0)).collect();
            let powers: Vec<std::collections::BTreeSet<u32>> = primes
                .iter()
                .map(|&d| ctx.nonzero().map(|b| ctx.pow(b, d)).collect())
                .collect();
            let naive = ctx.nonzero().filter(|a| powers.iter().all(|s| !s.contains(a))).count();
            assert_eq!(ctx.count_e_free(&all, e).unwrap(), naive, "F_{p}^{k}^{r}, e = {e}");
            let nonzero: Vec<u32> = ctx.nonzero().collect();
            let vino = ctx.vinogradov_count(&nonzero, e).unwrap();
            assert!((vino - naive as f64).abs() < 1e-6, "e = {e}: {vino} vs {naive}");
        }
        assert!(ctx.vinogradov_count(&all, m).is_err(), "0 has no discrete log");
    }
}

#[test]
fn characters_are_homomorphisms_with_orthogonality() {
    let ctx = FieldCtx::build(5, 1, 2, 1).unwrap();
    let m = (ctx.order() - 1) as u64;
    let all: Vec<u32> = ctx.nonzero().collect();
    for j in 0..m {
        let chi = ctx.character(j);
        for (a, b) in [(3, 7), (10, 22), (1, 24)] {
            let lhs = ctx.char_value(chi, ctx.mul(a, b));
            let rhs = ctx.char_value(chi, a) * ctx.char_value(chi, b);
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert_eq!(ctx.char_value(chi, 0), Complex64::new(0.0, 0.0));
        let s = ctx.char_sum(&all, chi);
        let want = if j == 0 { m as f64 } else { 0.0 };
        assert!((s - Complex64::new(want, 0.0)).norm() < 1e-9, "j = {j}: {s}");
    }
    for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
        let chars = ctx.characters_of_order(d).unwrap();
        assert_eq!(chars.len() as u64, (1..=d).filter(|&u| gcd(u, d) == 1).count() as u64);
        assert!(chars.iter().all(|c| c.order as u64 == d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn spectrum_matches_direct_sums(field in 0usize..4, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 729)) {
        let (p, k, r) = [(3, 1, 3), (2, 2, 2), (7, 1, 2), (3, 1, 6)][field];
        let ctx = FieldCtx::build(p, k, r, seed % 16).unwrap();
        let subset: Vec<u32> = (0..ctx.order()).filter(|&a| bits[a as usize]).collect();
        let spec = ctx.char_sum_spectrum(&subset);
        for j in [0u64, 1, 2, (ctx.order() - 2) as u64] {
            let direct = ctx.char_sum(&subset, ctx.character(j));
            prop_assert!((spec[j as usize] - direct).norm() < 1e-6, "j = {}", j);
        }
        prop_assert!((ctx.true_k(&subset) - ctx.true_k_direct(&subset)).abs() < 1e-6);
    }

    #[test]
    fn field_axioms(seed in 0u64..8, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let ctx = FieldCtx::build(2, 2, 3, seed).unwrap();
        let (a, b, c) = (a % 64, b % 64, c % 64);
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
        prop_assert_eq!(ctx.add(a, ctx.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.exp(0));
        }
        prop_assert_eq!(ctx.parse_elem(&ctx.format_elem(a)).unwrap(), a);
    }
}
