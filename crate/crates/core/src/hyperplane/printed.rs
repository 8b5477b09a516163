//! The three explicit exceptional configurations, stored exactly as
//! presented: modulus, primitive element, listed primitive elements and
//! hyperplanes as `point + span(directions)`.

use serde::{Deserialize, Serialize};

use super::{make_g_a, ExceptionCertificate, HyperplaneError, HyperplaneSet};
use crate::field::{FieldCtx, FieldError};
use crate::numtheory::prime_power;

#[derive(Clone, Debug)]
pub struct PrintedConstruction {
    pub q: u32,
    pub r: u32,
    pub modulus: &'static str,
    /// Monic modulus over F_q, low degree first.
    pub ext_poly: &'static [u32],
    pub alpha: &'static str,
    pub listed_primitive: &'static [&'static str],
    pub planes: &'static [(&'static str, &'static [&'static str])],
    /// (exponent t, hyperplane number): alpha^t lies on H_i.
    pub claims: &'static [(u32, usize)],
}

pub fn printed_constructions() -> Vec<PrintedConstruction> {
    vec![
        PrintedConstruction {
            q: 3,
            r: 2,
            modulus: "x^2-2",
            ext_poly: &[1, 0, 1],
            alpha: "1+x",
            listed_primitive: &["1+x", "1+2x", "2+2x", "2+x"],
            planes: &[("0", &["1+x"]), ("0", &["1+2x"])],
            claims: &[(1, 1), (5, 1), (3, 2), (7, 2)],
        },
        PrintedConstruction {
            q: 5,
            r: 2,
            modulus: "x^2-2",
            ext_poly: &[3, 0, 1],
            alpha: "2+x",
            listed_primitive: &["2+x", "2+4x", "4+2x", "4+3x", "3+4x", "3+x", "1+3x", "1+2x"],
            planes: &[("0", &["2+x"]), ("0", &["3+x"])],
            claims: &[],
        },
        PrintedConstruction {
            q: 3,
            r: 3,
            modulus: "x^3+2x+2",
            ext_poly: &[2, 2, 0, 1],
            alpha: "2+2x",
            listed_primitive: &[
                "2+2x",
                "1+2x",
                "2x^2",
                "1+x^2",
                "2x",
                "2+x+x^2",
                "2+x+2x^2",
                "1+2x^2",
                "2+2x+2x^2",
                "2+2x+x^2",
                "2x+2x^2",
                "x+2x^2",
            ],
            planes: &[("2x^2", &["1", "x"]), ("2x", &["1", "x^2"]), ("x^2+1", &["x^2", "1+x"])],
            claims: &[],
        },
    ]
}

impl PrintedConstruction {
    /// The field with the printed modulus and alpha as generator.
    pub fn field(&self) -> Result<FieldCtx, FieldError> {
        let plain = FieldCtx::with_polys(self.q, None, self.ext_poly.to_vec(), None)?;
        let alpha = plain.parse_elem(self.alpha)?;
        FieldCtx::with_polys(self.q, None, self.ext_poly.to_vec(), Some(alpha))
    }

    pub fn hyperplanes(&self, ctx: &FieldCtx) -> Result<HyperplaneSet, HyperplaneError> {
        let planes = self
            .planes
            .iter()
            .map(|(point, dirs)| {
                Ok((
                    ctx.parse_elem(point)?,
                    dirs.iter().map(|d| ctx.parse_elem(d)).collect::<Result<Vec<_>, _>>()?,
                ))
            })
            .collect::<Result<Vec<_>, FieldError>>()?;
        HyperplaneSet::from_affine(ctx, &planes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub q: u32,
    pub r: u32,
    pub modulus: String,
    pub alpha: String,
    /// (t, alpha^t) over the primitive powers.
    pub primitive: Vec<(u32, String)>,
    /// The printed list equals the computed set of primitive elements.
    pub listed_primitive_match: bool,
    /// Primitive element and the first hyperplane (1-based) containing it.
    pub covering: Vec<(String, usize)>,
    pub uncovered: Vec<String>,
    pub g_a: Vec<String>,
    pub claims_hold: bool,
    pub certificate: Option<String>,
    pub ok: bool,
}

fn report(c: &PrintedConstruction) -> Result<ConstructionReport, HyperplaneError> {
    let ctx = c.field()?;
    let hset = c.hyperplanes(&ctx)?;
    let mut primitive: Vec<(u32, String)> = ctx
        .primitive_elements()
        .into_iter()
        .map(|a| (ctx.dlog(a).expect("nonzero"), ctx.format_elem(a)))
        .collect();
    primitive.sort();
    let mut listed: Vec<u32> = c
        .listed_primitive
        .iter()
        .map(|s| ctx.parse_elem(s))
        .collect::<Result<_, _>>()?;
    listed.sort();
    let mut computed = ctx.primitive_elements();
    computed.sort();
    let listed_primitive_match = listed == computed;

    let mut covering = Vec::new();
    let mut uncovered = Vec::new();
    for &a in &ctx.primitive_elements() {
        match hset.first_cover(&ctx, a) {
            Some(i) => covering.push((ctx.format_elem(a), i + 1)),
            None => uncovered.push(ctx.format_elem(a)),
        }
    }
    let claims_hold = c
        .claims
        .iter()
        .all(|&(t, h)| hset.on_hyperplane(&ctx, h - 1, ctx.exp(t as u64)));
    let g_a: Vec<String> = make_g_a(&ctx, &hset)?.into_iter().map(|a| ctx.format_elem(a)).collect();
    let cert = ExceptionCertificate::from_hset(&ctx, hset)?;
    let verified = match &cert {
        Some(cert) => cert.verify(&ctx).is_ok(),
        None => false,
    };
    let ok = listed_primitive_match
        && uncovered.is_empty()
        && claims_hold
        && verified
        && g_a.len() as u32 == (ctx.q() - 1).pow(ctx.r());
    Ok(ConstructionReport {
        q: c.q,
        r: c.r,
        modulus: c.modulus.to_string(),
        alpha: c.alpha.to_string(),
        primitive,
        listed_primitive_match,
        covering,
        uncovered,
        g_a,
        claims_hold,
        certificate: cert.map(|cert| cert.to_line(&ctx)),
        ok,
    })
}

pub fn verify_printed_constructions() -> Result<Vec<ConstructionReport>, HyperplaneError> {
    printed_constructions().iter().map(report).collect()
}

/// The field used for (q, r) by the search and certificates: the printed
/// presentation where there is one, otherwise the seed-0 build.
pub fn canonical_field(q: u32, r: u32) -> Result<FieldCtx, FieldError> {
    if let Some(c) = printed_constructions().into_iter().find(|c| (c.q, c.r) == (q, r)) {
        return c.field();
    }
    let (p, k) = prime_power(q as u64).ok_or(FieldError::NotPrime(q))?;
    FieldCtx::build(p as u32, k, r, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_three_constructions_verify() {
        let reports = verify_printed_constructions().unwrap();
        assert_eq!(reports.len(), 3);
        for rep in &reports {
            assert!(rep.ok, "{rep:?}");
        }
        let counts: Vec<usize> = reports.iter().map(|r| r.covering.len()).collect();
        assert_eq!(counts, [4, 8, 12]);
    }

    #[test]
    fn f9_exponents_and_hyperplanes() {
        let rep = &verify_printed_constructions().unwrap()[0];
        let exps: Vec<u32> = rep.primitive.iter().map(|p| p.0).collect();
        assert_eq!(exps, [1, 3, 5, 7]);
        assert_eq!(rep.g_a.len(), 4);
        // H1 holds alpha and alpha^5, H2 alpha^3 and alpha^7.
        let on = |e: &str| rep.covering.iter().find(|c| c.0 == e).unwrap().1;
        assert_eq!((on("1+x"), on("2+2x"), on("1+2x"), on("2+x")), (1, 1, 2, 2));
    }
}
