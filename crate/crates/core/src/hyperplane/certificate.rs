//! Exception certificates and their one-line text form:
//! `q r | functional-matrix row-major | offsets | covered: elem->Hi ...`.
//! Elements are written in the notation of the field they were found in
//! (see [`canonical_field`](super::canonical_field)).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{HyperplaneError, HyperplaneSet};
use crate::field::FieldCtx;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionCertificate {
    pub q: u32,
    pub r: u32,
    pub hset: HyperplaneSet,
    /// Every primitive element with the (0-based) hyperplane covering it.
    pub covered: Vec<(u32, usize)>,
}

impl ExceptionCertificate {
    /// `None` if some primitive element avoids every hyperplane.
    pub fn from_hset(ctx: &FieldCtx, hset: HyperplaneSet) -> Result<Option<Self>, HyperplaneError> {
        Ok(hset.covering(ctx)?.map(|covered| Self {
            q: ctx.q(),
            r: ctx.r(),
            hset,
            covered,
        }))
    }

    /// Rechecks from scratch: general position, the listed elements are
    /// exactly the primitive elements, and each lies on its named C_i.
    pub fn verify(&self, ctx: &FieldCtx) -> Result<(), HyperplaneError> {
        let bad = |msg: String| Err(HyperplaneError::Certificate(msg));
        if (self.q, self.r) != (ctx.q(), ctx.r()) || (self.hset.q, self.hset.r) != (self.q, self.r) {
            return bad(format!(
                "certificate for ({}, {}) checked in F_{}^{}",
                self.q,
                self.r,
                ctx.q(),
                ctx.r()
            ));
        }
        HyperplaneSet::new(ctx, self.hset.functionals.clone(), self.hset.offsets.clone())?;
        let mut listed: BTreeMap<u32, usize> = BTreeMap::new();
        for &(a, i) in &self.covered {
            if listed.insert(a, i).is_some() {
                return bad(format!("{} listed twice", ctx.format_elem(a)));
            }
            if i >= self.r as usize || !self.hset.on_hyperplane(ctx, i, a) {
                return bad(format!("{} is not on H{}", ctx.format_elem(a), i + 1));
            }
        }
        let prim = ctx.primitive_elements();
        if let Some(&a) = prim.iter().find(|a| !listed.contains_key(a)) {
            return bad(format!("primitive element {} is not listed", ctx.format_elem(a)));
        }
        if let Some(&a) = listed.keys().find(|&&a| !ctx.is_primitive(a)) {
            return bad(format!("{} is not primitive", ctx.format_elem(a)));
        }
        Ok(())
    }

    pub fn to_line(&self, ctx: &FieldCtx) -> String {
        let matrix: Vec<String> = self.hset.functionals.iter().flatten().map(u32::to_string).collect();
        let offsets: Vec<String> = self.hset.offsets.iter().map(u32::to_string).collect();
        let covered: Vec<String> = self
            .covered
            .iter()
            .map(|&(a, i)| format!("{}->H{}", ctx.format_elem(a), i + 1))
            .collect();
        format!(
            "{} {} | {} | {} | covered: {}",
            self.q,
            self.r,
            matrix.join(" "),
            offsets.join(" "),
            covered.join(" ")
        )
    }

    /// Parses a line written by [`to_line`](Self::to_line); does not verify.
    pub fn parse_line(line: &str, ctx: &FieldCtx) -> Result<Self, HyperplaneError> {
        let err = |msg: &str| HyperplaneError::Parse(format!("{msg}: {line:?}"));
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [head, matrix, offsets, covered] = parts[..] else {
            return Err(err("expected four |-separated fields"));
        };
        let nums = |s: &str| -> Result<Vec<u32>, HyperplaneError> {
            s.split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| err("bad integer")))
                .collect()
        };
        let head = nums(head)?;
        let [q, r] = head[..] else {
            return Err(err("header must be `q r`"));
        };
        let entries = nums(matrix)?;
        let offsets = nums(offsets)?;
        let rr = r as usize;
        if entries.len() != rr * rr {
            return Err(err("matrix must have r^2 entries"));
        }
        let functionals = entries.chunks(rr).map(<[u32]>::to_vec).collect();
        let covered = covered
            .strip_prefix("covered:")
            .ok_or_else(|| err("missing `covered:`"))?
            .split_whitespace()
            .map(|pair| {
                let (elem, h) = pair.split_once("->").ok_or_else(|| err("pair must be elem->Hi"))?;
                let i: usize = h
                    .strip_prefix('H')
                    .and_then(|n| n.parse().ok())
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| err("bad hyperplane label"))?;
                Ok((ctx.parse_elem(elem)?, i - 1))
            })
            .collect::<Result<Vec<_>, HyperplaneError>>()?;
        Ok(Self {
            q,
            r,
            hset: HyperplaneSet {
                q,
                r,
                functionals,
                offsets,
            },
            covered,
        })
    }
}
