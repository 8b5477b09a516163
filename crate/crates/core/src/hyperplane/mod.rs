//! Affine hyperplanes of F_{q^r} over F_q, the complement set G_A, and the
//! search for configurations whose complement has no primitive element.

mod certificate;
mod printed;
mod search;

use serde::{Deserialize, Serialize};

pub use certificate::ExceptionCertificate;
pub use printed::{
    canonical_field, printed_constructions, verify_printed_constructions, ConstructionReport, PrintedConstruction,
};
pub use search::{exhaustive_exception_search, search_classes, SearchBudget, SEARCH_CEILING};

use crate::field::{BaseField, FieldCtx, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperplaneError {
    #[error("functionals are linearly dependent (rank {rank} < {r})")]
    NotGeneralPosition { rank: usize, r: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("field of order {order} exceeds the search ceiling {limit}")]
    TooLarge { order: u64, limit: u64 },
    #[error("search needs about {classes} classes, budget is {budget}")]
    Budget { classes: u128, budget: u128 },
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("cannot parse certificate line: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// r hyperplanes C_i = {v : L_i(v) = b_i}, v in power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HyperplaneSet {
    pub q: u32,
    pub r: u32,
    /// Row i is L_i, entries are F_q indices.
    pub functionals: Vec<Vec<u32>>,
    pub offsets: Vec<u32>,
}

/// Rank over F_q by Gaussian elimination.
pub(crate) fn rank(f: &BaseField, rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = f.inv(m[rank][c]);
        let prow: Vec<u32> = m[rank].iter().map(|&x| f.mul(x, inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let factor = row[c];
                for (x, &p) in row.iter_mut().zip(&prow) {
                    *x = f.sub(*x, f.mul(factor, p));
                }
            }
        }
        m[rank] = prow;
        rank += 1;
    }
    rank
}

/// A nonzero vector orthogonal to every row, when the rows have rank
/// `cols - 1`.
fn normal_vector(f: &BaseField, rows: &[Vec<u32>], cols: usize) -> Option<Vec<u32>> {
    if rank(f, rows) + 1 != cols {
        return None;
    }
    // The kernel is one-dimensional; brute force over F_q^cols is cheap at
    // these sizes.
    let q = f.q;
    let total = (q as u64).pow(cols as u32);
    (1..total)
        .map(|code| crate::field::digits(code as u32, q, cols))
        .find(|v| rows.iter().all(|row| dot(f, row, v) == 0))
}

/// Scales (row, offset) so the first nonzero entry of the row is 1.
pub(crate) fn normalize(f: &BaseField, row: &[u32], offset: u32) -> (Vec<u32>, u32) {
    let lead = row.iter().copied().find(|&x| x != 0).unwrap_or(1);
    let inv = f.inv(lead);
    (row.iter().map(|&x| f.mul(x, inv)).collect(), f.mul(offset, inv))
}

impl HyperplaneSet {
    pub fn new(ctx: &FieldCtx, functionals: Vec<Vec<u32>>, offsets: Vec<u32>) -> Result<Self, HyperplaneError> {
        let r = ctx.r() as usize;
        let q = ctx.q();
        if functionals.len() != r || offsets.len() != r || functionals.iter().any(|row| row.len() != r) {
            return Err(HyperplaneError::Shape(format!(
                "need an {r} x {r} matrix and {r} offsets"
            )));
        }
        if functionals.iter().flatten().chain(&offsets).any(|&x| x >= q) {
            return Err(HyperplaneError::Shape(format!("entries must lie in F_{q}")));
        }
        let rk = rank(ctx.base(), &functionals);
        if rk < r {
            return Err(HyperplaneError::NotGeneralPosition { rank: rk, r });
        }
        Ok(Self {
            q,
            r: r as u32,
            functionals,
            offsets,
        })
    }

    /// The hyperplanes {v_i = 1}.
    pub fn coordinate(ctx: &FieldCtx) -> Self {
        let r = ctx.r() as usize;
        let functionals = (0..r).map(|i| (0..r).map(|j| u32::from(i == j)).collect()).collect();
        Self::new(ctx, functionals, vec![1; r]).expect("identity is invertible")
    }

    /// Hyperplanes given as `point + span(directions)`, r - 1 independent
    /// directions each.
    pub fn from_affine(ctx: &FieldCtx, planes: &[(u32, Vec<u32>)]) -> Result<Self, HyperplaneError> {
        let r = ctx.r() as usize;
        let mut functionals = Vec::new();
        let mut offsets = Vec::new();
        for (point, dirs) in planes {
            let rows: Vec<Vec<u32>> = dirs.iter().map(|&d| ctx.coords(d)).collect();
            if rows.len() + 1 != r {
                return Err(HyperplaneError::Shape(format!(
                    "a hyperplane needs {} directions",
                    r - 1
                )));
            }
            let normal = normal_vector(ctx.base(), &rows, r)
                .ok_or_else(|| HyperplaneError::Shape("directions are dependent".into()))?;
            let offset = dot(ctx.base(), &normal, &ctx.coords(*point));
            let (row, b) = normalize(ctx.base(), &normal, offset);
            functionals.push(row);
            offsets.push(b);
        }
        Self::new(ctx, functionals, offsets)
    }

    /// Same hyperplanes as sets: rows normalised and sorted.
    pub fn canonical(&self, ctx: &FieldCtx) -> Self {
        let mut pairs: Vec<(Vec<u32>, u32)> = self
            .functionals
            .iter()
            .zip(&self.offsets)
            .map(|(row, &b)| normalize(ctx.base(), row, b))
            .collect();
        pairs.sort();
        let (functionals, offsets) = pairs.into_iter().unzip();
        Self {
            q: self.q,
            r: self.r,
            functionals,
            offsets,
        }
    }

    /// Is `elem` on C_i?
    pub fn on_hyperplane(&self, ctx: &FieldCtx, i: usize, elem: u32) -> bool {
        dot(ctx.base(), &self.functionals[i], &ctx.coords(elem)) == self.offsets[i]
    }

    /// Index of the first C_i containing `elem`.
    pub fn first_cover(&self, ctx: &FieldCtx, elem: u32) -> Option<usize> {
        let v = ctx.coords(elem);
        (0..self.r as usize).find(|&i| dot(ctx.base(), &self.functionals[i], &v) == self.offsets[i])
    }

    /// |C_i|, by enumeration.
    pub fn hyperplane_size(&self, ctx: &FieldCtx, i: usize) -> usize {
        (0..ctx.order()).filter(|&a| self.on_hyperplane(ctx, i, a)).count()
    }

    fn check_field(&self, ctx: &FieldCtx) -> Result<(), HyperplaneError> {
        if self.q != ctx.q() || self.r != ctx.r() {
            return Err(HyperplaneError::Shape(format!(
                "hyperplanes for ({}, {}) used in F_{}^{}",
                self.q,
                self.r,
                ctx.q(),
                ctx.r()
            )));
        }
        let rk = rank(ctx.base(), &self.functionals);
        if rk < self.r as usize {
            return Err(HyperplaneError::NotGeneralPosition {
                rank: rk,
                r: self.r as usize,
            });
        }
        Ok(())
    }

    /// Primitive elements paired with the first hyperplane covering them,
    /// or `None` when some primitive element is uncovered.
    pub fn covering(&self, ctx: &FieldCtx) -> Result<Option<Vec<(u32, usize)>>, HyperplaneError> {
        self.check_field(ctx)?;
        Ok(ctx
            .primitive_elements()
            .into_iter()
            .map(|a| self.first_cover(ctx, a).map(|i| (a, i)))
            .collect())
    }
}

pub(crate) fn dot(f: &BaseField, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// G_A: the elements on none of the hyperplanes, in index order.
pub fn make_g_a(ctx: &FieldCtx, hset: &HyperplaneSet) -> Result<Vec<u32>, HyperplaneError> {
    hset.check_field(ctx)?;
    Ok((0..ctx.order())
        .filter(|&a| hset.first_cover(ctx, a).is_none())
        .collect())
}
