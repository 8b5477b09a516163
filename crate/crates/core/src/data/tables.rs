//! Regeneration of the result tables from the classification pipeline.
//!
//! Ranges: Table 3 covers 2 <= r < r_threshold (general track, q >= 4);
//! Table 4 the even r from 2 (4 for q = 3) up to the largest r not
//! eliminated by the Katz-type sieve; Table 5 every r up to the largest
//! not eliminated by either sieve; `main` lists what survives everything.
//! For q = 3 only even r are analysed: odd r are all possible exceptions.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::thread;

use serde::{Deserialize, Serialize};

use super::fixtures::{factor_for, FactorFixtures, FactorSource};
use crate::criteria::{evaluate_all, CriteriaError, CriteriaFlags};
use crate::numtheory::FactorBudget;
use crate::omega::{naive_prime_limit, table2_sweep, OmegaError, SweepStage, Track};

pub const TABLE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "5")]
    Five,
    Main,
}

impl std::str::FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "1" => Self::One,
            "2" => Self::Two,
            "3" => Self::Three,
            "4" => Self::Four,
            "5" => Self::Five,
            "main" => Self::Main,
            _ => return Err(format!("unknown table {s:?}; expected 1-5 or main")),
        })
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Three => "3",
            Self::Four => "4",
            Self::Five => "5",
            Self::Main => "main",
        })
    }
}

impl TableId {
    pub fn default_qs(self) -> &'static [u64] {
        match self {
            Self::One => &[5, 7, 8, 9],
            Self::Three => &[9, 8, 7, 5, 4],
            _ => &[9, 8, 7, 5, 4, 3],
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("table {table} is not defined for q = {q}")]
    NotApplicable { table: TableId, q: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub q: u64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub q: u64,
    pub track: Track,
    pub omega_ceiling: usize,
    pub omega_threshold: usize,
    pub r_threshold: u32,
    /// (omega, t) attaining the r threshold.
    pub witness: (usize, usize),
    pub stages: Vec<SweepStage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EliminationRow {
    pub q: u64,
    pub r_lo: u32,
    pub r_hi: u32,
    pub even_only: bool,
    pub eliminated: Vec<u32>,
    /// r in range whose factorization was unavailable.
    pub missing: Vec<u32>,
    /// Per eliminated r: the s used (sieves) or the criterion name.
    pub witnesses: Vec<(u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainRow {
    pub q: u64,
    pub r_threshold: u32,
    /// Every odd r is a possible exception (q = 3).
    pub all_odd: bool,
    pub possible: Vec<u32>,
    pub missing: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableRows {
    One(Vec<Table1Row>),
    Two(Vec<Table2Row>),
    Elimination(Vec<EliminationRow>),
    Main(Vec<MainRow>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableArtifact {
    pub table: TableId,
    pub version: String,
    pub rows: TableRows,
    /// Every (q, r) that could not be processed.
    pub missing: Vec<(u64, u32)>,
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub qs: Option<Vec<u64>>,
    /// Caps every r range (for fixture-limited runs).
    pub r_max: Option<u32>,
    pub budget: FactorBudget,
    pub fixtures: FactorFixtures,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            qs: None,
            r_max: None,
            budget: FactorBudget::default(),
            fixtures: FactorFixtures::bundled().clone(),
        }
    }
}

/// Per-r criteria for one q; `None` marks a missing factorization.
#[derive(Clone, Debug)]
pub struct QAnalysis {
    pub q: u64,
    pub r_threshold: u32,
    pub flags: BTreeMap<u32, Option<(CriteriaFlags, FactorSource)>>,
}

impl QAnalysis {
    fn even_only(&self) -> bool {
        self.q == 3
    }

    fn get(&self, r: u32) -> Option<&CriteriaFlags> {
        self.flags.get(&r).and_then(|f| f.as_ref()).map(|(f, _)| f)
    }

    fn missing_in(&self, rs: impl Iterator<Item = u32>) -> Vec<u32> {
        rs.filter(|r| matches!(self.flags.get(r), Some(None))).collect()
    }

    fn rs(&self) -> impl Iterator<Item = u32> + '_ {
        self.flags.keys().copied()
    }

    /// Largest analysed r not eliminated by `killed` (missing counts as
    /// not eliminated).
    fn largest_surviving(&self, killed: impl Fn(&CriteriaFlags) -> bool) -> Option<u32> {
        self.rs().filter(|&r| !self.get(r).is_some_and(&killed)).max()
    }
}

/// Evaluates every criterion for each relevant r < r_threshold of `q`.
pub fn analyze_q(q: u64, opts: &TableOptions) -> Result<QAnalysis, TableError> {
    let sweep = table2_sweep(q)?;
    let mut hi = sweep.r_threshold - 1;
    if let Some(cap) = opts.r_max {
        hi = hi.min(cap);
    }
    let step = if q == 3 { 2 } else { 1 };
    let rs: Vec<u32> = (2..=hi).step_by(step).collect();
    let threads = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = rs.len().div_ceil(threads).max(1);
    let results: Vec<(u32, Option<(CriteriaFlags, FactorSource)>)> = thread::scope(|s| {
        let handles: Vec<_> = rs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&r| {
                            let entry = factor_for(q, r, &opts.fixtures, opts.budget)
                                .ok()
                                .map(|(f, src)| evaluate_all(q, r, &f).map(|flags| (flags, src)))
                                .transpose();
                            (r, entry)
                        })
                        .map(|(r, e)| e.map(|e| (r, e)))
                        .collect::<Result<Vec<_>, CriteriaError>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("table worker panicked"))
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.into_iter().flatten().collect())
    })?;
    Ok(QAnalysis {
        q,
        r_threshold: sweep.r_threshold,
        flags: results.into_iter().collect(),
    })
}

fn elimination_row(
    a: &QAnalysis,
    lo: u32,
    hi: u32,
    even_only: bool,
    witness: impl Fn(&CriteriaFlags) -> Option<String>,
) -> EliminationRow {
    let rs: Vec<u32> = a
        .rs()
        .filter(|&r| r >= lo && r <= hi && (!even_only || r % 2 == 0))
        .collect();
    let witnesses: Vec<(u32, String)> = rs
        .iter()
        .filter_map(|&r| a.get(r).and_then(&witness).map(|w| (r, w)))
        .collect();
    EliminationRow {
        q: a.q,
        r_lo: lo,
        r_hi: hi,
        even_only,
        eliminated: witnesses.iter().map(|w| w.0).collect(),
        missing: a.missing_in(rs.into_iter()),
        witnesses,
    }
}

pub fn table3_row(a: &QAnalysis) -> Result<EliminationRow, TableError> {
    if a.q < 4 {
        return Err(TableError::NotApplicable {
            table: TableId::Three,
            q: a.q,
        });
    }
    let hi = a.rs().max().unwrap_or(1);
    Ok(elimination_row(a, 2, hi, false, |f| f.katz.map(|s| format!("s={s}"))))
}

pub fn table4_row(a: &QAnalysis) -> EliminationRow {
    let (lo, hi) = if a.even_only() {
        (4, a.rs().max().unwrap_or(0))
    } else {
        (2, a.largest_surviving(|f| f.katz.is_some()).unwrap_or(0))
    };
    elimination_row(a, lo, hi - hi % 2, true, |f| f.even.map(|s| format!("s={s}")))
}

pub fn table5_row(a: &QAnalysis) -> EliminationRow {
    let hi = a.largest_surviving(CriteriaFlags::hypersieve).unwrap_or(0);
    elimination_row(a, 2, hi, a.even_only(), |f| {
        if f.fr_totient {
            Some("totient".into())
        } else if f.fr_alpha {
            Some("alpha".into())
        } else {
            None
        }
    })
}

pub fn main_row(a: &QAnalysis) -> MainRow {
    MainRow {
        q: a.q,
        r_threshold: a.r_threshold,
        all_odd: a.even_only(),
        possible: a.rs().filter(|&r| a.get(r).is_some_and(|f| !f.any())).collect(),
        missing: a.missing_in(a.rs()),
    }
}

pub fn build_table(id: TableId, opts: &TableOptions) -> Result<TableArtifact, TableError> {
    let qs: Vec<u64> = opts.qs.clone().unwrap_or_else(|| id.default_qs().to_vec());
    let mut missing = Vec::new();
    let rows = match id {
        TableId::One => TableRows::One(
            qs.iter()
                .map(|&q| {
                    Ok(Table1Row {
                        q,
                        n: naive_prime_limit(q)?.n,
                    })
                })
                .collect::<Result<_, OmegaError>>()?,
        ),
        TableId::Two => TableRows::Two(
            qs.iter()
                .map(|&q| {
                    let s = table2_sweep(q)?;
                    Ok(Table2Row {
                        q,
                        track: s.track,
                        omega_ceiling: s.ceiling,
                        omega_threshold: s.omega_threshold,
                        r_threshold: s.r_threshold,
                        witness: s.r_witness,
                        stages: s.stages,
                    })
                })
                .collect::<Result<_, OmegaError>>()?,
        ),
        TableId::Three | TableId::Four | TableId::Five | TableId::Main => {
            let mut elim = Vec::new();
            let mut main = Vec::new();
            for &q in &qs {
                let a = analyze_q(q, opts)?;
                match id {
                    TableId::Three if q >= 4 => elim.push(table3_row(&a)?),
                    TableId::Three => {}
                    TableId::Four => elim.push(table4_row(&a)),
                    TableId::Five => elim.push(table5_row(&a)),
                    _ => main.push(main_row(&a)),
                }
            }
            for row in &elim {
                missing.extend(row.missing.iter().map(|&r| (row.q, r)));
            }
            for row in &main {
                missing.extend(row.missing.iter().map(|&r| (row.q, r)));
            }
            if id == TableId::Main {
                TableRows::Main(main)
            } else {
                TableRows::Elimination(elim)
            }
        }
    };
    missing.sort();
    Ok(TableArtifact {
        table: id,
        version: TABLE_VERSION.to_string(),
        rows,
        missing,
    })
}

/// `13, 16, 17, 19-38`; runs of three or more consecutive values (step
/// 2 for even-only lists) are collapsed.
pub fn compress(values: &[u32], step: u32) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[j] + step {
            j += 1;
        }
        if j - i >= 2 {
            parts.push(format!("{}-{}", values[i], values[j]));
        } else {
            parts.extend(values[i..=j].iter().map(u32::to_string));
        }
        i = j + 1;
    }
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

impl TableArtifact {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        match &self.rows {
            TableRows::One(rows) => {
                out.push_str("q\tN\n");
                for row in rows {
                    writeln!(out, "{}\t{}", row.q, row.n).unwrap();
                }
            }
            TableRows::Two(rows) => {
                out.push_str(
                    "q\ttrack\tomega_ceiling\tomega_threshold\tr_threshold\twitness_omega\twitness_t\tstages\n",
                );
                for row in rows {
                    let stages: Vec<String> = row
                        .stages
                        .iter()
                        .map(|s| format!("t={}:[{},{}]", s.t, s.omega_lo, s.omega_hi))
                        .collect();
                    let track = match row.track {
                        Track::General => "general",
                        Track::EvenR => "even_r",
                    };
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        row.q,
                        track,
                        row.omega_ceiling,
                        row.omega_threshold,
                        row.r_threshold,
                        row.witness.0,
                        row.witness.1,
                        stages.join(" ")
                    )
                    .unwrap();
                }
            }
            TableRows::Elimination(rows) => {
                out.push_str("q\tchecked\teliminated\tmissing\twitnesses\n");
                for row in rows {
                    let step = if row.even_only { 2 } else { 1 };
                    let checked = format!(
                        "{}-{}{}",
                        row.r_lo,
                        row.r_hi,
                        if row.even_only { " (even)" } else { "" }
                    );
                    let witnesses: Vec<String> = row.witnesses.iter().map(|(r, w)| format!("{r}:{w}")).collect();
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        row.q,
                        checked,
                        compress(&row.eliminated, step),
                        compress(&row.missing, step),
                        witnesses.join(" ")
                    )
                    .unwrap();
                }
            }
            TableRows::Main(rows) => {
                out.push_str("q\tr_threshold\tpossible_exceptions\tmissing\n");
                for row in rows {
                    let step = if row.all_odd { 2 } else { 1 };
                    let mut possible = compress(&row.possible, step);
                    if row.all_odd {
                        possible = format!("all odd r; even: {possible}");
                    }
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}",
                        row.q,
                        row.r_threshold,
                        possible,
                        compress(&row.missing, step)
                    )
                    .unwrap();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_runs() {
        assert_eq!(compress(&[13, 16, 17, 19, 20, 21, 22], 1), "13, 16, 17, 19-22");
        assert_eq!(compress(&[26, 28, 32, 34, 36], 2), "26, 28, 32-36");
        assert_eq!(compress(&[], 1), "none");
    }

    #[test]
    fn table_ids_parse() {
        assert_eq!("main".parse::<TableId>().unwrap(), TableId::Main);
        assert_eq!("3".parse::<TableId>().unwrap().to_string(), "3");
        assert!("6".parse::<TableId>().is_err());
    }

    #[test]
    fn q9_rows() {
        let opts = TableOptions {
            qs: Some(vec![9]),
            ..TableOptions::default()
        };
        let a = analyze_q(9, &opts).unwrap();
        assert_eq!(a.r_threshold, 39);
        let t3 = table3_row(&a).unwrap();
        let mut expect: Vec<u32> = vec![13, 16, 17];
        expect.extend(19..=38);
        assert_eq!(t3.eliminated, expect);
        let t4 = table4_row(&a);
        assert_eq!((t4.r_lo, t4.r_hi), (2, 18));
        assert_eq!(t4.eliminated, vec![14, 16, 18]);
        let t5 = table5_row(&a);
        assert_eq!((t5.r_lo, t5.r_hi), (2, 15));
        assert_eq!(t5.eliminated, vec![2, 3, 4, 5, 7, 11, 13, 14]);
        assert_eq!(main_row(&a).possible, vec![6, 8, 9, 10, 12, 15]);
    }
}
