//! Factorization fixtures and table regeneration.

mod fixtures;
mod tables;

pub use fixtures::{factor_for, FactorFixtures, FactorSource, FixtureError};
pub use tables::{
    analyze_q, build_table, compress, main_row, table3_row, table4_row, table5_row, EliminationRow, MainRow, QAnalysis,
    Table1Row, Table2Row, TableArtifact, TableError, TableId, TableOptions, TableRows, TABLE_VERSION,
};
