//! Data model and numerics for multi-regional input-output (MRIO) flow
//! analysis: sparse transaction tables, sector-group aggregation,
//! Leontief demand solves with environmental extensions, and carbon
//! case-study estimators.
//!
//! The crate is `no_std` (with `alloc`). File parsing, report formats,
//! and the command-line front end live in the companion `mrioflow`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod emissions;
pub mod flows;
pub mod group;
pub mod index;
pub mod leontief;
pub mod sum;
pub mod table;
pub mod taxonomy;
pub mod text;

pub use group::{GroupMatches, MatchMode, RegionFilter, SectorGroup};
pub use index::{RegionCode, RegionSectorIndex, SectorLabel};
pub use table::{SparseMatrix, TableMeta, TransactionTable};
