//! MRIO flow analysis: file ingestion, sector concordance, report
//! formats, case-study scenarios, and the command-line front end.
//!
//! The pure data model and numerics live in `mrioflow-core`; this crate
//! adds everything that touches files and the terminal.

pub mod cli;
pub mod concordance;
pub mod ingest;
pub mod manifest;
pub mod report;
pub mod scenario;

pub use mrioflow_core as core;
