//! Support library for the `lqthr` command-line tool: argument-grid
//! parsing and the CSV/TSV curve record format.  Kept as a library so the
//! integration tests can exercise the exact emit/parse code the binary
//! uses.

pub mod grid;
pub mod records;
