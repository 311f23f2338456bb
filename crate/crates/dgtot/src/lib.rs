//! File formats, reports, seeded random inputs and the `dgtot` command-line tool.

pub mod cli;
pub mod parse;
pub mod random;
pub mod report;
pub mod serialize;
pub mod suites;
