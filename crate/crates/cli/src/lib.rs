//! Command-line entry points for the skew polynomial toolkit: scenario
//! loading, operand parsing, suite execution and report assembly.

pub mod config;
pub mod parse;
pub mod report;
pub mod suites;
