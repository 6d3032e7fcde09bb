//! Command-line front end and report formats for `cutlab-core`.
//!
//! Every command can write a versioned JSON envelope ([`report`]); sweeps can
//! also write CSV ([`sweep`]).

pub mod cli;
pub mod report;
pub mod strategy;
pub mod sweep;

pub use cli::main_with_args;
