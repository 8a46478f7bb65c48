//! Experiment driver for fragment mining: configuration, the E1 to E4
//! experiment definitions, result tables and the `molfrag` command line.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use cli::run;
