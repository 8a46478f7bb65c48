//! Slow, obviously-correct reference implementations.
//!
//! Nothing here shares code with `molfrag-core` beyond its data types, so
//! the test suites can compare the optimized implementations against them.

pub mod fragments;
pub mod numeric;
pub mod random;
