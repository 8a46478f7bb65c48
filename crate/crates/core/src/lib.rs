//! Mining of class-correlated molecular fragments and their evaluation as
//! fingerprint features.
//!
//! The pipeline is: parse molecules ([`molgraph`]), mine χ²-scored fragments
//! of a chosen pattern language ([`miner`]), turn them into fingerprints
//! ([`encode`]), and measure how well a Tanimoto-kernel SVM separates the
//! classes under cross-validation ([`learn`]). [`analyze`] holds the
//! descriptive statistics used to compare fragment sets, and [`synth`]
//! generates labelled datasets with planted fragments.

pub mod analyze;
pub mod encode;
pub mod learn;
pub mod miner;
pub mod molgraph;
pub mod patterns;
pub mod synth;
