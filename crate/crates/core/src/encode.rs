//! Fingerprints over a fragment vocabulary.
//!
//! A generalized fingerprint has one bit per vocabulary fragment. A hashed
//! fingerprint folds the same presence information into `k` bits.
//!
//! # Hash
//!
//! Fragment positions are derived from the canonical code bytes only, so
//! they are identical across runs, platforms and thread counts:
//!
//! ```text
//! mix(x)   = splitmix64 finalizer:
//!            x += 0x9E3779B97F4A7C15
//!            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//!            x = (x ^ (x >> 27)) * 0x94D049BB133111EB
//!            x ^ (x >> 31)
//! h        = 0xCBF29CE484222325 ^ mix(seed)
//!            for each byte c of the code: h = (h ^ c) * 0x100000001B3   (FNV-1a)
//! h        = mix(h)
//! pos(j)   = mix(h ^ (j + 1) * 0x9E3779B97F4A7C15) mod k,   j = 0..b
//! ```
//!
//! All arithmetic wraps modulo 2⁶⁴.

use std::collections::HashMap;
use std::io::Write;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::miner::ScoredPattern;
use crate::molgraph::{LabeledDataset, MolecularGraph};
use crate::patterns::{walk_label_strings, Pattern, WalkPattern};

/// One bit per vocabulary fragment.
pub type GeneralizedFingerprint = FixedBitSet;
/// Fixed-width folded fingerprint.
pub type HashedFingerprint = FixedBitSet;

/// Where a vocabulary came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    /// Pattern kind or language, e.g. `tree` or `path`.
    pub source: String,
    /// Selection rule, e.g. `top100` or `chi2>=3.84`.
    pub selection: String,
    pub fold: Option<usize>,
}

/// Ordered list of distinct fragments.
#[derive(Clone, Debug, Default)]
pub struct FragmentVocabulary {
    patterns: Vec<Pattern>,
    index: HashMap<String, usize>,
    pub provenance: Provenance,
}

impl FragmentVocabulary {
    /// Keeps the first occurrence of each code.
    pub fn new(patterns: impl IntoIterator<Item = Pattern>, provenance: Provenance) -> Self {
        let mut v = FragmentVocabulary {
            provenance,
            ..Default::default()
        };
        for p in patterns {
            if !v.index.contains_key(p.code()) {
                v.index.insert(p.code().to_string(), v.patterns.len());
                v.patterns.push(p);
            }
        }
        v
    }

    /// Vocabulary in mined rank order.
    pub fn from_scored(scored: &[ScoredPattern], provenance: Provenance) -> Self {
        Self::new(scored.iter().map(|s| s.pattern.clone()), provenance)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(Pattern::code)
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    fn max_walk_length(&self) -> Option<usize> {
        let mut max = 0;
        for p in &self.patterns {
            match p {
                Pattern::Walk(w) => max = max.max(w.num_edges()),
                _ => return None,
            }
        }
        Some(max)
    }
}

/// Bit `i` is set iff fragment `i` occurs in `molecule`.
pub fn encode_gfp(molecule: &MolecularGraph, vocab: &FragmentVocabulary) -> GeneralizedFingerprint {
    let mut bits = FixedBitSet::with_capacity(vocab.len());
    if let Some(max_len) = vocab.max_walk_length().filter(|_| !vocab.is_empty()) {
        // Enumerating the molecule's walks once beats testing each one.
        for labels in walk_label_strings(molecule, max_len) {
            if let Some(i) = vocab.position(WalkPattern::from_labels(labels).code()) {
                bits.insert(i);
            }
        }
        return bits;
    }
    for (i, p) in vocab.patterns.iter().enumerate() {
        if p.occurs(molecule) {
            bits.insert(i);
        }
    }
    bits
}

/// Hash parameters: width `k`, positions per fragment `b`, and seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HashParams {
    pub k: usize,
    pub b: usize,
    pub seed: u64,
}

impl HashParams {
    pub fn new(k: usize, seed: u64) -> Self {
        HashParams { k, b: 1, seed }
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seeded 64-bit hash of a canonical code.
pub fn code_hash(code: &str, seed: u64) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325 ^ mix(seed);
    for &c in code.as_bytes() {
        h = (h ^ c as u64).wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix(h)
}

/// The `b` bit positions of a fragment.
pub fn hash_positions(code: &str, params: &HashParams) -> Vec<usize> {
    assert!(params.k >= 1 && params.b >= 1, "k and b must be at least 1");
    let h = code_hash(code, params.seed);
    (0..params.b as u64)
        .map(|j| (mix(h ^ (j + 1).wrapping_mul(GOLDEN)) % params.k as u64) as usize)
        .collect()
}

/// Folds the generalized fingerprint into `k` bits.
pub fn encode_hashed(molecule: &MolecularGraph, vocab: &FragmentVocabulary, params: &HashParams) -> HashedFingerprint {
    fold(&encode_gfp(molecule, vocab), vocab, params)
}

/// Hashed fingerprint from an already computed generalized one.
pub fn fold(gfp: &GeneralizedFingerprint, vocab: &FragmentVocabulary, params: &HashParams) -> HashedFingerprint {
    let mut bits = FixedBitSet::with_capacity(params.k);
    for i in gfp.ones() {
        for pos in hash_positions(vocab.patterns[i].code(), params) {
            bits.insert(pos);
        }
    }
    bits
}

/// Row `i` is the generalized fingerprint of molecule `i`.
pub fn encode_dataset(dataset: &LabeledDataset, vocab: &FragmentVocabulary) -> Vec<GeneralizedFingerprint> {
    dataset
        .molecules()
        .par_iter()
        .map(|m| encode_gfp(m, vocab))
        .collect()
}

fn molecule_id(dataset: &LabeledDataset, i: usize) -> String {
    let id = dataset.molecule(i).id();
    if id.is_empty() {
        i.to_string()
    } else {
        id.to_string()
    }
}

/// Dense 0/1 matrix: `molecule_id` column, then one column per code.
pub fn write_dense_csv<W: Write>(
    out: W,
    dataset: &LabeledDataset,
    vocab: &FragmentVocabulary,
    rows: &[GeneralizedFingerprint],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["molecule_id".to_string()];
    header.extend(vocab.codes().map(str::to_string));
    w.write_record(&header)?;
    for (i, row) in rows.iter().enumerate() {
        let mut record = vec![molecule_id(dataset, i)];
        record.extend((0..vocab.len()).map(|j| if row.contains(j) { "1" } else { "0" }.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// One `molecule_id<TAB>fragment_rank` line per set bit; ranks start at 1.
pub fn write_sparse_tsv<W: Write>(
    mut out: W,
    dataset: &LabeledDataset,
    rows: &[GeneralizedFingerprint],
) -> std::io::Result<()> {
    writeln!(out, "molecule_id\tfragment_rank")?;
    for (i, row) in rows.iter().enumerate() {
        let id = molecule_id(dataset, i);
        for j in row.ones() {
            writeln!(out, "{id}\t{}", j + 1)?;
        }
    }
    Ok(())
}
