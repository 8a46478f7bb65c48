//! χ²-correlated fragment mining.
//!
//! Scores are the Pearson χ² statistic of the 2×2 table (fragment presence ×
//! class). Because χ² is convex in the support counts `(p, n)` and support is
//! anti-monotone under refinement, `max(χ²(p, 0), χ²(0, n))` bounds the score
//! of every refinement and drives branch-and-bound pruning in both top-k and
//! threshold mode.

mod paths;
mod search;

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::molgraph::{Class, LabeledDataset};
use crate::patterns::{Pattern, PatternError, PatternLanguage};

pub use paths::enumerate_restricted_paths;
pub use search::{mine, mine_with, MinerConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinerError {
    #[error("undefined correlation: the dataset must contain both classes")]
    UndefinedCorrelation,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("threshold must be a non-negative number, got {0}")]
    InvalidThreshold(f64),
    #[error("unsupported confidence level {0}; expected 0.95, 0.99 or 0.999")]
    UnsupportedConfidence(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Per-class support of a fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// Actives containing the fragment.
    pub p: usize,
    /// Inactives containing the fragment.
    pub n: usize,
    pub total_active: usize,
    pub total_inactive: usize,
}

impl ContingencyTable {
    pub fn new(p: usize, n: usize, total_active: usize, total_inactive: usize) -> Self {
        debug_assert!(p <= total_active && n <= total_inactive);
        ContingencyTable {
            p,
            n,
            total_active,
            total_inactive,
        }
    }

    /// Table for a fragment occurring in the given molecules of `dataset`.
    pub fn from_occurrences(occurrences: &[usize], dataset: &LabeledDataset) -> Self {
        let p = occurrences
            .iter()
            .filter(|&&i| dataset.label(i) == Class::Active)
            .count();
        ContingencyTable::new(
            p,
            occurrences.len() - p,
            dataset.count_active(),
            dataset.count_inactive(),
        )
    }

    pub fn support(&self) -> usize {
        self.p + self.n
    }
}

/// Pearson χ² of the 2×2 table; zero when any marginal is zero.
pub fn chi2(table: &ContingencyTable) -> f64 {
    let a = table.p as f64;
    let b = table.n as f64;
    let c = (table.total_active - table.p) as f64;
    let d = (table.total_inactive - table.n) as f64;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return 0.0;
    }
    let m = a + b + c + d;
    let diff = a * d - b * c;
    m * diff * diff / denom
}

/// Largest χ² any refinement of a fragment with this table can reach.
pub fn chi2_upper_bound(table: &ContingencyTable) -> f64 {
    let pure_active = ContingencyTable { n: 0, ..*table };
    let pure_inactive = ContingencyTable { p: 0, ..*table };
    chi2(&pure_active).max(chi2(&pure_inactive))
}

/// Critical value of the χ² distribution with one degree of freedom.
pub fn chi2_quantile(confidence: f64) -> Result<f64, MinerError> {
    const LEVELS: [f64; 3] = [0.95, 0.99, 0.999];
    if !LEVELS.iter().any(|&l| (l - confidence).abs() < 1e-12) {
        return Err(MinerError::UnsupportedConfidence(confidence));
    }
    // χ²₁ is the square of a standard normal.
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    Ok(z * z)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    pub table: ContingencyTable,
    pub chi2: f64,
}

impl ScoredPattern {
    pub fn new(pattern: Pattern, table: ContingencyTable) -> Self {
        ScoredPattern {
            chi2: chi2(&table),
            pattern,
            table,
        }
    }

    pub fn code(&self) -> &str {
        self.pattern.code()
    }

    /// Output order: score descending, then canonical code ascending.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .chi2
            .total_cmp(&self.chi2)
            .then_with(|| self.code().cmp(other.code()))
    }
}

/// Sorts into output order.
pub fn sort_ranked(patterns: &mut [ScoredPattern]) {
    patterns.sort_by(ScoredPattern::rank_cmp);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MiningMode {
    TopK(usize),
    Threshold(f64),
}

impl fmt::Display for MiningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MiningMode::TopK(k) => write!(f, "top{k}"),
            MiningMode::Threshold(t) => write!(f, "chi2>={t}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MiningTask<'a> {
    pub language: PatternLanguage,
    pub mode: MiningMode,
    pub dataset: &'a LabeledDataset,
}

/// The `k` best fragments of `language`.
pub fn mine_topk(
    dataset: &LabeledDataset,
    language: PatternLanguage,
    k: usize,
) -> Result<Vec<ScoredPattern>, MinerError> {
    mine(&MiningTask {
        language,
        mode: MiningMode::TopK(k),
        dataset,
    })
}

/// All fragments of `language` scoring at least `threshold`.
pub fn mine_threshold(
    dataset: &LabeledDataset,
    language: PatternLanguage,
    threshold: f64,
) -> Result<Vec<ScoredPattern>, MinerError> {
    mine(&MiningTask {
        language,
        mode: MiningMode::Threshold(threshold),
        dataset,
    })
}

/// Writes `rank<TAB>canonical_code<TAB>chi2<TAB>p<TAB>n<TAB>P<TAB>N` rows,
/// rank starting at 1, with a header line.
pub fn write_fragments_tsv<W: Write>(mut out: W, patterns: &[ScoredPattern]) -> std::io::Result<()> {
    writeln!(out, "rank\tcanonical_code\tchi2\tp\tn\tP\tN")?;
    for (i, sp) in patterns.iter().enumerate() {
        let t = &sp.table;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            sp.code(),
            sp.chi2,
            t.p,
            t.n,
            t.total_active,
            t.total_inactive
        )?;
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum FragmentsTsvError {
    #[error("line {0}: malformed fragment row")]
    Malformed(usize),
    #[error("line {0}: {1}")]
    Pattern(usize, PatternError),
}

/// Reads rows written by [`write_fragments_tsv`].
pub fn read_fragments_tsv(text: &str) -> Result<Vec<ScoredPattern>, FragmentsTsvError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with("rank\t") || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(FragmentsTsvError::Malformed(i + 1));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| FragmentsTsvError::Malformed(i + 1));
        let pattern = Pattern::from_code(f[1]).map_err(|e| FragmentsTsvError::Pattern(i + 1, e))?;
        let table = ContingencyTable {
            p: num(f[3])?,
            n: num(f[4])?,
            total_active: num(f[5])?,
            total_inactive: num(f[6])?,
        };
        if table.p > table.total_active || table.n > table.total_inactive {
            return Err(FragmentsTsvError::Malformed(i + 1));
        }
        out.push(ScoredPattern::new(pattern, table));
    }
    Ok(out)
}
