//! Descriptive statistics for comparing fragment sets.

use std::collections::HashMap;
use std::io::Write;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::miner::ScoredPattern;
use crate::molgraph::Class;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyzeError {
    #[error("empty pattern list")]
    Empty,
    #[error("samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 5 nonzero differences, got {0}")]
    TooFewDifferences(usize),
}

/// Cross-class pairs of molecules that share a fingerprint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    /// Σ over fingerprint values of actives × inactives with that value.
    pub pair_count: usize,
    /// Molecules in a fingerprint group that contains both classes.
    pub involved_molecules: usize,
    /// Molecules matched by no fragment.
    pub zero_vector_count: usize,
}

pub fn correspondences(fingerprints: &[FixedBitSet], labels: &[Class]) -> CorrespondenceReport {
    assert_eq!(fingerprints.len(), labels.len(), "fingerprints and labels must align");
    let mut groups: HashMap<&FixedBitSet, (usize, usize)> = HashMap::new();
    let mut zero = 0;
    for (fp, label) in fingerprints.iter().zip(labels) {
        let g = groups.entry(fp).or_default();
        if label.is_active() {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
        if fp.is_clear() {
            zero += 1;
        }
    }
    let mut report = CorrespondenceReport {
        zero_vector_count: zero,
        ..Default::default()
    };
    for (a, i) in groups.into_values() {
        report.pair_count += a * i;
        if a > 0 && i > 0 {
            report.involved_molecules += a + i;
        }
    }
    report
}

/// Symmetric φ-coefficient matrix over the first `m` fingerprint columns.
#[derive(Clone, Debug, PartialEq)]
pub struct IntercorrelationMatrix {
    size: usize,
    data: Vec<f64>,
}

impl IntercorrelationMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    /// Mean absolute off-diagonal entry; 0 for fewer than two columns.
    pub fn mean_abs_off_diagonal(&self) -> f64 {
        if self.size < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                if i != j {
                    s += self.get(i, j).abs();
                }
            }
        }
        s / (self.size * (self.size - 1)) as f64
    }

    /// Long form `i<TAB>j<TAB>phi`, 0-based indices, with a header.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i\tj\tphi")?;
        for i in 0..self.size {
            for j in 0..self.size {
                writeln!(out, "{i}\t{j}\t{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// φ between presence columns `0..m` across the rows. φ is undefined for a
/// constant column; such entries are 0, including the diagonal.
pub fn intercorrelation(rows: &[FixedBitSet], m: usize) -> IntercorrelationMatrix {
    let n = rows.len() as f64;
    let columns: Vec<FixedBitSet> = (0..m)
        .map(|j| {
            let mut c = FixedBitSet::with_capacity(rows.len());
            for (i, r) in rows.iter().enumerate() {
                if j < r.len() && r.contains(j) {
                    c.insert(i);
                }
            }
            c
        })
        .collect();
    let counts: Vec<f64> = columns.iter().map(|c| c.count_ones(..) as f64).collect();
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let (a, b) = (counts[i], counts[j]);
            let var = a * (n - a) * b * (n - b);
            let phi = if var == 0.0 {
                0.0
            } else if i == j {
                1.0
            } else {
                let both = columns[i].intersection_count(&columns[j]) as f64;
                ((n * both - a * b) / var.sqrt()).clamp(-1.0, 1.0)
            };
            data[i * m + j] = phi;
            data[j * m + i] = phi;
        }
    }
    IntercorrelationMatrix { size: m, data }
}

/// Mean number of set bits per row; 0 for no rows.
pub fn features_per_molecule(rows: &[FixedBitSet]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().map(|r| r.count_ones(..)).sum::<usize>() as f64 / rows.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreStats {
    pub min: f64,
    pub max: f64,
    /// Scores in descending order.
    pub scores: Vec<f64>,
}

pub fn score_stats(patterns: &[ScoredPattern]) -> Result<ScoreStats, AnalyzeError> {
    if patterns.is_empty() {
        return Err(AnalyzeError::Empty);
    }
    let mut scores: Vec<f64> = patterns.iter().map(|p| p.chi2).collect();
    scores.sort_by(|a, b| b.total_cmp(a));
    Ok(ScoreStats {
        min: scores[scores.len() - 1],
        max: scores[0],
        scores,
    })
}

/// Patterns scoring at least `floor`, order preserved.
pub fn crop_by_score(patterns: &[ScoredPattern], floor: f64) -> Vec<ScoredPattern> {
    patterns.iter().filter(|p| p.chi2 >= floor).cloned().collect()
}

/// Share of patterns containing a cycle; 0 for an empty list.
pub fn cyclic_fraction(patterns: &[ScoredPattern]) -> f64 {
    if patterns.is_empty() {
        return 0.0;
    }
    patterns.iter().filter(|p| p.pattern.is_cyclic()).count() as f64 / patterns.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The median of `a − b` is positive.
    FirstGreater,
    SecondGreater,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// Nonzero differences used.
    pub n: usize,
    /// `min(W⁺, W⁻)`.
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    pub direction: Direction,
    pub method: WilcoxonMethod,
}

const EXACT_LIMIT: usize = 30;

/// Two-sided paired signed-rank test. Zero differences are dropped and
/// tied magnitudes share their average rank. Up to 30 pairs the p-value is
/// exact (`P(min(W⁺, W⁻) ≤ W)` under random signs); beyond that a normal
/// approximation with tie-corrected variance and continuity correction is
/// used. `alpha` is the confidence level: significant iff `p ≤ 1 − alpha`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult, AnalyzeError> {
    if a.len() != b.len() {
        return Err(AnalyzeError::LengthMismatch(a.len(), b.len()));
    }
    let mut d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n < 5 {
        return Err(AnalyzeError::TooFewDifferences(n));
    }
    d.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    // Doubled average ranks stay integral.
    let mut ranks2 = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[j + 1].abs() == d[i].abs() {
            j += 1;
        }
        for r in &mut ranks2[i..=j] {
            *r = (i + j + 2) as u64;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let total2: u64 = ranks2.iter().sum();
    let plus2: u64 = d.iter().zip(&ranks2).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w2 = plus2.min(total2 - plus2);
    let statistic = w2 as f64 / 2.0;

    let (p_value, method) = if n <= EXACT_LIMIT {
        // counts[s] = number of sign patterns with doubled W⁺ = s
        let mut counts = vec![0f64; total2 as usize + 1];
        counts[0] = 1.0;
        let mut reach = 0usize;
        for &r in &ranks2 {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] > 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let all = 2f64.powi(n as i32);
        let lower: f64 = counts[..=w2 as usize].iter().sum();
        // P(min ≤ w) = P(W⁺ ≤ w) + P(W⁺ ≥ T − w), the two tails overlapping
        // only when w ≥ T/2.
        let upper: f64 = counts[(total2 - w2) as usize..].iter().sum();
        let p = if 2 * w2 >= total2 {
            1.0
        } else {
            (lower + upper) / all
        };
        (p.min(1.0), WilcoxonMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = ((mean - statistic - 0.5).max(0.0)) / var.sqrt();
        let p = 2.0 * (1.0 - Normal::standard().cdf(z));
        (p.min(1.0), WilcoxonMethod::Normal)
    };

    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    diffs.sort_by(f64::total_cmp);
    let m = diffs.len();
    let median = if m % 2 == 1 {
        diffs[m / 2]
    } else {
        (diffs[m / 2 - 1] + diffs[m / 2]) / 2.0
    };
    let direction = if median > 0.0 {
        Direction::FirstGreater
    } else if median < 0.0 {
        Direction::SecondGreater
    } else {
        Direction::Neither
    };
    Ok(WilcoxonResult {
        n,
        statistic,
        p_value,
        significant: p_value <= 1.0 - alpha,
        direction,
        method,
    })
}
