//! Tanimoto-kernel SVM, AUC and stratified cross-validation.

mod cv;
mod kernel;
mod svm;


use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::molgraph::Class;

pub use cv::{run_cv, run_cv_with, Condition, CvConfig, CvError, FoldOutcome, ReportRow};
pub use kernel::{tanimoto, KernelMatrix};
pub use svm::{decision_values, train_svm, SvmModel, SvmParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("both classes must be present")]
    SingleClass,
    #[error("class {class} has {size} members, fewer than {folds} folds")]
    ClassTooSmall {
        class: &'static str,
        size: usize,
        folds: usize,
    },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFolds(usize),
    #[error("C must be positive, got {0}")]
    InvalidC(f64),
    #[error("kernel matrix must be square")]
    NotSquare,
}

/// Probability that a random active outscores a random inactive; ties
/// count one half. Computed from average ranks in O(n log n).
pub fn auc(scores: &[f64], labels: &[Class]) -> Result<f64, LearnError> {
    if scores.len() != labels.len() {
        return Err(LearnError::LengthMismatch(scores.len(), labels.len()));
    }
    let n_pos = labels.iter().filter(|c| c.is_active()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their average
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum += avg * order[i..=j].iter().filter(|&&k| labels[k].is_active()).count() as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Fold index per molecule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    pub folds: usize,
    pub seed: u64,
    assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Shuffles each class with a seeded ChaCha8 stream and deals its members
/// round-robin over the folds, continuing the deal where the previous class
/// stopped so that total fold sizes are balanced as well.
pub fn stratified_folds(labels: &[Class], folds: usize, seed: u64) -> Result<FoldAssignment, LearnError> {
    if folds < 2 {
        return Err(LearnError::InvalidFolds(folds));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for class in [Class::Active, Class::Inactive] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(LearnError::ClassTooSmall {
                class: if class.is_active() { "active" } else { "inactive" },
                size: members.len(),
                folds,
            });
        }
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = (offset + pos) % folds;
        }
        offset = (offset + members.len()) % folds;
    }
    Ok(FoldAssignment {
        folds,
        seed,
        assignment,
    })
}
