use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analyze::{correspondences, features_per_molecule, CorrespondenceReport};
use crate::encode::{encode_dataset, FragmentVocabulary, Provenance};
use crate::miner::{mine, MinerError, MiningMode, MiningTask, ScoredPattern};
use crate::molgraph::LabeledDataset;
use crate::patterns::PatternLanguage;

use super::{auc, decision_values, stratified_folds, train_svm, KernelMatrix, LearnError, SvmParams};

#[derive(Debug, Error)]
pub enum CvError {
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Miner(#[from] MinerError),
    #[error("{0}")]
    Other(String),
}

/// Labels one fragment set evaluated in a fold.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Condition {
    /// `sequence`, `tree`, `graph` or `path`.
    pub language: String,
    /// `topk`, `threshold`, `crop` or `restricted`.
    pub mode: String,
    pub param: String,
}

impl Condition {
    pub fn new(language: impl Into<String>, mode: impl Into<String>, param: impl Into<String>) -> Self {
        Condition {
            language: language.into(),
            mode: mode.into(),
            param: param.into(),
        }
    }

    pub fn mined(language: PatternLanguage, mode: MiningMode) -> Self {
        match mode {
            MiningMode::TopK(k) => Condition::new(language.name(), "topk", k.to_string()),
            MiningMode::Threshold(t) => Condition::new(language.name(), "threshold", t.to_string()),
        }
    }
}

/// One line of `report.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub dataset: String,
    pub fold: usize,
    pub language: String,
    pub mode: String,
    pub param: String,
    pub n_fragments: usize,
    pub auc: f64,
    pub correspondences: usize,
    pub avg_features_per_molecule: f64,
    /// Lowest χ² in the vocabulary; absent when it is empty.
    pub min_score: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub svm: SvmParams,
    /// Evaluate folds concurrently on the current rayon pool.
    pub parallel: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            seed: 0,
            svm: SvmParams::default(),
            parallel: true,
        }
    }
}

/// Everything computed for one (fold, condition).
#[derive(Clone, Debug)]
pub struct FoldOutcome {
    pub row: ReportRow,
    pub condition: Condition,
    pub patterns: Vec<ScoredPattern>,
    /// Dataset indices of the training and test molecules.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Decision values for `test`, in the same order.
    pub test_scores: Vec<f64>,
    /// Measured on the training-fold encoding.
    pub correspondence: CorrespondenceReport,
}

/// Stratified cross-validation of fragment sets built by `build`.
///
/// For each fold, `build` receives the fold index and the training
/// molecules only and returns any number of scored fragment sets. Each set
/// becomes a vocabulary; train and test molecules are encoded over it, an
/// SVM is trained on the training encoding and AUC is measured on the test
/// fold. Correspondences and features per molecule describe the training
/// encoding. Outcomes are ordered by fold, then by the order `build`
/// returned the sets.
pub fn run_cv_with<F>(dataset: &LabeledDataset, config: &CvConfig, build: F) -> Result<Vec<FoldOutcome>, CvError>
where
    F: Fn(usize, &LabeledDataset) -> Result<Vec<(Condition, Vec<ScoredPattern>)>, CvError> + Sync,
{
    let folds = stratified_folds(dataset.labels(), config.folds, config.seed)?;
    let run_fold = |fold: usize| -> Result<Vec<FoldOutcome>, CvError> {
        let train_idx = folds.train_indices(fold);
        let test_idx = folds.test_indices(fold);
        let train = dataset.subset(&train_idx);
        let test = dataset.subset(&test_idx);
        let sets = build(fold, &train)?;
        let mut out = Vec::with_capacity(sets.len());
        for (condition, patterns) in sets {
            let vocab = FragmentVocabulary::from_scored(
                &patterns,
                Provenance {
                    source: condition.language.clone(),
                    selection: format!("{} {}", condition.mode, condition.param),
                    fold: Some(fold),
                },
            );
            let train_fp = encode_dataset(&train, &vocab);
            let test_fp = encode_dataset(&test, &vocab);
            let k_train = KernelMatrix::gram(&train_fp)?;
            let model = train_svm(&k_train, train.labels(), &config.svm)?;
            let k_test = KernelMatrix::cross(&test_fp, &train_fp)?;
            let scores = decision_values(&model, &k_test)?;
            let fold_auc = auc(&scores, test.labels())?;
            let corr = correspondences(&train_fp, train.labels());
            let row = ReportRow {
                dataset: dataset.name.clone(),
                fold,
                language: condition.language.clone(),
                mode: condition.mode.clone(),
                param: condition.param.clone(),
                n_fragments: vocab.len(),
                auc: fold_auc,
                correspondences: corr.pair_count,
                avg_features_per_molecule: features_per_molecule(&train_fp),
                min_score: patterns.iter().map(|p| p.chi2).min_by(f64::total_cmp),
            };
            out.push(FoldOutcome {
                row,
                condition,
                patterns,
                train: train_idx.clone(),
                test: test_idx.clone(),
                test_scores: scores,
                correspondence: corr,
            });
        }
        Ok(out)
    };
    let per_fold: Vec<Result<Vec<FoldOutcome>, CvError>> = if config.parallel {
        (0..config.folds).into_par_iter().map(run_fold).collect()
    } else {
        (0..config.folds).map(run_fold).collect()
    };
    let mut out = Vec::new();
    for r in per_fold {
        out.extend(r?);
    }
    Ok(out)
}

/// Cross-validates a single mining task.
pub fn run_cv(
    dataset: &LabeledDataset,
    language: PatternLanguage,
    mode: MiningMode,
    config: &CvConfig,
) -> Result<Vec<ReportRow>, CvError> {
    let outcomes = run_cv_with(dataset, config, |_, train| {
        let patterns = mine(&MiningTask {
            language,
            mode,
            dataset: train,
        })?;
        Ok(vec![(Condition::mined(language, mode), patterns)])
    })?;
    Ok(outcomes.into_iter().map(|o| o.row).collect())
}
