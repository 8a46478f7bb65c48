//! The four experiments, plus custom runs, as fragment-set builders.
//!
//! | experiment | conditions per fold                                               |
//! |------------|-------------------------------------------------------------------|
//! | E1         | top-k for each configured language                                |
//! | E2         | graph top-k; sequence/tree top-k, raw and cropped at the k-th graph score |
//! | E3         | sequences above each confidence level's χ² critical value         |
//! | E4         | E3 plus all restricted paths (length ≤ L, frequency ≥ f)          |
//! | custom     | each language in the configured mode                              |
//!
//! The same builder produces the per-fold sets during cross-validation and
//! the full-dataset sets written as fragment tables.

use std::path::Path;

use molfrag_core::analyze::crop_by_score;
use molfrag_core::learn::{run_cv_with, Condition, CvConfig, CvError, FoldOutcome, SvmParams};
use molfrag_core::miner::{chi2_quantile, enumerate_restricted_paths, mine, MiningMode, MiningTask, ScoredPattern};
use molfrag_core::molgraph::{parse_smiles_file, parse_transactions, LabeledDataset};
use molfrag_core::patterns::PatternLanguage;

use crate::config::{dataset_name, Experiment, ExperimentConfig, ModeKind};

pub type ConditionSet = Vec<(Condition, Vec<ScoredPattern>)>;

/// Reads a `.smi`/`.smiles` file or a transaction file; the dataset is
/// named after the file stem.
pub fn load_dataset(path: &Path) -> Result<LabeledDataset, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let name = dataset_name(path);
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let mut ds = if ext == "smi" || ext == "smiles" {
        parse_smiles_file(&text, &name).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        parse_transactions(&text).map_err(|e| format!("{}: {e}", path.display()))?
    };
    ds.name = name;
    Ok(ds)
}

fn mined(dataset: &LabeledDataset, language: PatternLanguage, mode: MiningMode) -> Result<Vec<ScoredPattern>, CvError> {
    Ok(mine(&MiningTask {
        language,
        mode,
        dataset,
    })?)
}

fn label(x: f64) -> String {
    format!("{x}")
}

/// Sequences mined once at the loosest level and cropped for the others.
fn sequence_levels(config: &ExperimentConfig, dataset: &LabeledDataset) -> Result<ConditionSet, CvError> {
    let levels = config.confidence_levels();
    let floors = levels
        .iter()
        .map(|&c| chi2_quantile(c))
        .collect::<Result<Vec<_>, _>>()?;
    let base = mined(dataset, PatternLanguage::Sequence, MiningMode::Threshold(floors[0]))?;
    Ok(levels
        .iter()
        .zip(&floors)
        .map(|(&c, &t)| {
            let condition = Condition::new("sequence", "threshold", label(c));
            (condition, crop_by_score(&base, t))
        })
        .collect())
}

pub fn path_condition(config: &ExperimentConfig) -> Condition {
    Condition::new(
        "path",
        "restricted",
        format!("L{}_f{}", config.max_path_length, config.min_frequency),
    )
}

/// All fragment sets of the configured experiment, mined on `dataset`.
pub fn build_conditions(config: &ExperimentConfig, dataset: &LabeledDataset) -> Result<ConditionSet, CvError> {
    let k = config.k;
    let mut out = Vec::new();
    match config.experiment {
        Experiment::E1 => {
            for &lang in &config.languages {
                out.push((Condition::mined(lang, MiningMode::TopK(k)), mined(dataset, lang, MiningMode::TopK(k))?));
            }
        }
        Experiment::E2 => {
            let graph = mined(dataset, PatternLanguage::Graph, MiningMode::TopK(k))?;
            let floor = graph.last().map_or(0.0, |p| p.chi2);
            out.push((Condition::mined(PatternLanguage::Graph, MiningMode::TopK(k)), graph));
            for &lang in config.languages.iter().filter(|l| **l != PatternLanguage::Graph) {
                let top = mined(dataset, lang, MiningMode::TopK(k))?;
                let cropped = crop_by_score(&top, floor);
                out.push((Condition::mined(lang, MiningMode::TopK(k)), top));
                out.push((Condition::new(lang.name(), "crop", k.to_string()), cropped));
            }
        }
        Experiment::E3 => out = sequence_levels(config, dataset)?,
        Experiment::E4 => {
            out = sequence_levels(config, dataset)?;
            let paths = enumerate_restricted_paths(dataset, config.max_path_length, config.min_frequency)?;
            out.push((path_condition(config), paths));
        }
        Experiment::Custom => {
            for &lang in &config.languages {
                match config.mode {
                    ModeKind::TopK => {
                        let mode = MiningMode::TopK(k);
                        out.push((Condition::mined(lang, mode), mined(dataset, lang, mode)?));
                    }
                    ModeKind::Threshold => {
                        let mut floors = config
                            .confidence_levels()
                            .into_iter()
                            .map(chi2_quantile)
                            .collect::<Result<Vec<_>, _>>()?;
                        floors.extend(&config.thresholds);
                        floors.sort_by(f64::total_cmp);
                        floors.dedup();
                        let base = mined(dataset, lang, MiningMode::Threshold(floors[0]))?;
                        for t in floors {
                            out.push((
                                Condition::mined(lang, MiningMode::Threshold(t)),
                                crop_by_score(&base, t),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Everything computed for one dataset.
#[derive(Clone, Debug)]
pub struct DatasetRun {
    pub dataset: LabeledDataset,
    /// Sets mined on the whole dataset.
    pub full: ConditionSet,
    /// Cross-validation outcomes, by fold then condition; empty for `mine`.
    pub outcomes: Vec<FoldOutcome>,
}

pub fn cv_config(config: &ExperimentConfig) -> CvConfig {
    CvConfig {
        folds: config.folds,
        seed: config.seed,
        svm: SvmParams {
            c: config.c,
            tol: config.tol,
            ..SvmParams::default()
        },
        parallel: true,
    }
}

pub fn mine_dataset(config: &ExperimentConfig, dataset: LabeledDataset) -> Result<DatasetRun, CvError> {
    let full = build_conditions(config, &dataset)?;
    Ok(DatasetRun {
        dataset,
        full,
        outcomes: Vec::new(),
    })
}

pub fn evaluate_dataset(config: &ExperimentConfig, dataset: LabeledDataset) -> Result<DatasetRun, CvError> {
    let outcomes = run_cv_with(&dataset, &cv_config(config), |_, train| build_conditions(config, train))?;
    let mut run = mine_dataset(config, dataset)?;
    run.outcomes = outcomes;
    Ok(run)
}
