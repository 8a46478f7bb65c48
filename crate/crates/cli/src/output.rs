//! Result tables.
//!
//! Per dataset, under `<output>/<experiment>/<dataset>/`:
//!
//! | file                     | columns                                                             |
//! |--------------------------|---------------------------------------------------------------------|
//! | `fragments_<l>_<m>_<p>.tsv` | `rank canonical_code chi2 p n P N`, mined on the whole dataset   |
//! | `report.csv`             | `dataset,fold,language,mode,param,n_fragments,auc,correspondences,avg_features_per_molecule,min_score` |
//! | `aggregate.csv`          | per-condition means of the report columns over folds                |
//! | `wilcoxon.csv`           | paired signed-rank tests on per-fold AUCs                           |
//! | `intercorr.tsv`          | `language mode param i j phi` over each set's top fragments         |
//! | `intercorr_summary.csv`  | `language,mode,param,m,mean_abs_phi,cyclic_fraction`                |
//! | `crop.csv`               | E2 only: `fold,language,k,floor,n_topk,n_crop`                      |
//! | `worst_scores.csv`       | E3/E4 only: `fold,language,mode,param,n_fragments,min_score`        |
//! | `manifest.json`          | run parameters and the files written                                |
//!
//! The experiment directory also gets `aggregate.csv` and `wilcoxon.csv`
//! over all datasets and `summary.csv` with each dataset's status.
//! Floats are written in shortest round-trip form, so aggregates can be
//! recomputed exactly from `report.csv`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use molfrag_core::analyze::{cyclic_fraction, intercorrelation, wilcoxon_signed_rank, AnalyzeError, Direction};
use molfrag_core::encode::{encode_dataset, FragmentVocabulary, Provenance};
use molfrag_core::learn::{Condition, ReportRow};
use molfrag_core::miner::write_fragments_tsv;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::experiments::{path_condition, DatasetRun};

/// Confidence level of the signed-rank tests.
pub const WILCOXON_ALPHA: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub dataset: String,
    pub language: String,
    pub mode: String,
    pub param: String,
    pub folds: usize,
    pub n_fragments: f64,
    pub auc: f64,
    pub correspondences: f64,
    pub avg_features_per_molecule: f64,
    /// Mean over the folds that have a score.
    pub min_score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WilcoxonRow {
    pub dataset: String,
    pub language_a: String,
    pub mode_a: String,
    pub param_a: String,
    pub language_b: String,
    pub mode_b: String,
    pub param_b: String,
    pub mean_auc_a: f64,
    pub mean_auc_b: f64,
    /// Nonzero differences.
    pub n: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
    /// `a`, `b` or `none`: which side has the larger median difference.
    pub better: String,
    /// `exact`, `normal`, or `degenerate` when fewer than 5 differences
    /// are nonzero.
    pub method: String,
}

fn key(c: &Condition) -> (String, String, String) {
    (c.language.clone(), c.mode.clone(), c.param.clone())
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Per-condition means, conditions in order of first appearance. Sums run
/// in row order.
pub fn aggregate(rows: &[ReportRow]) -> Vec<AggregateRow> {
    let mut order: Vec<(String, (String, String, String))> = Vec::new();
    let mut groups: BTreeMap<(String, (String, String, String)), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        let k = (r.dataset.clone(), (r.language.clone(), r.mode.clone(), r.param.clone()));
        if !groups.contains_key(&k) {
            order.push(k.clone());
        }
        groups.entry(k).or_default().push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let g = &groups[&k];
            let (dataset, (language, mode, param)) = k;
            AggregateRow {
                dataset,
                language,
                mode,
                param,
                folds: g.len(),
                n_fragments: mean(g.iter().map(|r| r.n_fragments as f64)).unwrap_or(0.0),
                auc: mean(g.iter().map(|r| r.auc)).unwrap_or(0.0),
                correspondences: mean(g.iter().map(|r| r.correspondences as f64)).unwrap_or(0.0),
                avg_features_per_molecule: mean(g.iter().map(|r| r.avg_features_per_molecule)).unwrap_or(0.0),
                min_score: mean(g.iter().filter_map(|r| r.min_score)),
            }
        })
        .collect()
}

/// Per-fold AUCs by condition, in fold order.
fn fold_aucs(run: &DatasetRun) -> (Vec<Condition>, BTreeMap<(String, String, String), Vec<f64>>) {
    let mut conditions = Vec::new();
    let mut aucs: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    for o in &run.outcomes {
        let k = key(&o.condition);
        if !aucs.contains_key(&k) {
            conditions.push(o.condition.clone());
        }
        aucs.entry(k).or_default().push(o.row.auc);
    }
    (conditions, aucs)
}

/// Condition pairs to test: E4 compares the path baseline with each
/// threshold set, other experiments compare every pair.
fn comparison_pairs(config: &ExperimentConfig, conditions: &[Condition]) -> Vec<(Condition, Condition)> {
    let mut pairs = Vec::new();
    if config.experiment == Experiment::E4 {
        let path = path_condition(config);
        for c in conditions.iter().filter(|c| **c != path) {
            pairs.push((path.clone(), c.clone()));
        }
    } else {
        for (i, a) in conditions.iter().enumerate() {
            for b in &conditions[i + 1..] {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    pairs
}

pub fn wilcoxon_rows(config: &ExperimentConfig, run: &DatasetRun) -> Vec<WilcoxonRow> {
    let (conditions, aucs) = fold_aucs(run);
    comparison_pairs(config, &conditions)
        .into_iter()
        .map(|(a, b)| {
            let xa = &aucs[&key(&a)];
            let xb = &aucs[&key(&b)];
            let mut row = WilcoxonRow {
                dataset: run.dataset.name.clone(),
                language_a: a.language,
                mode_a: a.mode,
                param_a: a.param,
                language_b: b.language,
                mode_b: b.mode,
                param_b: b.param,
                mean_auc_a: mean(xa.iter().copied()).unwrap_or(0.0),
                mean_auc_b: mean(xb.iter().copied()).unwrap_or(0.0),
                n: 0,
                statistic: None,
                p_value: None,
                significant: false,
                better: "none".into(),
                method: "degenerate".into(),
            };
            match wilcoxon_signed_rank(xa, xb, WILCOXON_ALPHA) {
                Ok(w) => {
                    row.n = w.n;
                    row.statistic = Some(w.statistic);
                    row.p_value = Some(w.p_value);
                    row.significant = w.significant;
                    row.better = match w.direction {
                        Direction::FirstGreater => "a",
                        Direction::SecondGreater => "b",
                        Direction::Neither => "none",
                    }
                    .into();
                    row.method = serde_json::to_value(w.method)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default();
                }
                Err(AnalyzeError::TooFewDifferences(n)) => row.n = n,
                Err(_) => {}
            }
            row
        })
        .collect()
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

pub const REPORT_HEADER: [&str; 10] = [
    "dataset",
    "fold",
    "language",
    "mode",
    "param",
    "n_fragments",
    "auc",
    "correspondences",
    "avg_features_per_molecule",
    "min_score",
];

pub const AGGREGATE_HEADER: [&str; 10] = [
    "dataset",
    "language",
    "mode",
    "param",
    "folds",
    "n_fragments",
    "auc",
    "correspondences",
    "avg_features_per_molecule",
    "min_score",
];

pub const WILCOXON_HEADER: [&str; 15] = [
    "dataset",
    "language_a",
    "mode_a",
    "param_a",
    "language_b",
    "mode_b",
    "param_b",
    "mean_auc_a",
    "mean_auc_b",
    "n",
    "statistic",
    "p_value",
    "significant",
    "better",
    "method",
];

pub fn fragments_file_name(c: &Condition) -> String {
    format!("fragments_{}_{}_{}.tsv", c.language, c.mode, c.param)
}

fn write_fragment_tables(dir: &Path, run: &DatasetRun, files: &mut Vec<String>) -> std::io::Result<()> {
    for (condition, patterns) in &run.full {
        let name = fragments_file_name(condition);
        let mut w = create(&dir.join(&name))?;
        write_fragments_tsv(&mut w, patterns)?;
        w.flush()?;
        files.push(name);
    }
    Ok(())
}

fn write_intercorrelation(dir: &Path, config: &ExperimentConfig, run: &DatasetRun) -> std::io::Result<()> {
    let mut tsv = create(&dir.join("intercorr.tsv"))?;
    writeln!(tsv, "language\tmode\tparam\ti\tj\tphi")?;
    let mut summary = csv::Writer::from_writer(create(&dir.join("intercorr_summary.csv"))?);
    summary.write_record(["language", "mode", "param", "m", "mean_abs_phi", "cyclic_fraction"])?;
    for (condition, patterns) in &run.full {
        let m = config.intercorrelation_top.min(patterns.len());
        let top = &patterns[..m];
        let vocab = FragmentVocabulary::from_scored(top, Provenance::default());
        let rows = encode_dataset(&run.dataset, &vocab);
        let matrix = intercorrelation(&rows, m);
        for i in 0..m {
            for j in 0..m {
                writeln!(
                    tsv,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    condition.language,
                    condition.mode,
                    condition.param,
                    i + 1,
                    j + 1,
                    matrix.get(i, j)
                )?;
            }
        }
        summary.write_record([
            condition.language.clone(),
            condition.mode.clone(),
            condition.param.clone(),
            m.to_string(),
            matrix.mean_abs_off_diagonal().to_string(),
            cyclic_fraction(top).to_string(),
        ])?;
    }
    tsv.flush()?;
    summary.flush()
}

fn write_crop_table(path: &Path, config: &ExperimentConfig, run: &DatasetRun) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["fold", "language", "k", "floor", "n_topk", "n_crop"])?;
    let k = config.k.to_string();
    for fold in 0..config.folds {
        let in_fold: Vec<_> = run.outcomes.iter().filter(|o| o.row.fold == fold).collect();
        let floor = in_fold
            .iter()
            .find(|o| o.condition.language == "graph" && o.condition.mode == "topk")
            .and_then(|o| o.row.min_score)
            .unwrap_or(0.0);
        for o in in_fold.iter().filter(|o| o.condition.mode == "crop") {
            let n_topk = in_fold
                .iter()
                .find(|t| t.condition.language == o.condition.language && t.condition.mode == "topk")
                .map_or(0, |t| t.row.n_fragments);
            w.write_record([
                fold.to_string(),
                o.condition.language.clone(),
                k.clone(),
                floor.to_string(),
                n_topk.to_string(),
                o.row.n_fragments.to_string(),
            ])?;
        }
    }
    w.flush()
}

fn write_worst_scores(path: &Path, run: &DatasetRun) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["fold", "language", "mode", "param", "n_fragments", "min_score"])?;
    for o in &run.outcomes {
        let r = &o.row;
        w.write_record([
            r.fold.to_string(),
            r.language.clone(),
            r.mode.clone(),
            r.param.clone(),
            r.n_fragments.to_string(),
            r.min_score.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()
}

/// Tables produced for one dataset, also merged into the batch files.
pub struct Written {
    pub aggregate: Vec<AggregateRow>,
    pub wilcoxon: Vec<WilcoxonRow>,
}

/// Writes the dataset directory. Cross-validation tables are skipped when
/// `run` has no outcomes.
pub fn write_dataset(
    dir: &Path,
    config: &ExperimentConfig,
    source: &Path,
    run: &DatasetRun,
) -> std::io::Result<Written> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    write_fragment_tables(dir, run, &mut files)?;
    let mut written = Written {
        aggregate: Vec::new(),
        wilcoxon: Vec::new(),
    };
    if !run.outcomes.is_empty() {
        let rows: Vec<ReportRow> = run.outcomes.iter().map(|o| o.row.clone()).collect();
        write_csv(&dir.join("report.csv"), &rows, &REPORT_HEADER)?;
        written.aggregate = aggregate(&rows);
        write_csv(&dir.join("aggregate.csv"), &written.aggregate, &AGGREGATE_HEADER)?;
        written.wilcoxon = wilcoxon_rows(config, run);
        write_csv(&dir.join("wilcoxon.csv"), &written.wilcoxon, &WILCOXON_HEADER)?;
        write_intercorrelation(dir, config, run)?;
        files.extend(
            ["report.csv", "aggregate.csv", "wilcoxon.csv", "intercorr.tsv", "intercorr_summary.csv"].map(String::from),
        );
        match config.experiment {
            Experiment::E2 => {
                write_crop_table(&dir.join("crop.csv"), config, run)?;
                files.push("crop.csv".into());
            }
            Experiment::E3 | Experiment::E4 => {
                write_worst_scores(&dir.join("worst_scores.csv"), run)?;
                files.push("worst_scores.csv".into());
            }
            _ => {}
        }
    }
    files.push("manifest.json".into());
    let manifest = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": config.experiment.name(),
        "dataset": run.dataset.name,
        "source": source,
        "molecules": run.dataset.len(),
        "actives": run.dataset.count_active(),
        "inactives": run.dataset.count_inactive(),
        "config": config,
        "conditions": run.full.iter().map(|(c, p)| serde_json::json!({
            "language": c.language,
            "mode": c.mode,
            "param": c.param,
            "fragments": p.len(),
        })).collect::<Vec<_>>(),
        "files": files,
    });
    let mut w = create(&dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(written)
}

/// Status of one dataset in a batch.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub status: String,
    pub error: String,
}

pub fn experiment_dir(config: &ExperimentConfig) -> PathBuf {
    config.output.join(config.experiment.name())
}
