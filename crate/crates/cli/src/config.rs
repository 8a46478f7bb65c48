//! Experiment configuration: command-line defaults overlaid by an optional
//! TOML file.
//!
//! ```toml
//! experiment = "E1"            # E1 | E2 | E3 | E4 | custom
//! datasets = ["data/a.smi", "data/b.txt"]
//! output = "out"
//! seed = 0
//! folds = 10
//!
//! [mining]
//! mode = "topk"                # custom runs: topk | threshold
//! languages = ["sequence", "tree", "graph"]
//! k = 1000
//! confidence = [0.95, 0.99, 0.999]
//! thresholds = []              # extra χ² floors for custom threshold runs
//! max_path_length = 10
//! min_frequency = 1
//! intercorrelation_top = 100
//!
//! [svm]
//! c = 1.0
//! tol = 0.001
//! ```
//!
//! Relative dataset paths are resolved against the config file's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use molfrag_core::miner::chi2_quantile;
use molfrag_core::patterns::PatternLanguage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{location}{message}")]
    Invalid { location: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    E1,
    E2,
    E3,
    E4,
    #[serde(rename = "custom")]
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::E1 => "E1",
            Experiment::E2 => "E2",
            Experiment::E3 => "E3",
            Experiment::E4 => "E4",
            Experiment::Custom => "custom",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Experiment::E1),
            "e2" => Ok(Experiment::E2),
            "e3" => Ok(Experiment::E3),
            "e4" => Ok(Experiment::E4),
            "custom" => Ok(Experiment::Custom),
            _ => Err(format!("unknown experiment {s:?}; expected E1, E2, E3, E4 or custom")),
        }
    }
}

/// Mining mode of custom runs; E1 to E4 fix their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    TopK,
    Threshold,
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "topk" => Ok(ModeKind::TopK),
            "threshold" => Ok(ModeKind::Threshold),
            _ => Err(format!("unknown mode {s:?}; expected topk or threshold")),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub datasets: Vec<PathBuf>,
    pub output: PathBuf,
    pub seed: u64,
    pub folds: usize,
    pub mode: ModeKind,
    pub languages: Vec<PatternLanguage>,
    pub k: usize,
    pub confidence: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub max_path_length: usize,
    pub min_frequency: usize,
    pub intercorrelation_top: usize,
    pub c: f64,
    pub tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::E1,
            datasets: Vec::new(),
            output: PathBuf::from("out"),
            seed: 0,
            folds: 10,
            mode: ModeKind::TopK,
            languages: PatternLanguage::ALL.to_vec(),
            k: 1000,
            confidence: vec![0.95, 0.99, 0.999],
            thresholds: Vec::new(),
            max_path_length: 10,
            min_frequency: 1,
            intercorrelation_top: 100,
            c: 1.0,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    datasets: Option<Vec<PathBuf>>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    folds: Option<usize>,
    mining: Option<MiningSection>,
    svm: Option<SvmSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MiningSection {
    mode: Option<ModeKind>,
    languages: Option<Vec<PatternLanguage>>,
    k: Option<usize>,
    confidence: Option<Vec<f64>>,
    thresholds: Option<Vec<f64>>,
    max_path_length: Option<usize>,
    min_frequency: Option<usize>,
    intercorrelation_top: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SvmSection {
    c: Option<f64>,
    tol: Option<f64>,
}

/// Location prefix `file:line: ` of the first `key =` line, if any.
fn locate(source: Option<(&Path, &str)>, key: &str) -> String {
    let Some((path, text)) = source else {
        return format!("--{}: ", key.replace('_', "-"));
    };
    for (i, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return format!("{}:{}: ", path.display(), i + 1);
            }
        }
    }
    format!("{}: ", path.display())
}

impl ExperimentConfig {
    /// Overlays the TOML file at `path`; its values win over `self`.
    pub fn overlay_file(mut self, path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: FileConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(e) = file.experiment {
            self.experiment = e.parse().map_err(|message| ConfigError::Invalid {
                location: locate(Some((path, &text)), "experiment"),
                message,
            })?;
        }
        if let Some(d) = file.datasets {
            self.datasets = d.into_iter().map(|p| if p.is_relative() { base.join(p) } else { p }).collect();
        }
        if let Some(o) = file.output {
            self.output = if o.is_relative() { base.join(o) } else { o };
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(f) = file.folds {
            self.folds = f;
        }
        if let Some(m) = file.mining {
            if let Some(v) = m.mode {
                self.mode = v;
            }
            if let Some(v) = m.languages {
                self.languages = v;
            }
            if let Some(v) = m.k {
                self.k = v;
            }
            if let Some(v) = m.confidence {
                self.confidence = v;
            }
            if let Some(v) = m.thresholds {
                self.thresholds = v;
            }
            if let Some(v) = m.max_path_length {
                self.max_path_length = v;
            }
            if let Some(v) = m.min_frequency {
                self.min_frequency = v;
            }
            if let Some(v) = m.intercorrelation_top {
                self.intercorrelation_top = v;
            }
        }
        if let Some(s) = file.svm {
            if let Some(v) = s.c {
                self.c = v;
            }
            if let Some(v) = s.tol {
                self.tol = v;
            }
        }
        Ok((self, text))
    }

    /// Checks parameter ranges and that every dataset exists. `source` is
    /// the config file and its text, for error locations.
    pub fn validate(&self, source: Option<(&Path, &str)>) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| ConfigError::Invalid {
            location: locate(source, key),
            message,
        };
        if self.datasets.is_empty() {
            return Err(fail("datasets", "no datasets given".into()));
        }
        for d in &self.datasets {
            if !d.is_file() {
                return Err(fail("datasets", format!("dataset {} does not exist", d.display())));
            }
        }
        if self.k == 0 {
            return Err(fail("k", "k must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(fail("folds", format!("folds must be at least 2, got {}", self.folds)));
        }
        if self.languages.is_empty() {
            return Err(fail("languages", "at least one language is required".into()));
        }
        for &c in &self.confidence {
            chi2_quantile(c).map_err(|e| fail("confidence", e.to_string()))?;
        }
        let needs_confidence = matches!(self.experiment, Experiment::E3 | Experiment::E4);
        if needs_confidence && self.confidence.is_empty() {
            return Err(fail("confidence", "at least one confidence level is required".into()));
        }
        let custom_threshold = self.experiment == Experiment::Custom && self.mode == ModeKind::Threshold;
        if custom_threshold && self.confidence.is_empty() && self.thresholds.is_empty() {
            return Err(fail("thresholds", "threshold mode needs a confidence level or threshold".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if !names.insert(dataset_name(d)) {
                return Err(fail(
                    "datasets",
                    format!("two datasets share the name {:?}", dataset_name(d)),
                ));
            }
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(fail("thresholds", format!("threshold {t} must be a non-negative number")));
        }
        if self.max_path_length == 0 {
            return Err(fail("max_path_length", "max_path_length must be at least 1".into()));
        }
        if self.min_frequency == 0 {
            return Err(fail("min_frequency", "min_frequency must be at least 1".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(fail("c", format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(fail("tol", format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    /// Distinct confidence levels, loosest first.
    pub fn confidence_levels(&self) -> Vec<f64> {
        let mut c = self.confidence.clone();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }
}

/// Output directory name of a dataset: its file stem.
pub fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}
