use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use molfrag_core::analyze::{correspondences, cyclic_fraction, features_per_molecule, intercorrelation, score_stats};
use molfrag_core::encode::{
    encode_dataset, fold, write_dense_csv, write_sparse_tsv, FragmentVocabulary, HashParams, Provenance,
};
use molfrag_core::miner::read_fragments_tsv;
use molfrag_core::patterns::PatternLanguage;
use molfrag_core::synth::{generate, planted_suite, to_transactions, GeneratorSpec, PlantSpec};

use crate::config::{ConfigError, Experiment, ExperimentConfig, ModeKind};
use crate::experiments::{evaluate_dataset, load_dataset, mine_dataset};
use crate::output::{
    experiment_dir, write_csv, write_dataset, SummaryRow, AGGREGATE_HEADER, WILCOXON_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "molfrag", version, about = "Mine class-correlated molecular fragments and evaluate them as SVM features")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine fragment tables on whole datasets.
    Mine(RunArgs),
    /// Run an experiment under stratified cross-validation.
    Evaluate(RunArgs),
    /// Write a synthetic dataset with planted fragments.
    Generate(GenerateArgs),
    /// Fingerprint diagnostics for a fragment table over a dataset.
    Analyze(AnalyzeArgs),
}

/// Experiment flags; a `--config` file overrides them.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// E1, E2, E3, E4 or custom.
    #[arg(long)]
    pub experiment: Option<Experiment>,
    /// Dataset file (`.smi`/`.smiles` or transactions); repeatable.
    #[arg(long = "dataset", short = 'd')]
    pub datasets: Vec<PathBuf>,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// sequence, tree or graph; repeatable.
    #[arg(long = "language")]
    pub languages: Vec<PatternLanguage>,
    /// Mining mode of custom runs: topk or threshold.
    #[arg(long)]
    pub mode: Option<ModeKind>,
    #[arg(long)]
    pub k: Option<usize>,
    /// 0.95, 0.99 or 0.999; repeatable.
    #[arg(long = "confidence")]
    pub confidence: Vec<f64>,
    /// Explicit χ² floor for custom threshold runs; repeatable.
    #[arg(long = "threshold")]
    pub thresholds: Vec<f64>,
    #[arg(long)]
    pub max_path_length: Option<usize>,
    #[arg(long)]
    pub min_frequency: Option<usize>,
    /// Fragments per intercorrelation matrix.
    #[arg(long)]
    pub intercorrelation_top: Option<usize>,
    /// SVM regularization.
    #[arg(long)]
    pub c: Option<f64>,
    /// SVM stopping tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Transaction file to write; the manifest goes next to it.
    #[arg(long, short = 'o')]
    pub output: PathBuf,
    /// Start from benchmark suite dataset N.
    #[arg(long)]
    pub suite: Option<usize>,
    /// TOML generator spec; its keys override flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub molecules: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub active_fraction: Option<f64>,
    #[arg(long)]
    pub min_atoms: Option<usize>,
    #[arg(long)]
    pub max_atoms: Option<usize>,
    /// `SMILES,P_ACTIVE,P_INACTIVE`; repeatable, replaces preset plants.
    #[arg(long = "plant")]
    pub plants: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Fragment table as written by `mine`.
    #[arg(long)]
    pub fragments: PathBuf,
    #[arg(long, short = 'd')]
    pub dataset: PathBuf,
    #[arg(long, short = 'o')]
    pub output: PathBuf,
    /// Fragments in the intercorrelation matrix.
    #[arg(long, default_value_t = 100)]
    pub top: usize,
    /// Hashed fingerprint width to compare against; repeatable.
    #[arg(long = "hash-k")]
    pub hash_k: Vec<usize>,
    /// Bits per fragment in hashed fingerprints.
    #[arg(long, default_value_t = 1)]
    pub hash_b: usize,
    #[arg(long, default_value_t = 0)]
    pub hash_seed: u64,
    /// Also write the fingerprint matrix (dense CSV and sparse TSV).
    #[arg(long)]
    pub fingerprints: bool,
}

impl RunArgs {
    fn to_config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        if let Some(v) = self.experiment {
            c.experiment = v;
        }
        if !self.datasets.is_empty() {
            c.datasets = self.datasets.clone();
        }
        if let Some(v) = &self.output {
            c.output = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.folds {
            c.folds = v;
        }
        if !self.languages.is_empty() {
            c.languages = self.languages.clone();
        }
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if !self.confidence.is_empty() {
            c.confidence = self.confidence.clone();
        }
        if !self.thresholds.is_empty() {
            c.thresholds = self.thresholds.clone();
        }
        if let Some(v) = self.max_path_length {
            c.max_path_length = v;
        }
        if let Some(v) = self.min_frequency {
            c.min_frequency = v;
        }
        if let Some(v) = self.intercorrelation_top {
            c.intercorrelation_top = v;
        }
        if let Some(v) = self.c {
            c.c = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        c
    }

    /// Flags, then the config file, then validation.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let flags = self.to_config();
        match &self.config {
            Some(path) => {
                let (config, text) = flags.overlay_file(path)?;
                config.validate(Some((path, &text)))?;
                Ok(config)
            }
            None => {
                flags.validate(None)?;
                Ok(flags)
            }
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        // Fails only if a pool already exists, e.g. when called twice in
        // one process; the existing pool is then used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Mine(a) => batch(a, false),
        Command::Evaluate(a) => batch(a, true),
        Command::Generate(a) => cmd_generate(a).map(|()| EXIT_OK),
        Command::Analyze(a) => cmd_analyze(a).map(|()| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    }
}

/// Runs `mine` or `evaluate` over every dataset; a failing dataset is
/// reported and skipped.
fn batch(args: &RunArgs, evaluate: bool) -> anyhow::Result<i32> {
    let config = args.resolve()?;
    let root = experiment_dir(&config);
    let mut summary = Vec::new();
    let mut aggregate = Vec::new();
    let mut wilcoxon = Vec::new();
    for path in &config.datasets {
        let outcome = load_dataset(path).and_then(|ds| {
            let name = ds.name.clone();
            let run = if evaluate {
                evaluate_dataset(&config, ds)
            } else {
                mine_dataset(&config, ds)
            }
            .map_err(|e| format!("{name}: {e}"))?;
            write_dataset(&root.join(&name), &config, path, &run)
                .map(|w| (name.clone(), w))
                .map_err(|e| format!("{name}: cannot write results: {e}"))
        });
        match outcome {
            Ok((name, w)) => {
                eprintln!("{} {}: done", config.experiment, name);
                aggregate.extend(w.aggregate);
                wilcoxon.extend(w.wilcoxon);
                summary.push(SummaryRow {
                    dataset: name,
                    status: "ok".into(),
                    error: String::new(),
                });
            }
            Err(e) => {
                eprintln!("error: {e}");
                summary.push(SummaryRow {
                    dataset: crate::config::dataset_name(path),
                    status: "failed".into(),
                    error: e,
                });
            }
        }
    }
    let write_batch = || -> std::io::Result<()> {
        std::fs::create_dir_all(&root)?;
        write_csv(&root.join("summary.csv"), &summary, &["dataset", "status", "error"])?;
        if evaluate {
            write_csv(&root.join("aggregate.csv"), &aggregate, &AGGREGATE_HEADER)?;
            write_csv(&root.join("wilcoxon.csv"), &wilcoxon, &WILCOXON_HEADER)?;
        }
        Ok(())
    };
    if let Err(e) = write_batch() {
        eprintln!("error: cannot write batch tables in {}: {e}", root.display());
        return Ok(EXIT_PARTIAL);
    }
    if summary.iter().any(|s| s.status != "ok") {
        Ok(EXIT_PARTIAL)
    } else {
        Ok(EXIT_OK)
    }
}

fn parse_plant(s: &str) -> anyhow::Result<PlantSpec> {
    let mut parts = s.rsplitn(3, ',');
    let (Some(pi), Some(pa), Some(smiles)) = (parts.next(), parts.next(), parts.next()) else {
        bail!("--plant {s:?}: expected SMILES,P_ACTIVE,P_INACTIVE");
    };
    Ok(PlantSpec {
        smiles: smiles.to_string(),
        p_active: pa.trim().parse().with_context(|| format!("--plant {s:?}: bad P_ACTIVE"))?,
        p_inactive: pi.trim().parse().with_context(|| format!("--plant {s:?}: bad P_INACTIVE"))?,
    })
}

/// Keys of the file replace those of `base`; unknown keys are rejected.
fn overlay_spec(base: GeneratorSpec, path: &Path) -> anyhow::Result<GeneratorSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let file: toml::Table = toml::from_str(&text).with_context(|| path.display().to_string())?;
    let toml::Value::Table(mut merged) = toml::Value::try_from(&base)? else {
        unreachable!("a struct serializes to a table")
    };
    for (k, v) in file {
        if !merged.contains_key(&k) {
            let line = text.lines().position(|l| l.trim_start().starts_with(k.as_str()));
            let at = line.map(|l| format!(":{}", l + 1)).unwrap_or_default();
            bail!("{}{at}: unknown generator key {k:?}", path.display());
        }
        merged.insert(k, v);
    }
    toml::Value::Table(merged)
        .try_into()
        .with_context(|| path.display().to_string())
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let mut spec = match args.suite {
        Some(i) => planted_suite(i, args.molecules.unwrap_or(300)),
        None => GeneratorSpec::default(),
    };
    if let Some(v) = &args.name {
        spec.name = v.clone();
    }
    if let Some(v) = args.molecules {
        spec.molecules = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.active_fraction {
        spec.active_fraction = v;
    }
    if let Some(v) = args.min_atoms {
        spec.min_atoms = v;
    }
    if let Some(v) = args.max_atoms {
        spec.max_atoms = v;
    }
    if !args.plants.is_empty() {
        spec.plants = args.plants.iter().map(|p| parse_plant(p)).collect::<anyhow::Result<_>>()?;
    }
    if let Some(path) = &args.spec {
        spec = overlay_spec(spec, path)?;
    }
    let (dataset, manifest) = generate(&spec)?;
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&args.output, to_transactions(&dataset, &spec))
        .with_context(|| format!("cannot write {}", args.output.display()))?;
    let sidecar = args.output.with_extension("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    std::fs::write(&sidecar, json).with_context(|| format!("cannot write {}", sidecar.display()))?;
    eprintln!(
        "wrote {} ({} actives, {} inactives) and {}",
        args.output.display(),
        manifest.actives,
        manifest.inactives,
        sidecar.display()
    );
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.fragments)
        .with_context(|| format!("cannot read {}", args.fragments.display()))?;
    let patterns = read_fragments_tsv(&text).with_context(|| args.fragments.display().to_string())?;
    let dataset = load_dataset(&args.dataset).map_err(anyhow::Error::msg)?;
    if args.hash_b == 0 || args.hash_k.contains(&0) {
        bail!("--hash-k and --hash-b must be at least 1");
    }
    let vocab = FragmentVocabulary::from_scored(
        &patterns,
        Provenance {
            source: args.fragments.display().to_string(),
            selection: "all".into(),
            fold: None,
        },
    );
    let rows = encode_dataset(&dataset, &vocab);
    let corr = correspondences(&rows, dataset.labels());
    let m = args.top.min(vocab.len());
    let matrix = intercorrelation(&rows, m);
    let stats = score_stats(&patterns).ok();

    std::fs::create_dir_all(&args.output)?;
    let mut w = csv::Writer::from_path(args.output.join("metrics.csv"))?;
    w.write_record([
        "dataset",
        "n_fragments",
        "correspondences",
        "involved_molecules",
        "zero_vectors",
        "avg_features_per_molecule",
        "min_score",
        "max_score",
        "cyclic_fraction",
        "m",
        "mean_abs_phi",
    ])?;
    w.write_record([
        dataset.name.clone(),
        vocab.len().to_string(),
        corr.pair_count.to_string(),
        corr.involved_molecules.to_string(),
        corr.zero_vector_count.to_string(),
        features_per_molecule(&rows).to_string(),
        stats.as_ref().map(|s| s.min.to_string()).unwrap_or_default(),
        stats.as_ref().map(|s| s.max.to_string()).unwrap_or_default(),
        cyclic_fraction(&patterns).to_string(),
        m.to_string(),
        matrix.mean_abs_off_diagonal().to_string(),
    ])?;
    w.flush()?;

    let mut tsv = std::io::BufWriter::new(std::fs::File::create(args.output.join("intercorr.tsv"))?);
    matrix.write_tsv(&mut tsv)?;
    tsv.flush()?;

    if !args.hash_k.is_empty() {
        let mut w = csv::Writer::from_path(args.output.join("hashed.csv"))?;
        w.write_record(["k", "b", "seed", "correspondences", "involved_molecules", "avg_features_per_molecule"])?;
        for &k in &args.hash_k {
            let params = HashParams {
                k,
                b: args.hash_b,
                seed: args.hash_seed,
            };
            let hashed: Vec<_> = rows.iter().map(|r| fold(r, &vocab, &params)).collect();
            let c = correspondences(&hashed, dataset.labels());
            w.write_record([
                k.to_string(),
                args.hash_b.to_string(),
                args.hash_seed.to_string(),
                c.pair_count.to_string(),
                c.involved_molecules.to_string(),
                features_per_molecule(&hashed).to_string(),
            ])?;
        }
        w.flush()?;
    }
    if args.fingerprints {
        let dense = std::io::BufWriter::new(std::fs::File::create(args.output.join("fingerprints.csv"))?);
        write_dense_csv(dense, &dataset, &vocab, &rows)?;
        let mut sparse = std::io::BufWriter::new(std::fs::File::create(args.output.join("fingerprints.tsv"))?);
        write_sparse_tsv(&mut sparse, &dataset, &rows)?;
        sparse.flush()?;
    }
    eprintln!("analyzed {} fragments over {} molecules", vocab.len(), dataset.len());
    Ok(())
}
