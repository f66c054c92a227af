//! Command-line front end: `validate`, `run` and `inspect` over a JSON run
//! configuration.
//!
//! Relative paths in a config resolve against the config file's directory.
//! Exit codes: 0 success, 1 configuration error, 2 runtime or pipeline error.

use std::collections::HashSet;
use std::fmt;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    derive_labels, join_headlines_labels, load_headline_csv, load_price_csv, sliding_windows, split_point,
    LabeledCorpus, PriceColumn, SplitBoundary, WindowConfig,
};
use crate::eval::{describe_boundary, run_experiment, walk_forward_backtest, GridConfig};
use crate::models::ModelKind;
use crate::preprocess::{default_stopwords, preprocess_day, NerMode, PreprocessConfig};
use crate::util::{read_word_list, write_atomic};
use crate::vectorize::{
    assemble_features, BaseVectorizer, FeatureSpec, FittedFeatures, SentimentLexicon, SgnsParams, VocabConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Headline CSV: `Date`, optional `Label`, `Top1`..`Top25`.
    pub headlines: PathBuf,
    /// Price CSV; when given, labels are derived from it and joined on date.
    #[serde(default)]
    pub prices: Option<PathBuf>,
    #[serde(default = "default_price_column")]
    pub price_column: PriceColumn,
    /// Replaces the bundled stop-word list.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default)]
    pub gazetteer: Option<PathBuf>,
    /// Replaces the bundled sentiment lexicon.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
}

fn default_price_column() -> PriceColumn {
    PriceColumn::AdjClose
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSettings {
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub ner_mode: NerMode,
}

impl Default for PreprocessSettings {
    fn default() -> Self {
        Self {
            lowercase: true,
            remove_stopwords: true,
            ner_mode: NerMode::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitConfig {
    /// Exactly one of `train_end` (inclusive) or `train_fraction`.
    Chronological {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        train_end: Option<NaiveDate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        train_fraction: Option<f64>,
    },
    WalkForward {
        #[serde(default = "nine")]
        train_months: u32,
        #[serde(default = "three")]
        test_months: u32,
        #[serde(default = "three")]
        step_months: u32,
    },
}

fn nine() -> u32 {
    9
}

fn three() -> u32 {
    3
}

pub const DEFAULT_TRAIN_END: &str = "2014-12-31";

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig::Chronological {
            train_end: NaiveDate::parse_from_str(DEFAULT_TRAIN_END, "%Y-%m-%d").ok(),
            train_fraction: None,
        }
    }
}

impl SplitConfig {
    fn boundary(&self) -> Option<SplitBoundary> {
        match *self {
            SplitConfig::Chronological { train_end: Some(d), .. } => Some(SplitBoundary::Date(d)),
            SplitConfig::Chronological {
                train_fraction: Some(f), ..
            } => Some(SplitBoundary::Fraction(f)),
            _ => None,
        }
    }

    fn windows(&self) -> Option<WindowConfig> {
        match *self {
            SplitConfig::WalkForward {
                train_months,
                test_months,
                step_months,
            } => Some(WindowConfig {
                train_months,
                test_months,
                step_months,
            }),
            _ => None,
        }
    }
}

fn default_embeddings() -> Vec<FeatureSpec> {
    BaseVectorizer::ALL.iter().map(|&b| FeatureSpec::new(b)).collect()
}

fn default_models() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub preprocess: PreprocessSettings,
    #[serde(default)]
    pub vocabulary: VocabConfig,
    #[serde(default = "default_embeddings")]
    pub embeddings: Vec<FeatureSpec>,
    #[serde(default)]
    pub sgns: SgnsParams,
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    #[serde(default)]
    pub hyperparameters: crate::models::TrainConfig,
    #[serde(default)]
    pub split: SplitConfig,
    /// Master seed; mandatory.
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

/// One config problem with the JSON path it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(Vec<Violation>),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "config error: {x}")?;
                }
                Ok(())
            }
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("writing output: {e}"))
}

/// Joins onto `base` and folds `.` and `..` lexically.
fn resolve(base: &Path, p: &Path) -> PathBuf {
    use std::path::Component;
    let mut out = PathBuf::new();
    for c in base.join(p).components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    out
}

fn semantic_checks(c: &RunConfig) -> Vec<Violation> {
    let mut v = Vec::new();
    if c.embeddings.is_empty() {
        v.push(Violation::new("embeddings", "must list at least one embedding"));
    }
    let mut names = HashSet::new();
    for (i, e) in c.embeddings.iter().enumerate() {
        if let Some(g) = e.ngram {
            if let Err(err) = g.validate() {
                v.push(Violation::new(format!("embeddings[{i}].ngram.n"), err.to_string()));
            }
        }
        if !names.insert(e.name()) {
            v.push(Violation::new(format!("embeddings[{i}]"), format!("duplicate embedding {}", e.name())));
        }
    }
    if c.models.is_empty() {
        v.push(Violation::new("models", "must list at least one model"));
    }
    let mut seen = HashSet::new();
    for (i, m) in c.models.iter().enumerate() {
        if !seen.insert(*m) {
            v.push(Violation::new(format!("models[{i}]"), format!("duplicate model {m}")));
        }
    }
    if c.vocabulary.min_df == 0 {
        v.push(Violation::new("vocabulary.min_df", "must be >= 1"));
    }
    if c.vocabulary.max_size == Some(0) {
        v.push(Violation::new("vocabulary.max_size", "must be >= 1 or null"));
    }
    if let Err(e) = c.sgns.validate() {
        v.push(Violation::new("sgns", e.to_string()));
    }
    for (path, msg) in c.hyperparameters.violations() {
        v.push(Violation::new(format!("hyperparameters.{path}"), msg));
    }
    match &c.split {
        SplitConfig::Chronological {
            train_end,
            train_fraction,
        } => {
            if train_end.is_some() && train_fraction.is_some() {
                v.push(Violation::new("split", "give train_end or train_fraction, not both"));
            }
            if let Some(f) = train_fraction {
                if !(*f > 0.0 && *f < 1.0) {
                    v.push(Violation::new("split.train_fraction", "must lie in (0, 1)"));
                }
            }
        }
        SplitConfig::WalkForward {
            train_months,
            test_months,
            step_months,
        } => {
            for (name, m) in [("train_months", train_months), ("test_months", test_months), ("step_months", step_months)] {
                if *m == 0 {
                    v.push(Violation::new(format!("split.{name}"), "must be >= 1"));
                }
            }
        }
    }
    v
}

/// Parses, checks and path-resolves a config. All violations found are
/// returned together.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![Violation::new(path.display().to_string(), format!("cannot read: {e}"))]))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(vec![Violation::new("<document>", format!("invalid JSON: {e}"))]))?;
    let Some(obj) = value.as_object() else {
        return Err(CliError::Config(vec![Violation::new("<document>", "must be a JSON object")]));
    };
    if !obj.contains_key("seed") {
        return Err(CliError::Config(vec![Violation::new(
            "seed",
            "required: set an integer master seed (there is no default)",
        )]));
    }
    let mut cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let p = e.path().to_string();
        let p = if p == "." { "<document>".to_string() } else { p };
        CliError::Config(vec![Violation::new(p, e.into_inner().to_string())])
    })?;

    let mut violations = semantic_checks(&cfg);
    let base = path
        .parent()
        .map(|p| if p.as_os_str().is_empty() { Path::new(".") } else { p })
        .unwrap_or(Path::new("."));
    let base = std::fs::canonicalize(base).unwrap_or_else(|_| base.to_path_buf());
    let d = &mut cfg.data;
    d.headlines = resolve(&base, &d.headlines);
    let mut files: Vec<(&str, &PathBuf)> = vec![("data.headlines", &d.headlines)];
    for (name, p) in [
        ("data.prices", &mut d.prices),
        ("data.stopwords", &mut d.stopwords),
        ("data.gazetteer", &mut d.gazetteer),
        ("data.lexicon", &mut d.lexicon),
    ] {
        if let Some(p) = p.as_mut() {
            *p = resolve(&base, p);
        }
        if let Some(p) = p.as_ref() {
            files.push((name, p));
        }
    }
    for (name, p) in files {
        if !p.is_file() {
            violations.push(Violation::new(name, format!("file not found: {}", p.display())));
        }
    }
    cfg.output_dir = resolve(&base, &cfg.output_dir);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(violations))
    }
}

/// Builds the experiment grid, reading any word lists and lexicon.
pub fn grid_from_config(cfg: &RunConfig) -> Result<GridConfig, CliError> {
    let stopwords: HashSet<String> = match &cfg.data.stopwords {
        Some(p) => read_word_list(p)?.into_iter().collect(),
        None => default_stopwords(),
    };
    let gazetteer: HashSet<String> = match &cfg.data.gazetteer {
        Some(p) => read_word_list(p)?.into_iter().collect(),
        None => HashSet::new(),
    };
    let lexicon = match &cfg.data.lexicon {
        Some(p) => SentimentLexicon::load(p)?,
        None => SentimentLexicon::bundled(),
    };
    let mut grid = GridConfig::new(cfg.embeddings.clone(), cfg.models.clone(), cfg.seed);
    grid.preprocess = PreprocessConfig {
        lowercase: cfg.preprocess.lowercase,
        remove_stopwords: cfg.preprocess.remove_stopwords,
        stopwords,
        ner_mode: cfg.preprocess.ner_mode,
        gazetteer,
    };
    grid.vocab = cfg.vocabulary;
    grid.sgns = cfg.sgns.clone();
    grid.train = cfg.hyperparameters.clone();
    grid.lexicon = Some(Arc::new(lexicon));
    Ok(grid)
}

/// Reads headlines and, if configured, joins them with price-derived labels.
pub fn load_corpus(cfg: &RunConfig, log: &mut dyn Write) -> Result<LabeledCorpus, CliError> {
    let records = load_headline_csv(&cfg.data.headlines)?;
    match &cfg.data.prices {
        Some(p) => {
            let prices = load_price_csv(p, cfg.data.price_column)?;
            let labels = derive_labels(&prices)?;
            let (corpus, stats) = join_headlines_labels(records, &labels)?;
            if stats.dropped_records > 0 || stats.label_mismatches > 0 {
                let _ = writeln!(
                    log,
                    "note: {} headline days without a price label were dropped; {} CSV labels disagreed with prices (CSV kept)",
                    stats.dropped_records, stats.label_mismatches
                );
            }
            Ok(corpus)
        }
        None => Ok(LabeledCorpus::from_labeled_records(records)?),
    }
}

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn bold(s: &str, color: bool) -> String {
    if color {
        format!("\x1b[1m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

pub fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    load_config(path)?;
    writeln!(out, "OK").map_err(io_err)
}

fn write_error_report(dir: &Path, msg: &str) {
    let _ = write_atomic(&dir.join("report.txt"), format!("Headline trend report\nERROR  {msg}\n").as_bytes());
    let _ = write_atomic(
        &dir.join("report.csv"),
        "embedding,model,accuracy,tp,fp,tn,fn,n_test,baseline,config_digest\n-,-,ERROR,,,,,,,\n".as_bytes(),
    );
}

/// Runs the configured experiment and writes `report.txt`, `report.csv`
/// and `resolved-config.json` into the output directory. A walk-forward
/// split also writes one `window-NN` subdirectory per window.
pub fn cmd_run(path: &Path, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    let dir = cfg.output_dir.clone();
    let resolved = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Runtime(e.to_string()))? + "\n";
    write_atomic(&dir.join("resolved-config.json"), resolved.as_bytes())?;

    let result = (|| {
        let grid = grid_from_config(&cfg)?;
        let corpus = load_corpus(&cfg, log)?;
        if let Some(b) = cfg.split.boundary() {
            let r = run_experiment(&corpus, &grid, b)?;
            write_atomic(&dir.join("report.txt"), r.render_text().as_bytes())?;
            write_atomic(&dir.join("report.csv"), r.render_csv().as_bytes())?;
            Ok::<_, CliError>((r.render_text(), r.has_errors()))
        } else {
            let w = cfg.split.windows().expect("split is chronological or walk-forward");
            let r = walk_forward_backtest(&corpus, &grid, w)?;
            for win in &r.windows {
                let sub = dir.join(format!("window-{:02}", win.index));
                write_atomic(&sub.join("report.txt"), win.report.render_text().as_bytes())?;
                write_atomic(&sub.join("report.csv"), win.report.render_csv().as_bytes())?;
            }
            write_atomic(&dir.join("report.txt"), r.render_text().as_bytes())?;
            write_atomic(&dir.join("report.csv"), r.render_csv().as_bytes())?;
            Ok((r.render_text(), r.has_errors()))
        }
    })();

    match result {
        Ok((text, has_errors)) => {
            let color = color_enabled();
            for line in text.lines() {
                let l = if line.starts_with("Embedding") || line.starts_with("Headline trend") {
                    bold(line, color)
                } else {
                    line.to_string()
                };
                writeln!(out, "{l}").map_err(io_err)?;
            }
            writeln!(out, "\nreports written to {}", dir.display()).map_err(io_err)?;
            if has_errors {
                return Err(CliError::Runtime("one or more grid cells failed; see ERROR rows in the report".into()));
            }
            Ok(())
        }
        Err(e) => {
            if let CliError::Runtime(m) = &e {
                write_error_report(&dir, m);
            }
            Err(e)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InspectTarget {
    Vocab,
    Windows,
    Features,
}

/// Train side used by `inspect vocab` / `inspect features`: the chronological
/// training split, or the first walk-forward window.
fn inspection_split(cfg: &RunConfig, corpus: &LabeledCorpus) -> Result<(LabeledCorpus, LabeledCorpus, String), CliError> {
    if let Some(b) = cfg.split.boundary() {
        let cut = split_point(corpus, b)?;
        Ok((corpus.slice(0..cut), corpus.slice(cut..corpus.len()), describe_boundary(b)))
    } else {
        let w = cfg.split.windows().expect("walk-forward");
        let first = sliding_windows(corpus, w)?.remove(0);
        Ok((
            corpus.slice(first.train_days.clone()),
            corpus.slice(first.test_days.clone()),
            "walk-forward window 1".to_string(),
        ))
    }
}

pub fn cmd_inspect(
    path: &Path,
    target: InspectTarget,
    date: Option<NaiveDate>,
    top: usize,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    let corpus = load_corpus(&cfg, log)?;
    match target {
        InspectTarget::Windows => {
            let w = cfg.split.windows().unwrap_or_default();
            let windows = sliding_windows(&corpus, w)?;
            writeln!(out, "window  train_start  train_end   test_start  test_end    train_days  test_days").map_err(io_err)?;
            for (i, s) in windows.iter().enumerate() {
                let flag = if s.test_shorter_than(2) { "  short" } else { "" };
                writeln!(
                    out,
                    "{:<6}  {}   {}  {}  {}  {:>10}  {:>9}{flag}",
                    i + 1,
                    s.train_start,
                    s.train_end,
                    s.test_start,
                    s.test_end,
                    s.train_days.len(),
                    s.test_days.len()
                )
                .map_err(io_err)?;
            }
            Ok(())
        }
        InspectTarget::Vocab | InspectTarget::Features => {
            let grid = grid_from_config(&cfg)?;
            let (train, test, label) = inspection_split(&cfg, &corpus)?;
            let spec = cfg.embeddings[0];
            let tokens = crate::eval::tokenize_corpus(&train, &grid.preprocess);
            let sgns = SgnsParams {
                seed: crate::util::derive_seed_str(grid.seed, &format!("sgns/{}", spec.name())),
                ..grid.sgns.clone()
            };
            let fitted = FittedFeatures::fit(&tokens, spec, grid.vocab, &sgns, grid.lexicon.clone())?;
            let vocab = fitted.vocabulary();
            if target == InspectTarget::Vocab {
                writeln!(
                    out,
                    "vocabulary of {} fitted on {label} ({} days): {} terms",
                    spec.name(),
                    train.len(),
                    vocab.len()
                )
                .map_err(io_err)?;
                writeln!(out, "{:>5}  {:<24}  {:>8}  {:>8}", "rank", "term", "count", "days").map_err(io_err)?;
                for (i, t) in vocab.terms().iter().enumerate().take(top) {
                    writeln!(out, "{:>5}  {:<24}  {:>8}  {:>8}", i + 1, t, vocab.corpus_count(i), vocab.doc_freq(i))
                        .map_err(io_err)?;
                }
                return Ok(());
            }
            let day = match date {
                Some(d) => corpus
                    .days()
                    .iter()
                    .find(|x| x.date == d)
                    .ok_or_else(|| CliError::Runtime(format!("no corpus day on {d}")))?,
                None => test
                    .days()
                    .first()
                    .ok_or_else(|| CliError::Runtime("empty test side".into()))?,
            };
            let day_tokens = preprocess_day(&day.headlines, &grid.preprocess);
            let v = assemble_features(&day_tokens, &fitted)?;
            let grams: Vec<String> = match spec.ngram {
                Some(g) => crate::vectorize::extract_ngrams(&day_tokens, g),
                None => day_tokens.iter().map(|t| t.as_str().to_string()).collect(),
            };
            let in_vocab = grams.iter().filter(|g| vocab.get(g).is_some()).count();
            let distinct: HashSet<&String> = grams.iter().filter(|g| vocab.get(g).is_some()).collect();
            let nonzero = v.iter().filter(|x| **x != 0.0).count();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sum: f64 = v.iter().sum();
            let lines = [
                format!("date                 {}", day.date),
                format!("label                {}", day.label),
                format!("embedding            {}", spec.name()),
                format!("fitted on            {label} ({} days)", train.len()),
                format!("dimension            {}", v.len()),
                format!("nonzeros             {nonzero}"),
                format!("sum                  {sum}"),
                format!("l2 norm              {norm:.6}"),
                format!("tokens               {}", grams.len()),
                format!("in-vocabulary tokens {in_vocab}"),
                format!("distinct in-vocab    {}", distinct.len()),
            ];
            for l in lines {
                writeln!(out, "{l}").map_err(io_err)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "headline-trend", version, about = "Predict the index's daily trend from news headlines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a run configuration and report every problem found.
    Validate { config: PathBuf },
    /// Run the configured experiment and write reports.
    Run { config: PathBuf },
    /// Show the vocabulary, walk-forward windows, or one day's features.
    Inspect {
        config: PathBuf,
        target: InspectTarget,
        /// Day for `features` (default: first test day).
        #[arg(long)]
        date: Option<NaiveDate>,
        /// Terms listed by `vocab`.
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate { config } => cmd_validate(config, out),
        Command::Run { config } => cmd_run(config, out, err),
        Command::Inspect {
            config,
            target,
            date,
            top,
        } => cmd_inspect(config, *target, *date, *top, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
