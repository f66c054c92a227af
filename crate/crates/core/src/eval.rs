//! Scoring, experiment grids, walk-forward backtests and reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::corpus::{chronological_split, sliding_windows, LabeledCorpus, SplitBoundary, WindowConfig, WindowSplit};
use crate::error::{Error, Result};
use crate::models::{self, model_fingerprint, Dataset, ModelKind, TrainConfig};
use crate::preprocess::{preprocess_day, PreprocessConfig, Token};
use crate::util::{derive_seed_str, short_digest};
use crate::vectorize::{BaseVectorizer, FeatureSpec, FittedFeatures, SentimentLexicon, SgnsParams, VocabConfig};

/// Binary confusion counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn correct(&self) -> usize {
        self.tp + self.tn
    }

    fn add(&mut self, o: &Confusion) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
    }
}

fn check_pair(preds: &[u8], labels: &[u8]) -> Result<()> {
    if preds.is_empty() || labels.is_empty() {
        return Err(Error::InvalidInput("predictions and labels must be non-empty".into()));
    }
    if preds.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: preds.len(),
        });
    }
    Ok(())
}

pub fn confusion_matrix(preds: &[u8], labels: &[u8]) -> Result<Confusion> {
    check_pair(preds, labels)?;
    let mut c = Confusion::default();
    for (&p, &l) in preds.iter().zip(labels) {
        match (p != 0, l != 0) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

pub fn accuracy(preds: &[u8], labels: &[u8]) -> Result<f64> {
    let c = confusion_matrix(preds, labels)?;
    Ok(c.correct() as f64 / c.total() as f64)
}

/// Most frequent training label; ties go to 1.
pub fn majority_class(train_labels: &[u8]) -> Result<u8> {
    if train_labels.is_empty() {
        return Err(Error::InvalidInput("empty training labels".into()));
    }
    let ones = train_labels.iter().filter(|&&l| l != 0).count();
    Ok(u8::from(2 * ones >= train_labels.len()))
}

/// Test accuracy of always predicting the training majority class.
pub fn majority_baseline(train_labels: &[u8], test_labels: &[u8]) -> Result<f64> {
    let m = majority_class(train_labels)?;
    accuracy(&vec![m; test_labels.len()], test_labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub accuracy: f64,
    #[serde(flatten)]
    pub confusion: Confusion,
    pub n_test: usize,
    pub majority_baseline: f64,
}

impl EvalResult {
    pub fn from_confusion(confusion: Confusion, majority_baseline: f64) -> Self {
        let n = confusion.total();
        Self {
            accuracy: if n == 0 { 0.0 } else { confusion.correct() as f64 / n as f64 },
            confusion,
            n_test: n,
            majority_baseline,
        }
    }
}

/// Everything that defines an experiment except the data and the split.
#[derive(Debug, Clone)]
pub struct GridConfig {
    pub embeddings: Vec<FeatureSpec>,
    pub models: Vec<ModelKind>,
    pub preprocess: PreprocessConfig,
    pub vocab: VocabConfig,
    /// Its `seed` field is replaced by one derived from `seed` below.
    pub sgns: SgnsParams,
    pub train: TrainConfig,
    pub lexicon: Option<Arc<SentimentLexicon>>,
    pub seed: u64,
}

impl GridConfig {
    pub fn new(embeddings: Vec<FeatureSpec>, models: Vec<ModelKind>, seed: u64) -> Self {
        Self {
            embeddings,
            models,
            preprocess: PreprocessConfig::default(),
            vocab: VocabConfig::default(),
            sgns: SgnsParams::default(),
            train: TrainConfig::default(),
            lexicon: Some(Arc::new(SentimentLexicon::bundled())),
            seed,
        }
    }

    /// The five base vectorizers crossed with all eight models.
    pub fn full(seed: u64) -> Self {
        Self::new(
            BaseVectorizer::ALL.iter().map(|&b| FeatureSpec::new(b)).collect(),
            ModelKind::ALL.to_vec(),
            seed,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.embeddings.is_empty() || self.models.is_empty() {
            return Err(Error::InvalidParameter(
                "grid needs at least one embedding and one model".into(),
            ));
        }
        let mut names = BTreeSet::new();
        for e in &self.embeddings {
            if let Some(g) = e.ngram {
                g.validate()?;
            }
            if !names.insert(e.name()) {
                return Err(Error::InvalidParameter(format!("duplicate embedding {}", e.name())));
            }
        }
        let models: BTreeSet<_> = self.models.iter().collect();
        if models.len() != self.models.len() {
            return Err(Error::InvalidParameter("duplicate model in grid".into()));
        }
        self.sgns.validate()?;
        if let Some((path, msg)) = self.train.violations().into_iter().next() {
            return Err(Error::InvalidParameter(format!("{path} {msg}")));
        }
        Ok(())
    }

    fn sorted_embeddings(&self) -> Vec<FeatureSpec> {
        let mut e = self.embeddings.clone();
        e.sort_by_key(|s| s.name());
        e
    }

    fn sorted_models(&self) -> Vec<ModelKind> {
        let mut m = self.models.clone();
        m.sort();
        m
    }

    fn sgns_for(&self, spec: &FeatureSpec) -> SgnsParams {
        SgnsParams {
            seed: derive_seed_str(self.seed, &format!("sgns/{}", spec.name())),
            ..self.sgns.clone()
        }
    }

    fn preprocess_json(&self, full: bool) -> serde_json::Value {
        let sorted = |s: &std::collections::HashSet<String>| {
            let mut v: Vec<_> = s.iter().cloned().collect();
            v.sort();
            v
        };
        let p = &self.preprocess;
        if full {
            json!({
                "lowercase": p.lowercase,
                "remove_stopwords": p.remove_stopwords,
                "ner_mode": p.ner_mode,
                "stopwords": sorted(&p.stopwords),
                "gazetteer": sorted(&p.gazetteer),
            })
        } else {
            json!({
                "lowercase": p.lowercase,
                "remove_stopwords": p.remove_stopwords,
                "ner_mode": p.ner_mode,
                "stopwords": p.stopwords.len(),
                "gazetteer": p.gazetteer.len(),
            })
        }
    }

    /// Hyperparameters as echoed in reports.
    pub fn hyperparameters(&self) -> serde_json::Value {
        // the effective SGNS seed is derived per embedding from `seed`
        let mut sgns = json!(self.sgns);
        if let Some(m) = sgns.as_object_mut() {
            m.remove("seed");
        }
        json!({
            "preprocess": self.preprocess_json(false),
            "vocab": self.vocab,
            "sgns": sgns,
            "models": self.train,
            "lexicon_entries": self.lexicon.as_ref().map(|l| l.len()),
        })
    }

    /// Digest of the complete configuration of one grid cell under `split`.
    pub fn cell_digest(&self, spec: &FeatureSpec, model: ModelKind, split: &str) -> String {
        let v = json!({
            "split": split,
            "seed": self.seed,
            "embedding": spec,
            "model": model.as_str(),
            "preprocess": self.preprocess_json(true),
            "vocab": self.vocab,
            "sgns": self.sgns,
            "models": self.train,
            "lexicon": self.lexicon.as_ref().map(|l| l.fingerprint()),
        });
        short_digest(v.to_string().as_bytes())
    }
}

/// One grid cell's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub embedding: String,
    pub model: ModelKind,
    pub config_digest: String,
    pub outcome: std::result::Result<EvalResult, String>,
    /// Test-set predictions; empty when the cell failed.
    pub predictions: Vec<u8>,
    /// Digest of what was learned from the training split.
    pub trained_state: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub split: String,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub train_span: String,
    pub test_span: String,
    pub test_labels: Vec<u8>,
    pub baseline: EvalResult,
    pub rows: Vec<ReportRow>,
    pub hyperparameters: serde_json::Value,
    pub tfidf_note: Option<String>,
}

impl ExperimentReport {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.outcome.is_err())
    }

    pub fn row(&self, embedding: &str, model: ModelKind) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.embedding == embedding && r.model == model)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Headline trend report");
        let _ = writeln!(s, "split      {}", self.split);
        let _ = writeln!(s, "train      {} ({} days)", self.train_span, self.n_train);
        let _ = writeln!(s, "test       {} ({} days)", self.test_span, self.n_test);
        let _ = writeln!(s, "seed       {}", self.seed);
        if let Some(t) = &self.tfidf_note {
            let _ = writeln!(s, "tf-idf     {t}");
        }
        s.push('\n');
        let table: Vec<TableRow> = self
            .rows
            .iter()
            .map(|r| TableRow {
                embedding: r.embedding.clone(),
                algorithm: r.model.display_name().to_string(),
                outcome: r.outcome.clone(),
                digest: r.config_digest.clone(),
                extra: String::new(),
            })
            .chain(std::iter::once(TableRow::baseline(&self.baseline)))
            .collect();
        render_table(&mut s, &table, &[]);
        render_hyperparameters(&mut s, &self.hyperparameters);
        s
    }

    pub fn render_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        for r in &self.rows {
            csv_row(&mut s, &r.embedding, r.model.as_str(), &r.outcome, &r.config_digest);
        }
        csv_row(&mut s, "baseline", "majority", &Ok(self.baseline), "");
        s
    }
}

const CSV_HEADER: &str = "embedding,model,accuracy,tp,fp,tn,fn,n_test,baseline,config_digest\n";

fn csv_row(s: &mut String, emb: &str, model: &str, outcome: &std::result::Result<EvalResult, String>, digest: &str) {
    match outcome {
        Ok(e) => {
            let _ = writeln!(
                s,
                "{emb},{model},{:.6},{},{},{},{},{},{:.6},{digest}",
                e.accuracy, e.confusion.tp, e.confusion.fp, e.confusion.tn, e.confusion.fn_, e.n_test, e.majority_baseline
            );
        }
        Err(_) => {
            let _ = writeln!(s, "{emb},{model},ERROR,,,,,,,{digest}");
        }
    }
}

struct TableRow {
    embedding: String,
    algorithm: String,
    outcome: std::result::Result<EvalResult, String>,
    digest: String,
    extra: String,
}

impl TableRow {
    fn baseline(b: &EvalResult) -> Self {
        Self {
            embedding: "-".into(),
            algorithm: "Majority Baseline".into(),
            outcome: Ok(*b),
            digest: "-".into(),
            extra: String::new(),
        }
    }
}

fn render_table(s: &mut String, rows: &[TableRow], extra_header: &[String]) {
    let ew = rows.iter().map(|r| r.embedding.len()).max().unwrap_or(0).max("Embedding".len());
    let aw = rows.iter().map(|r| r.algorithm.len()).max().unwrap_or(0).max("Algorithm".len());
    let mut header = format!("{:<ew$}  {:<aw$}  {:>8}  {:>6}  {:<16}", "Embedding", "Algorithm", "Accuracy", "n", "Digest");
    for h in extra_header {
        let _ = write!(header, "  {h:>6}");
    }
    let _ = writeln!(s, "{}", header.trim_end());
    for r in rows {
        let line = match &r.outcome {
            Ok(e) => format!(
                "{:<ew$}  {:<aw$}  {:>8.4}  {:>6}  {:<16}{}",
                r.embedding, r.algorithm, e.accuracy, e.n_test, r.digest, r.extra
            ),
            Err(msg) => format!(
                "{:<ew$}  {:<aw$}  {:>8}  {:>6}  {:<16}  {msg}",
                r.embedding, r.algorithm, "ERROR", "-", r.digest
            ),
        };
        let _ = writeln!(s, "{}", line.trim_end());
    }
}

fn render_hyperparameters(s: &mut String, h: &serde_json::Value) {
    let _ = writeln!(s, "\nhyperparameters");
    if let Some(map) = h.as_object() {
        for (k, v) in map {
            let _ = writeln!(s, "  {k:<16} {v}");
        }
    }
}

fn tfidf_note(grid: &GridConfig) -> Option<String> {
    let bases: BTreeSet<_> = grid.embeddings.iter().map(|e| e.base).collect();
    let mut notes = Vec::new();
    if bases.contains(&BaseVectorizer::TfidfPaper) {
        notes.push("tfidf_paper = day count / training-corpus count, clamped to 1");
    }
    if bases.contains(&BaseVectorizer::TfidfStandard) {
        notes.push("tfidf_standard = tf * (ln((1+N)/(1+df)) + 1), L2-normalized");
    }
    (!notes.is_empty()).then(|| notes.join("; "))
}

fn span(c: &LabeledCorpus) -> String {
    match (c.first_date(), c.last_date()) {
        (Some(a), Some(b)) => format!("{a} .. {b}"),
        _ => "empty".into(),
    }
}

pub fn tokenize_corpus(corpus: &LabeledCorpus, cfg: &PreprocessConfig) -> Vec<Vec<Token>> {
    corpus
        .days()
        .par_iter()
        .map(|d| preprocess_day(&d.headlines, cfg))
        .collect()
}

struct Side<'a> {
    tokens: &'a [Vec<Token>],
    labels: &'a [u8],
}

/// Fits features and trains every cell on `train`, scores on `test`.
fn evaluate_tokens(train: Side<'_>, test: Side<'_>, grid: &GridConfig, split: &str) -> Result<(EvalResult, Vec<ReportRow>)> {
    let majority = majority_class(train.labels)?;
    let base_preds = vec![majority; test.labels.len()];
    let base_conf = confusion_matrix(&base_preds, test.labels)?;
    let baseline = EvalResult::from_confusion(base_conf, base_conf.correct() as f64 / base_conf.total() as f64);

    let embeddings = grid.sorted_embeddings();
    let models = grid.sorted_models();

    let fitted: Vec<std::result::Result<(FittedFeatures, Dataset, crate::matrix::FeatureMatrix), String>> = embeddings
        .par_iter()
        .map(|spec| {
            let f = FittedFeatures::fit(train.tokens, *spec, grid.vocab, &grid.sgns_for(spec), grid.lexicon.clone())?;
            let xtr = f.transform_all(train.tokens)?;
            let xte = f.transform_all(test.tokens)?;
            let ds = Dataset::new(xtr, train.labels.to_vec())?;
            Ok::<_, Error>((f, ds, xte))
        })
        .map(|r| r.map_err(|e| e.to_string()))
        .collect();

    let cells: Vec<(usize, ModelKind)> = (0..embeddings.len())
        .flat_map(|e| models.iter().map(move |&m| (e, m)))
        .collect();

    let rows = cells
        .par_iter()
        .map(|&(e, kind)| {
            let spec = &embeddings[e];
            let name = spec.name();
            let digest = grid.cell_digest(spec, kind, split);
            let mut row = ReportRow {
                embedding: name.clone(),
                model: kind,
                config_digest: digest,
                outcome: Err(String::new()),
                predictions: Vec::new(),
                trained_state: String::new(),
            };
            let (f, ds, xte) = match &fitted[e] {
                Ok(t) => t,
                Err(msg) => {
                    row.outcome = Err(msg.clone());
                    return row;
                }
            };
            let seed = derive_seed_str(grid.seed, &format!("model/{name}/{kind}"));
            let result = models::train(kind, ds, &grid.train, seed).and_then(|m| {
                let preds = m.predict(xte)?;
                let c = confusion_matrix(&preds, test.labels)?;
                Ok((m, preds, c))
            });
            match result {
                Ok((m, preds, c)) => {
                    row.outcome = Ok(EvalResult::from_confusion(c, baseline.accuracy));
                    row.predictions = preds;
                    row.trained_state = short_digest(format!("{}/{}", f.fingerprint(), model_fingerprint(&m)).as_bytes());
                }
                Err(err) => row.outcome = Err(err.to_string()),
            }
            row
        })
        .collect();
    Ok((baseline, rows))
}

/// Runs the grid on an explicit train/test pair.
pub fn evaluate_split(train: &LabeledCorpus, test: &LabeledCorpus, grid: &GridConfig, split: &str) -> Result<ExperimentReport> {
    grid.validate()?;
    let tr = tokenize_corpus(train, &grid.preprocess);
    let te = tokenize_corpus(test, &grid.preprocess);
    report_from_tokens(train, &tr, test, &te, grid, split)
}

fn report_from_tokens(
    train: &LabeledCorpus,
    train_tokens: &[Vec<Token>],
    test: &LabeledCorpus,
    test_tokens: &[Vec<Token>],
    grid: &GridConfig,
    split: &str,
) -> Result<ExperimentReport> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::Split("train and test sides must be non-empty".into()));
    }
    let (trl, tel) = (train.labels(), test.labels());
    let (baseline, rows) = evaluate_tokens(
        Side { tokens: train_tokens, labels: &trl },
        Side { tokens: test_tokens, labels: &tel },
        grid,
        split,
    )?;
    Ok(ExperimentReport {
        split: split.to_string(),
        seed: grid.seed,
        n_train: train.len(),
        n_test: test.len(),
        train_span: span(train),
        test_span: span(test),
        test_labels: tel,
        baseline,
        rows,
        hyperparameters: grid.hyperparameters(),
        tfidf_note: tfidf_note(grid),
    })
}

pub fn describe_boundary(boundary: SplitBoundary) -> String {
    match boundary {
        SplitBoundary::Date(d) => format!("chronological, train through {d}"),
        SplitBoundary::Fraction(f) => format!("chronological, first {f} of days for training"),
    }
}

/// Chronological split, then every (embedding, model) cell. Failing cells
/// become error rows; the grid continues.
pub fn run_experiment(corpus: &LabeledCorpus, grid: &GridConfig, boundary: SplitBoundary) -> Result<ExperimentReport> {
    let (train, test) = chronological_split(corpus, boundary)?;
    evaluate_split(&train, &test, grid, &describe_boundary(boundary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub index: usize,
    pub window: WindowSplit,
    /// Test span under two calendar months.
    pub short_test: bool,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub embedding: String,
    pub model: ModelKind,
    pub config_digest: String,
    /// Correct over total test days across all windows.
    pub pooled: std::result::Result<EvalResult, String>,
    pub per_window: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub seed: u64,
    pub window_config: WindowConfig,
    pub windows: Vec<WindowReport>,
    pub baseline: EvalResult,
    pub rows: Vec<AggregateRow>,
    pub hyperparameters: serde_json::Value,
    pub tfidf_note: Option<String>,
}

pub fn describe_windows(cfg: WindowConfig) -> String {
    format!(
        "walk-forward, train {} months, test {} months, step {} months",
        cfg.train_months, cfg.test_months, cfg.step_months
    )
}

/// Runs the grid on every sliding window and pools the results.
pub fn walk_forward_backtest(corpus: &LabeledCorpus, grid: &GridConfig, cfg: WindowConfig) -> Result<BacktestReport> {
    grid.validate()?;
    let windows = sliding_windows(corpus, cfg)?;
    let tokens = tokenize_corpus(corpus, &grid.preprocess);
    let description = describe_windows(cfg);

    let mut reports = Vec::with_capacity(windows.len());
    for (i, w) in windows.into_iter().enumerate() {
        let train = corpus.slice(w.train_days.clone());
        let test = corpus.slice(w.test_days.clone());
        let split = format!("{description}, window {}", i + 1);
        let report = report_from_tokens(
            &train,
            &tokens[w.train_days.clone()],
            &test,
            &tokens[w.test_days.clone()],
            grid,
            &split,
        )?;
        reports.push(WindowReport {
            index: i + 1,
            short_test: w.test_shorter_than(2),
            window: w,
            report,
        });
    }

    let mut base = Confusion::default();
    for w in &reports {
        base.add(&w.report.baseline.confusion);
    }
    let baseline = EvalResult::from_confusion(base, base.correct() as f64 / base.total() as f64);

    let first = &reports[0].report;
    let rows = first
        .rows
        .iter()
        .enumerate()
        .map(|(k, r0)| {
            let spec = grid
                .embeddings
                .iter()
                .find(|e| e.name() == r0.embedding)
                .expect("row embedding comes from the grid");
            let mut pooled = Ok(Confusion::default());
            let mut per_window = Vec::with_capacity(reports.len());
            for w in &reports {
                let r = &w.report.rows[k];
                match (&r.outcome, &mut pooled) {
                    (Ok(e), Ok(c)) => {
                        c.add(&e.confusion);
                        per_window.push(Some(e.accuracy));
                    }
                    (Ok(e), Err(_)) => per_window.push(Some(e.accuracy)),
                    (Err(msg), p) => {
                        if p.is_ok() {
                            *p = Err(format!("window {}: {msg}", w.index));
                        }
                        per_window.push(None);
                    }
                }
            }
            AggregateRow {
                embedding: r0.embedding.clone(),
                model: r0.model,
                config_digest: grid.cell_digest(spec, r0.model, &description),
                pooled: pooled.map(|c| EvalResult::from_confusion(c, baseline.accuracy)),
                per_window,
            }
        })
        .collect();

    Ok(BacktestReport {
        seed: grid.seed,
        window_config: cfg,
        windows: reports,
        baseline,
        rows,
        hyperparameters: grid.hyperparameters(),
        tfidf_note: tfidf_note(grid),
    })
}

impl BacktestReport {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.pooled.is_err())
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Headline trend backtest");
        let _ = writeln!(s, "split      {}", describe_windows(self.window_config));
        let _ = writeln!(s, "seed       {}", self.seed);
        if let Some(t) = &self.tfidf_note {
            let _ = writeln!(s, "tf-idf     {t}");
        }
        let _ = writeln!(s, "aggregate  pooled: correct / total test days over all windows");
        s.push('\n');
        let _ = writeln!(s, "Window  Train                     Test                      Train  Test");
        for w in &self.windows {
            let ws = &w.window;
            let flag = if w.short_test { "  short test span (< 2 months)" } else { "" };
            let _ = writeln!(
                s,
                "W{:<5}  {} .. {}  {} .. {}  {:>5}  {:>4}{flag}",
                w.index,
                ws.train_start,
                ws.train_end,
                ws.test_start,
                ws.test_end,
                ws.train_days.len(),
                ws.test_days.len()
            );
        }
        s.push('\n');
        let headers: Vec<String> = self.windows.iter().map(|w| format!("W{}", w.index)).collect();
        let per = |v: &[Option<f64>]| {
            v.iter().fold(String::new(), |mut acc, a| {
                match a {
                    Some(a) => {
                        let _ = write!(acc, "  {a:>6.4}");
                    }
                    None => acc.push_str("   ERROR"),
                }
                acc
            })
        };
        let base_per: Vec<Option<f64>> = self.windows.iter().map(|w| Some(w.report.baseline.accuracy)).collect();
        let table: Vec<TableRow> = self
            .rows
            .iter()
            .map(|r| TableRow {
                embedding: r.embedding.clone(),
                algorithm: r.model.display_name().to_string(),
                outcome: r.pooled.clone(),
                digest: r.config_digest.clone(),
                extra: per(&r.per_window),
            })
            .chain(std::iter::once(TableRow {
                extra: per(&base_per),
                ..TableRow::baseline(&self.baseline)
            }))
            .collect();
        render_table(&mut s, &table, &headers);
        render_hyperparameters(&mut s, &self.hyperparameters);
        s
    }

    pub fn render_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        for r in &self.rows {
            csv_row(&mut s, &r.embedding, r.model.as_str(), &r.pooled, &r.config_digest);
        }
        csv_row(&mut s, "baseline", "majority", &Ok(self.baseline), "");
        s
    }
}
