//! Headline and price ingestion, trend labels, and time-ordered splits.
//!
//! Everything here preserves chronological order. Nothing is ever shuffled.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::ops::Range;
use std::path::Path;

use chrono::{Days, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::strip_bytestring_artifacts;

/// Number of headlines kept per market day.
pub const HEADLINES_PER_DAY: usize = 25;

const DATE_FORMAT: &str = "%Y-%m-%d";

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    // chrono accepts non-padded fields; the format is fixed-width
    if s.len() != 10 {
        return None;
    }
    NaiveDate::parse_from_str(s, DATE_FORMAT).ok()
}

/// One day of raw headlines with an optional pre-assigned label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadlineRecord {
    pub date: NaiveDate,
    pub headlines: Vec<String>,
    pub label: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
}

/// A labeled market day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDay {
    pub date: NaiveDate,
    pub headlines: Vec<String>,
    pub label: u8,
}

/// Chronologically ordered labeled days. Dates are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledCorpus {
    days: Vec<LabeledDay>,
}

impl LabeledCorpus {
    pub fn new(days: Vec<LabeledDay>) -> Result<Self> {
        for w in days.windows(2) {
            if w[1].date <= w[0].date {
                return Err(Error::InvalidInput(format!(
                    "corpus dates must be strictly increasing ({} then {})",
                    w[0].date, w[1].date
                )));
            }
        }
        if let Some(d) = days.iter().find(|d| d.label > 1) {
            return Err(Error::InvalidInput(format!(
                "label {} on {} is not binary",
                d.label, d.date
            )));
        }
        Ok(Self { days })
    }

    /// Builds a corpus from records that carry their own labels; unlabeled
    /// records are skipped.
    pub fn from_labeled_records(records: Vec<HeadlineRecord>) -> Result<Self> {
        let days: Vec<_> = records
            .into_iter()
            .filter_map(|r| {
                r.label.map(|label| LabeledDay {
                    date: r.date,
                    headlines: r.headlines,
                    label,
                })
            })
            .collect();
        if days.is_empty() {
            return Err(Error::EmptyJoin);
        }
        Self::new(days)
    }

    pub fn days(&self) -> &[LabeledDay] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.days.first().map(|d| d.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.days.last().map(|d| d.date)
    }

    pub fn labels(&self) -> Vec<u8> {
        self.days.iter().map(|d| d.label).collect()
    }

    pub fn slice(&self, range: Range<usize>) -> LabeledCorpus {
        LabeledCorpus {
            days: self.days[range].to_vec(),
        }
    }
}

fn read_source(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(r)
}

pub fn load_headline_csv(path: &Path) -> Result<Vec<HeadlineRecord>> {
    parse_headline_csv(read_source(path)?.as_slice())
}

/// Parses `Date[,Label],Top1..Top25`. Rows are returned sorted by date.
///
/// Short rows are padded with empty headlines; a header that names fewer or
/// more than 25 `Top` columns is rejected.
pub fn parse_headline_csv<R: Read>(reader: R) -> Result<Vec<HeadlineRecord>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);

    let date_col = col("Date").ok_or_else(|| Error::Header("missing Date column".into()))?;
    let label_col = col("Label");
    let mut top_cols = Vec::with_capacity(HEADLINES_PER_DAY);
    for i in 1..=HEADLINES_PER_DAY {
        match col(&format!("Top{i}")) {
            Some(c) => top_cols.push(c),
            None => {
                return Err(Error::Header(format!(
                    "expected {HEADLINES_PER_DAY} headline columns Top1..Top{HEADLINES_PER_DAY}, missing Top{i}"
                )))
            }
        }
    }
    let extra = header
        .iter()
        .filter(|h| {
            h.trim()
                .strip_prefix("Top")
                .and_then(|n| n.parse::<usize>().ok())
                .is_some_and(|n| n > HEADLINES_PER_DAY)
        })
        .count();
    if extra > 0 {
        return Err(Error::Header(format!(
            "more than {HEADLINES_PER_DAY} headline columns"
        )));
    }

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // header is line 1
        let row = i + 2;
        let row_err = |message: String| Error::Row {
            context: "headline csv",
            row,
            message,
        };
        if rec.len() > header.len() {
            return Err(row_err(format!(
                "{} fields but header has {}",
                rec.len(),
                header.len()
            )));
        }
        let raw_date = rec.get(date_col).unwrap_or("");
        let date = parse_date(raw_date)
            .ok_or_else(|| row_err(format!("malformed date {raw_date:?}")))?;
        if !seen.insert(date) {
            return Err(Error::DuplicateDate(date));
        }
        let label = match label_col.and_then(|c| rec.get(c)).map(str::trim) {
            None | Some("") => None,
            Some("0") => Some(0),
            Some("1") => Some(1),
            Some(other) => return Err(row_err(format!("label {other:?} is not 0 or 1"))),
        };
        let headlines = top_cols
            .iter()
            .map(|&c| strip_bytestring_artifacts(rec.get(c).unwrap_or("")))
            .collect();
        out.push(HeadlineRecord {
            date,
            headlines,
            label,
        });
    }
    out.sort_by_key(|r| r.date);
    Ok(out)
}

/// Serializes a corpus in the headline CSV layout (`Date,Label,Top1..Top25`).
pub fn headline_csv_string(corpus: &LabeledCorpus) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["Date".to_string(), "Label".to_string()];
    header.extend((1..=HEADLINES_PER_DAY).map(|i| format!("Top{i}")));
    w.write_record(&header)?;
    for d in corpus.days() {
        let mut row = vec![d.date.to_string(), d.label.to_string()];
        row.extend(d.headlines.iter().cloned());
        row.resize(HEADLINES_PER_DAY + 2, String::new());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Which price column drives the labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceColumn {
    #[default]
    Close,
    AdjClose,
}

pub fn load_price_csv(path: &Path, column: PriceColumn) -> Result<Vec<PricePoint>> {
    parse_price_csv(read_source(path)?.as_slice(), column)
}

pub fn parse_price_csv<R: Read>(reader: R, column: PriceColumn) -> Result<Vec<PricePoint>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let date_col = col("Date").ok_or_else(|| Error::Header("missing Date column".into()))?;
    let (name, value_col) = match column {
        PriceColumn::Close => ("Close", col("Close")),
        PriceColumn::AdjClose => ("Adj Close", col("Adj Close")),
    };
    let value_col = value_col.ok_or_else(|| Error::Header(format!("missing {name} column")))?;

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let row_err = |message: String| Error::Row {
            context: "price csv",
            row,
            message,
        };
        let raw_date = rec.get(date_col).unwrap_or("");
        let date = parse_date(raw_date)
            .ok_or_else(|| row_err(format!("malformed date {raw_date:?}")))?;
        let raw = rec.get(value_col).unwrap_or("").trim();
        let close: f64 = raw
            .parse()
            .map_err(|_| row_err(format!("unparseable {name} {raw:?}")))?;
        if !close.is_finite() || close <= 0.0 {
            return Err(row_err(format!("{name} must be positive, got {raw}")));
        }
        out.push(PricePoint { date, close });
    }
    out.sort_by_key(|p| p.date);
    for w in out.windows(2) {
        if w[0].date == w[1].date {
            return Err(Error::DuplicateDate(w[0].date));
        }
    }
    Ok(out)
}

/// Up/down label per day: 1 when the close is at or above the previous
/// close. The first day has no predecessor and gets no label.
pub fn derive_labels(prices: &[PricePoint]) -> Result<BTreeMap<NaiveDate, u8>> {
    if prices.len() < 2 {
        return Err(Error::InsufficientHistory(prices.len()));
    }
    let mut labels = BTreeMap::new();
    for w in prices.windows(2) {
        if w[1].date <= w[0].date {
            return Err(Error::UnsortedPrices(w[1].date));
        }
        labels.insert(w[1].date, u8::from(w[1].close >= w[0].close));
    }
    Ok(labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JoinStats {
    /// Days whose CSV label disagreed with the price-derived label.
    pub label_mismatches: usize,
    pub dropped_records: usize,
}

/// Inner join on date. A label already present on the record takes
/// precedence over the derived one; disagreements are counted.
pub fn join_headlines_labels(
    records: Vec<HeadlineRecord>,
    labels: &BTreeMap<NaiveDate, u8>,
) -> Result<(LabeledCorpus, JoinStats)> {
    let mut stats = JoinStats::default();
    let mut days = Vec::new();
    for r in records {
        let Some(&derived) = labels.get(&r.date) else {
            stats.dropped_records += 1;
            continue;
        };
        let label = match r.label {
            Some(csv) => {
                if csv != derived {
                    stats.label_mismatches += 1;
                }
                csv
            }
            None => derived,
        };
        days.push(LabeledDay {
            date: r.date,
            headlines: r.headlines,
            label,
        });
    }
    if days.is_empty() {
        return Err(Error::EmptyJoin);
    }
    days.sort_by_key(|d| d.date);
    Ok((LabeledCorpus::new(days)?, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitBoundary {
    /// Last training date, inclusive.
    Date(NaiveDate),
    /// Fraction of days (floored) that go to training.
    Fraction(f64),
}

/// Index where the test side starts.
pub fn split_point(corpus: &LabeledCorpus, boundary: SplitBoundary) -> Result<usize> {
    let n = corpus.len();
    if n == 0 {
        return Err(Error::Split("empty corpus".into()));
    }
    let cut = match boundary {
        SplitBoundary::Date(d) => {
            let first = corpus.first_date().unwrap_or(d);
            let last = corpus.last_date().unwrap_or(d);
            if d < first || d >= last {
                return Err(Error::Split(format!(
                    "boundary {d} outside corpus range {first}..{last}"
                )));
            }
            corpus.days().partition_point(|day| day.date <= d)
        }
        SplitBoundary::Fraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Split(format!("fraction {f} not in (0, 1)")));
            }
            (f * n as f64).floor() as usize
        }
    };
    if cut == 0 || cut == n {
        return Err(Error::Split(format!(
            "split leaves an empty side ({cut} train / {} test)",
            n - cut
        )));
    }
    Ok(cut)
}

pub fn chronological_split(
    corpus: &LabeledCorpus,
    boundary: SplitBoundary,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    let cut = split_point(corpus, boundary)?;
    Ok((corpus.slice(0..cut), corpus.slice(cut..corpus.len())))
}

/// One train/test pair of the walk-forward schedule. Date bounds are
/// inclusive; index ranges point into the source corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSplit {
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub test_start: NaiveDate,
    pub test_end: NaiveDate,
    pub train_days: Range<usize>,
    pub test_days: Range<usize>,
}

impl WindowSplit {
    /// True when the test period covers less than `months` calendar months.
    pub fn test_shorter_than(&self, months: u32) -> bool {
        match self.test_start.checked_add_months(Months::new(months)) {
            Some(full) => self.test_end.succ_opt().is_some_and(|next| next < full),
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub train_months: u32,
    pub test_months: u32,
    pub step_months: u32,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            train_months: 9,
            test_months: 3,
            step_months: 3,
        }
    }
}

fn add_months(d: NaiveDate, m: u32) -> Result<NaiveDate> {
    d.checked_add_months(Months::new(m))
        .ok_or_else(|| Error::Split(format!("date overflow adding {m} months to {d}")))
}

fn day_before(d: NaiveDate) -> Result<NaiveDate> {
    d.checked_sub_days(Days::new(1))
        .ok_or_else(|| Error::Split(format!("date underflow before {d}")))
}

/// Rolling calendar-month windows anchored at the first corpus date.
///
/// Window `i` trains on `[start + i*step, start + i*step + train)` and tests
/// on the following `test` months, truncated at the corpus end. Windows with
/// no test days (or no train days) are dropped.
pub fn sliding_windows(corpus: &LabeledCorpus, cfg: WindowConfig) -> Result<Vec<WindowSplit>> {
    if cfg.train_months == 0 || cfg.test_months == 0 || cfg.step_months == 0 {
        return Err(Error::InvalidParameter(
            "window months must all be positive".into(),
        ));
    }
    let (Some(first), Some(last)) = (corpus.first_date(), corpus.last_date()) else {
        return Err(Error::NoWindows("empty corpus".into()));
    };
    if add_months(first, cfg.train_months)? > last {
        return Err(Error::NoWindows(format!(
            "corpus {first}..{last} is shorter than one {}-month training period",
            cfg.train_months
        )));
    }

    let days = corpus.days();
    let index_of = |d: NaiveDate| days.partition_point(|x| x.date < d);
    let mut out = Vec::new();
    for i in 0u32.. {
        let train_start = add_months(first, i * cfg.step_months)?;
        let test_start = add_months(train_start, cfg.train_months)?;
        if test_start > last {
            break;
        }
        let train_end = day_before(test_start)?;
        let test_end = day_before(add_months(test_start, cfg.test_months)?)?.min(last);
        let train_days = index_of(train_start)..index_of(test_start);
        let test_days = index_of(test_start)..days.partition_point(|x| x.date <= test_end);
        if train_days.is_empty() || test_days.is_empty() {
            continue;
        }
        out.push(WindowSplit {
            train_start,
            train_end,
            test_start,
            test_end,
            train_days,
            test_days,
        });
    }
    if out.is_empty() {
        return Err(Error::NoWindows(format!(
            "no window over {first}..{last} has both train and test days"
        )));
    }
    Ok(out)
}
