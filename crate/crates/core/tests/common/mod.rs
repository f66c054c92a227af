#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use headline_trend::corpus::{headline_csv_string, LabeledCorpus};
use headline_trend::synthetic::{headline_corpus, headline_corpus_days};

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// 100 weekdays of synthetic headlines from 2012-01-02.
pub fn fixture_100() -> LabeledCorpus {
    headline_corpus_days(date(2012, 1, 2), 100, 0.3, 11)
}

/// Weekdays from 2010-01-01 through 2011-06-30.
pub fn fixture_18m() -> LabeledCorpus {
    headline_corpus(date(2010, 1, 1), date(2011, 6, 30), 0.3, 5)
}

pub fn write_corpus(dir: &Path, name: &str, corpus: &LabeledCorpus) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, headline_csv_string(corpus).unwrap()).unwrap();
    p
}

pub fn write_config(dir: &Path, name: &str, json: &serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(json).unwrap()).unwrap();
    p
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("headline-trend").chain(args.iter().copied());
    let code = headline_trend::cli::run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
