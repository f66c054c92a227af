//! Writes the synthetic sample corpus used by the configs in `sample/`.
//!
//! ```text
//! cargo run --example make_sample_data -- sample
//! ```

use std::path::PathBuf;

use chrono::NaiveDate;
use headline_trend::corpus::headline_csv_string;
use headline_trend::synthetic::headline_corpus;
use headline_trend::util::write_atomic;

fn main() -> headline_trend::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sample".into()));
    let start = NaiveDate::from_ymd_opt(2010, 1, 1).expect("valid date");
    let end = NaiveDate::from_ymd_opt(2011, 6, 30).expect("valid date");
    let corpus = headline_corpus(start, end, 0.15, 2024);
    let path = dir.join("headlines.csv");
    write_atomic(&path, headline_csv_string(&corpus)?.as_bytes())?;
    println!("{} days -> {}", corpus.len(), path.display());
    Ok(())
}
