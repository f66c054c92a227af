use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::util::Fingerprint;

const BUNDLED_LEXICON: &str = include_str!("../../resources/sentiment_lexicon.csv");

/// Word-level polarity in [-1, 1] and subjectivity in [0, 1].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentimentLexicon {
    entries: HashMap<String, (f64, f64)>,
}

#[derive(Deserialize)]
struct LexiconRow {
    word: String,
    polarity: f64,
    subjectivity: f64,
}

impl SentimentLexicon {
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_LEXICON.as_bytes()).expect("bundled lexicon is well-formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(f)
    }

    /// Parses `word,polarity,subjectivity` with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut entries = HashMap::new();
        for (i, row) in rdr.deserialize::<LexiconRow>().enumerate() {
            let row = row?;
            let err = |m: String| Error::Row {
                context: "lexicon csv",
                row: i + 2,
                message: m,
            };
            if !(-1.0..=1.0).contains(&row.polarity) {
                return Err(err(format!("polarity {} outside [-1, 1]", row.polarity)));
            }
            if !(0.0..=1.0).contains(&row.subjectivity) {
                return Err(err(format!("subjectivity {} outside [0, 1]", row.subjectivity)));
            }
            entries.insert(row.word.trim().to_lowercase(), (row.polarity, row.subjectivity));
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, word: &str, polarity: f64, subjectivity: f64) {
        self.entries.insert(
            word.to_lowercase(),
            (polarity.clamp(-1.0, 1.0), subjectivity.clamp(0.0, 1.0)),
        );
    }

    pub fn get(&self, word: &str) -> Option<(f64, f64)> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Order-independent digest of every entry.
    pub fn fingerprint(&self) -> String {
        let mut words: Vec<_> = self.entries.iter().collect();
        words.sort_by(|a, b| a.0.cmp(b.0));
        let mut f = Fingerprint::new();
        for (w, (p, s)) in words {
            f.str(w).f64s(&[*p, *s]);
        }
        f.finish()
    }
}

/// `[mean polarity, mean subjectivity]` over lexicon hits; `[0, 0]` when
/// nothing matches.
pub fn sentiment_features<S: AsRef<str>>(tokens: &[S], lexicon: &SentimentLexicon) -> FeatureVector {
    let (mut p, mut s, mut n) = (0.0, 0.0, 0usize);
    for t in tokens {
        if let Some((tp, ts)) = lexicon.get(t.as_ref()) {
            p += tp;
            s += ts;
            n += 1;
        }
    }
    if n == 0 {
        return vec![0.0, 0.0];
    }
    vec![p / n as f64, s / n as f64]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> SentimentLexicon {
        SentimentLexicon::from_csv("word,polarity,subjectivity\nwar,-0.8,0.9\npeace,0.4,0.1\n".as_bytes())
            .unwrap()
    }

    #[test]
    fn single_and_averaged_lookups() {
        let l = lex();
        assert_eq!(sentiment_features(&["war"], &l), [-0.8, 0.9]);
        assert_eq!(sentiment_features(&["calm", "talks"], &l), [0.0, 0.0]);
        let f = sentiment_features(&["war", "peace", "unknown"], &l);
        assert!((f[0] + 0.2).abs() < 1e-15 && (f[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let bad = "word,polarity,subjectivity\nx,1.5,0.2\n";
        assert!(SentimentLexicon::from_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn bundled_lexicon_loads() {
        let l = SentimentLexicon::bundled();
        assert!(l.len() > 1000);
        let (p, _) = l.get("good").unwrap();
        assert!(p > 0.0);
        let (p, _) = l.get("bad").unwrap();
        assert!(p < 0.0);
    }
}
