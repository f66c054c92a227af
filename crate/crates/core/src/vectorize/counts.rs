use serde::{Deserialize, Serialize};

use super::vocab::Vocabulary;
use super::FeatureVector;
use crate::error::{Error, Result};

/// Largest supported gram order.
pub const MAX_NGRAM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramConfig {
    pub n: usize,
    #[serde(default)]
    pub combine_with_unigrams: bool,
}

impl NgramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_NGRAM {
            return Err(Error::InvalidParameter(format!(
                "n-gram order {} outside 1..={MAX_NGRAM}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Contiguous `n`-grams joined with `_`, optionally preceded by the
/// unigrams. For `n == 1` the unigrams are returned once.
pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S], config: NgramConfig) -> Vec<String> {
    let n = config.n.max(1);
    let unigrams = || tokens.iter().map(|t| t.as_ref().to_string());
    if n == 1 {
        return unigrams().collect();
    }
    let mut out = Vec::new();
    if config.combine_with_unigrams {
        out.extend(unigrams());
    }
    out.extend(tokens.windows(n).map(|w| {
        w.iter()
            .map(AsRef::as_ref)
            .collect::<Vec<&str>>()
            .join("_")
    }));
    out
}

fn counts<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Vec<u64> {
    let mut c = vec![0u64; vocab.len()];
    for t in tokens {
        if let Some(i) = vocab.get(t.as_ref()) {
            c[i] += 1;
        }
    }
    c
}

/// Occurrence count per vocabulary term; out-of-vocabulary tokens ignored.
pub fn bow_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> FeatureVector {
    counts(tokens, vocab).into_iter().map(|c| c as f64).collect()
}

/// Day count divided by the term's training-corpus count, clamped to 1 for
/// documents that were not part of training.
pub fn tfidf_paper_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> FeatureVector {
    counts(tokens, vocab)
        .into_iter()
        .zip(vocab.corpus_counts())
        .map(|(c, &total)| (c as f64 / total as f64).min(1.0))
        .collect()
}

/// Smoothed TF-IDF, `tf * (ln((1 + N) / (1 + df)) + 1)`, L2-normalized.
/// A zero vector stays zero.
pub fn tfidf_standard_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> FeatureVector {
    let n = vocab.n_docs() as f64;
    let mut v: Vec<f64> = counts(tokens, vocab)
        .into_iter()
        .enumerate()
        .map(|(i, tf)| {
            let df = vocab.doc_freq(i) as f64;
            tf as f64 * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
        })
        .collect();
    let norm = crate::matrix::norm(&v);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorize::build_vocabulary;

    fn cfg(n: usize, combine: bool) -> NgramConfig {
        NgramConfig {
            n,
            combine_with_unigrams: combine,
        }
    }

    #[test]
    fn bigrams() {
        let t = ["stocks", "fall", "again"];
        assert_eq!(extract_ngrams(&t, cfg(2, false)), ["stocks_fall", "fall_again"]);
        assert!(extract_ngrams(&["stocks"], cfg(2, false)).is_empty());
        assert_eq!(
            extract_ngrams(&t, cfg(2, true)),
            ["stocks", "fall", "again", "stocks_fall", "fall_again"]
        );
        assert_eq!(extract_ngrams(&["stocks"], cfg(3, true)), ["stocks"]);
    }

    #[test]
    fn ngram_guard() {
        assert!(cfg(5, false).validate().is_ok());
        assert!(cfg(9, false).validate().is_err());
        assert!(cfg(0, false).validate().is_err());
    }

    #[test]
    fn bow_counts_and_ignores_oov() {
        // vocab order by count: market(3) rally(2) crash(1)
        let v = build_vocabulary(
            &[vec!["market", "market", "market", "rally", "rally", "crash"]],
            1,
            None,
        )
        .unwrap();
        assert_eq!(v.terms(), ["market", "rally", "crash"]);
        assert_eq!(bow_vector(&["market", "market", "rally"], &v), [2.0, 1.0, 0.0]);
        let empty: [&str; 0] = [];
        assert_eq!(bow_vector(&empty, &v), [0.0; 3]);
        assert_eq!(bow_vector(&["zzz", "yyy"], &v), [0.0; 3]);
    }

    #[test]
    fn ratio_tfidf_divides_and_clamps() {
        let mut docs = vec![vec!["t"; 2]];
        docs.extend(std::iter::repeat_n(vec!["t"; 1], 8));
        docs.push(vec!["only"]);
        let v = build_vocabulary(&docs, 1, None).unwrap();
        let t = v.get("t").unwrap();
        assert_eq!(v.corpus_count(t), 10);
        assert_eq!(tfidf_paper_vector(&["t", "t"], &v)[t], 0.2);
        let only = v.get("only").unwrap();
        assert_eq!(tfidf_paper_vector(&["only"], &v)[only], 1.0);
        assert_eq!(tfidf_paper_vector(&["only"; 4], &v)[only], 1.0);
    }

    #[test]
    fn standard_tfidf_zero_idf_and_empty() {
        let v = build_vocabulary(&[vec!["a", "b"], vec!["a"]], 1, None).unwrap();
        // a: df=2=N -> weight tf*1; b: df=1 -> tf*(ln(3/2)+1)
        let x = tfidf_standard_vector(&["a", "b"], &v);
        let wa = 1.0;
        let wb = (3.0f64 / 2.0).ln() + 1.0;
        let norm = (wa * wa + wb * wb).sqrt();
        assert!((x[0] - wa / norm).abs() < 1e-15);
        assert!((x[1] - wb / norm).abs() < 1e-15);
        let empty: [&str; 0] = [];
        assert_eq!(tfidf_standard_vector(&empty, &v), [0.0, 0.0]);
    }
}
