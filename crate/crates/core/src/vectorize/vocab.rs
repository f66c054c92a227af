use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordered term table with document and occurrence counts from the
/// training documents it was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<u64>,
    corpus_count: Vec<u64>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, i: usize) -> u64 {
        self.doc_freq[i]
    }

    pub fn corpus_count(&self, i: usize) -> u64 {
        self.corpus_count[i]
    }

    pub fn corpus_counts(&self) -> &[u64] {
        &self.corpus_count
    }

    /// Number of training documents the counts were taken over.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }
}

/// Keeps terms with `doc_freq >= min_df`, orders them by descending corpus
/// count (ties lexicographic), and truncates to `max_size` when given.
pub fn build_vocabulary<D, S>(train_docs: &[D], min_df: usize, max_size: Option<usize>) -> Result<Vocabulary>
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    if train_docs.is_empty() {
        return Err(Error::InvalidInput("no training documents".into()));
    }
    let mut counts: HashMap<&str, (u64, u64)> = HashMap::new();
    let mut last_doc: HashMap<&str, usize> = HashMap::new();
    for (d, doc) in train_docs.iter().enumerate() {
        for t in doc.as_ref() {
            let t = t.as_ref();
            let e = counts.entry(t).or_insert((0, 0));
            e.1 += 1;
            if last_doc.insert(t, d) != Some(d) {
                e.0 += 1;
            }
        }
    }
    let mut kept: Vec<(&str, u64, u64)> = counts
        .into_iter()
        .filter(|(_, (df, _))| *df as usize >= min_df.max(1))
        .map(|(t, (df, cc))| (t, df, cc))
        .collect();
    kept.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(b.0)));
    if let Some(m) = max_size {
        kept.truncate(m);
    }
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary { min_df });
    }
    let terms: Vec<String> = kept.iter().map(|k| k.0.to_string()).collect();
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary {
        terms,
        index,
        doc_freq: kept.iter().map(|k| k.1).collect(),
        corpus_count: kept.iter().map(|k| k.2).collect(),
        n_docs: train_docs.len(),
    })
}
