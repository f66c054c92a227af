use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::counts::{bow_vector, extract_ngrams, tfidf_paper_vector, tfidf_standard_vector, NgramConfig};
use super::sentiment::{sentiment_features, SentimentLexicon};
use super::vocab::{build_vocabulary, Vocabulary};
use super::word2vec::{aggregate_embeddings, train_word2vec, Aggregation, EmbeddingMatrix, SgnsParams};
use super::FeatureVector;
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::util::Fingerprint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseVectorizer {
    Bow,
    TfidfPaper,
    TfidfStandard,
    W2vSum,
    W2vMean,
}

impl BaseVectorizer {
    pub const ALL: [BaseVectorizer; 5] = [
        BaseVectorizer::Bow,
        BaseVectorizer::TfidfPaper,
        BaseVectorizer::TfidfStandard,
        BaseVectorizer::W2vSum,
        BaseVectorizer::W2vMean,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaseVectorizer::Bow => "bow",
            BaseVectorizer::TfidfPaper => "tfidf_paper",
            BaseVectorizer::TfidfStandard => "tfidf_standard",
            BaseVectorizer::W2vSum => "w2v_sum",
            BaseVectorizer::W2vMean => "w2v_mean",
        }
    }

    fn aggregation(self) -> Option<Aggregation> {
        match self {
            BaseVectorizer::W2vSum => Some(Aggregation::Sum),
            BaseVectorizer::W2vMean => Some(Aggregation::Mean),
            _ => None,
        }
    }
}

impl fmt::Display for BaseVectorizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One embedding axis of an experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub base: BaseVectorizer,
    #[serde(default)]
    pub ngram: Option<NgramConfig>,
    #[serde(default)]
    pub sentiment: bool,
}

impl FeatureSpec {
    pub fn new(base: BaseVectorizer) -> Self {
        Self {
            base,
            ngram: None,
            sentiment: false,
        }
    }

    /// Short stable label, e.g. `bow+2gram+sent`.
    pub fn name(&self) -> String {
        let mut s = self.base.as_str().to_string();
        if let Some(g) = self.ngram {
            if g.n > 1 {
                if g.combine_with_unigrams {
                    s.push_str(&format!("+1-{}gram", g.n));
                } else {
                    s.push_str(&format!("+{}gram", g.n));
                }
            }
        }
        if self.sentiment {
            s.push_str("+sent");
        }
        s
    }

    fn grams<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        match self.ngram {
            Some(g) => extract_ngrams(tokens, g),
            None => tokens.iter().map(|t| t.as_ref().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VocabConfig {
    pub min_df: usize,
    pub max_size: Option<usize>,
}

impl Default for VocabConfig {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_size: Some(5000),
        }
    }
}

/// A feature spec with its vocabulary (and embeddings) fitted on training
/// documents.
#[derive(Debug, Clone)]
pub struct FittedFeatures {
    spec: FeatureSpec,
    vocab: Vocabulary,
    embedding: Option<EmbeddingMatrix>,
    lexicon: Option<Arc<SentimentLexicon>>,
}

impl FittedFeatures {
    pub fn fit<D, S>(
        train_docs: &[D],
        spec: FeatureSpec,
        vocab_cfg: VocabConfig,
        sgns: &SgnsParams,
        lexicon: Option<Arc<SentimentLexicon>>,
    ) -> Result<Self>
    where
        D: AsRef<[S]>,
        S: AsRef<str>,
    {
        if let Some(g) = spec.ngram {
            g.validate()?;
        }
        if spec.sentiment && lexicon.is_none() {
            return Err(Error::InvalidParameter(
                "sentiment channel requested without a lexicon".into(),
            ));
        }
        let grams: Vec<Vec<String>> = train_docs.iter().map(|d| spec.grams(d.as_ref())).collect();
        let vocab = build_vocabulary(&grams, vocab_cfg.min_df, vocab_cfg.max_size)?;
        let embedding = match spec.base.aggregation() {
            Some(_) => Some(train_word2vec(&grams, &vocab, sgns)?),
            None => None,
        };
        Ok(Self {
            spec,
            vocab,
            embedding,
            lexicon: if spec.sentiment { lexicon } else { None },
        })
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn embedding(&self) -> Option<&EmbeddingMatrix> {
        self.embedding.as_ref()
    }

    pub fn dimension(&self) -> usize {
        let base = match &self.embedding {
            Some(e) => e.dimension(),
            None => self.vocab.len(),
        };
        base + if self.spec.sentiment { 2 } else { 0 }
    }

    /// Digest of everything learned from the training documents:
    /// vocabulary, document frequencies, corpus counts and embeddings.
    pub fn fingerprint(&self) -> String {
        let mut f = Fingerprint::new();
        f.str(&self.spec.name()).u64(self.vocab.n_docs() as u64);
        for (i, t) in self.vocab.terms().iter().enumerate() {
            f.str(t).u64(self.vocab.doc_freq(i)).u64(self.vocab.corpus_count(i));
        }
        if let Some(e) = &self.embedding {
            for i in 0..e.rows() {
                f.f64s(e.input_vector(i)).f64s(e.output_vector(i));
            }
        }
        f.finish()
    }

    pub fn transform_all<D, S>(&self, docs: &[D]) -> Result<FeatureMatrix>
    where
        D: AsRef<[S]>,
        S: AsRef<str>,
    {
        let dim = self.dimension();
        let mut m = FeatureMatrix::zeros(docs.len(), dim);
        for (i, d) in docs.iter().enumerate() {
            let v = assemble_features(d.as_ref(), self)?;
            m.row_mut(i).copy_from_slice(&v);
        }
        Ok(m)
    }
}

/// `[base features ‖ sentiment?]` for one day's tokens.
pub fn assemble_features<S: AsRef<str>>(day_tokens: &[S], fitted: &FittedFeatures) -> Result<FeatureVector> {
    let spec = &fitted.spec;
    let grams = spec.grams(day_tokens);
    let mut v = match (spec.base, &fitted.embedding) {
        (BaseVectorizer::Bow, _) => bow_vector(&grams, &fitted.vocab),
        (BaseVectorizer::TfidfPaper, _) => tfidf_paper_vector(&grams, &fitted.vocab),
        (BaseVectorizer::TfidfStandard, _) => tfidf_standard_vector(&grams, &fitted.vocab),
        (b, Some(emb)) => {
            let agg = b.aggregation().expect("embedding bases aggregate");
            aggregate_embeddings(&grams, &fitted.vocab, emb, agg)
        }
        (b, None) => {
            return Err(Error::InvalidInput(format!("{b} features need trained embeddings")))
        }
    };
    if let Some(lex) = &fitted.lexicon {
        // the lexicon is keyed by words, never by joined grams
        v.extend(sentiment_features(day_tokens, lex));
    }
    if v.len() != fitted.dimension() {
        return Err(Error::DimensionMismatch {
            expected: fitted.dimension(),
            got: v.len(),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<Vec<&'static str>> {
        vec![
            vec!["market", "rally", "market", "crash", "oil"],
            vec!["market", "rally", "war", "oil", "gold"],
            vec!["crash", "war", "market", "gold", "bank"],
            vec!["oil", "bank", "rally", "gold", "fed"],
        ]
    }

    fn lexicon() -> Arc<SentimentLexicon> {
        let mut l = SentimentLexicon::default();
        l.insert("rally", 0.5, 0.2);
        l.insert("crash", -0.6, 0.4);
        Arc::new(l)
    }

    #[test]
    fn bow_plus_sentiment_widths() {
        let cfg = VocabConfig {
            min_df: 1,
            max_size: Some(3),
        };
        let spec = FeatureSpec {
            sentiment: true,
            ..FeatureSpec::new(BaseVectorizer::Bow)
        };
        let f = FittedFeatures::fit(&docs(), spec, cfg, &SgnsParams::default(), Some(lexicon())).unwrap();
        let v = assemble_features(&["market", "rally"], &f).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(&v[3..], &[0.5, 0.2]);
        assert_eq!(spec.name(), "bow+sent");
    }

    #[test]
    fn w2v_width_is_dimension() {
        let sgns = SgnsParams {
            dimension: 50,
            negatives: 2,
            ..Default::default()
        };
        let f = FittedFeatures::fit(
            &docs(),
            FeatureSpec::new(BaseVectorizer::W2vSum),
            VocabConfig { min_df: 1, max_size: None },
            &sgns,
            None,
        )
        .unwrap();
        assert_eq!(assemble_features(&["oil"], &f).unwrap().len(), 50);
    }

    #[test]
    fn bigram_tfidf_width_is_bigram_vocab() {
        let spec = FeatureSpec {
            ngram: Some(NgramConfig { n: 2, combine_with_unigrams: false }),
            ..FeatureSpec::new(BaseVectorizer::TfidfPaper)
        };
        let f = FittedFeatures::fit(
            &docs(),
            spec,
            VocabConfig { min_df: 1, max_size: None },
            &SgnsParams::default(),
            None,
        )
        .unwrap();
        assert!(f.vocabulary().terms().iter().all(|t| t.contains('_')));
        assert_eq!(assemble_features(&["market", "rally"], &f).unwrap().len(), f.vocabulary().len());
        assert_eq!(spec.name(), "tfidf_paper+2gram");
    }

    #[test]
    fn sentiment_without_lexicon_is_rejected() {
        let spec = FeatureSpec {
            sentiment: true,
            ..FeatureSpec::new(BaseVectorizer::Bow)
        };
        assert!(FittedFeatures::fit(&docs(), spec, VocabConfig::default(), &SgnsParams::default(), None).is_err());
    }
}
