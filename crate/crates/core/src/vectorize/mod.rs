//! Day-level feature extraction.
//!
//! Every fitted statistic (vocabulary, document and corpus counts, skip-gram
//! embeddings) is computed from training documents only; test documents are
//! only ever transformed.

mod counts;
mod pipeline;
mod sentiment;
mod vocab;
mod word2vec;

pub use counts::{bow_vector, extract_ngrams, tfidf_paper_vector, tfidf_standard_vector, NgramConfig};
pub use pipeline::{assemble_features, BaseVectorizer, FeatureSpec, FittedFeatures, VocabConfig};
pub use sentiment::{sentiment_features, SentimentLexicon};
pub use vocab::{build_vocabulary, Vocabulary};
pub use word2vec::{
    aggregate_embeddings, sgns_loss_and_grad, train_word2vec, Aggregation, EmbeddingMatrix,
    SgnsGradients, SgnsParams,
};

/// Dense day representation.
pub type FeatureVector = Vec<f64>;
