//! Headline-to-trend pipeline.
//!
//! Dated news headlines are cleaned into token streams, turned into fixed
//! length day vectors (bag-of-words, count-ratio TF-IDF, smoothed TF-IDF,
//! n-grams, skip-gram embeddings, lexicon sentiment), and fed to a roster of
//! from-scratch binary classifiers that predict whether the index closed up
//! or down on the same day. Evaluation runs either on a single chronological
//! split or on a rolling 9+3 month walk-forward schedule.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod models;
pub mod preprocess;
pub mod synthetic;
pub mod util;
pub mod vectorize;

pub use error::{Error, Result};
pub use matrix::FeatureMatrix;
