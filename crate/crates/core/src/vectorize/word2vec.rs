//! Skip-gram with negative sampling.
//!
//! Each (center, context) pair inside the window contributes
//! `-ln σ(u_ctx·v_ctr) - Σ_k ln σ(-u_neg·v_ctr)`, with negatives drawn from
//! the unigram distribution raised to `smoothing`. Updates are plain SGD with
//! a learning rate decaying linearly over all pairs of all epochs.

use std::fmt::Write as _;

use rand::distributions::{Distribution, Uniform, WeightedIndex};
use serde::{Deserialize, Serialize};

use super::vocab::Vocabulary;
use super::FeatureVector;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, sigmoid, softplus};
use crate::util::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsParams {
    pub dimension: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub smoothing: f64,
    pub seed: u64,
}

impl Default for SgnsParams {
    fn default() -> Self {
        Self {
            dimension: 50,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            smoothing: 0.75,
            seed: 0,
        }
    }
}

impl SgnsParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("sgns: {m}")));
        if self.dimension == 0 || self.window == 0 || self.negatives == 0 || self.epochs == 0 {
            return bad("dimension, window, negatives and epochs must be positive");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(self.min_learning_rate >= 0.0 && self.min_learning_rate.is_finite()) {
            return bad("min_learning_rate must be finite and non-negative");
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return bad("smoothing exponent must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Input (center) and output (context) vectors, one row per vocabulary term.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dimension: usize,
    input: Vec<f64>,
    output: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rows(&self) -> usize {
        self.input.len().checked_div(self.dimension).unwrap_or(0)
    }

    pub fn input_vector(&self, i: usize) -> &[f64] {
        &self.input[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn output_vector(&self, i: usize) -> &[f64] {
        &self.output[i * self.dimension..(i + 1) * self.dimension]
    }

    /// `term v1 ... vd` per line, six significant digits.
    pub fn to_text(&self, vocab: &Vocabulary) -> String {
        let mut out = String::new();
        for (i, term) in vocab.terms().iter().enumerate().take(self.rows()) {
            out.push_str(term);
            for v in self.input_vector(i) {
                let _ = write!(out, " {}", format_sig6(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// `%g`-style rendering with six significant digits.
fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.5e}");
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradients {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Loss of a single (center, context) pair with its negatives, and the
/// analytic gradient with respect to every vector involved.
pub fn sgns_loss_and_grad(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> Result<(f64, SgnsGradients)> {
    let d = center.len();
    for v in std::iter::once(context).chain(negatives.iter().copied()) {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
    }
    let s_pos = dot(context, center);
    let mut loss = softplus(-s_pos);
    let g_pos = sigmoid(s_pos) - 1.0;
    let mut g_center: Vec<f64> = context.iter().map(|u| g_pos * u).collect();
    let g_context: Vec<f64> = center.iter().map(|v| g_pos * v).collect();
    let mut g_negs = Vec::with_capacity(negatives.len());
    for u in negatives {
        let s = dot(u, center);
        loss += softplus(s);
        let g = sigmoid(s);
        axpy(g, u, &mut g_center);
        g_negs.push(center.iter().map(|v| g * v).collect());
    }
    Ok((
        loss,
        SgnsGradients {
            center: g_center,
            context: g_context,
            negatives: g_negs,
        },
    ))
}

fn encode<S: AsRef<str>>(doc: &[S], vocab: &Vocabulary) -> Vec<usize> {
    doc.iter().filter_map(|t| vocab.get(t.as_ref())).collect()
}

fn pairs_in(len: usize, window: usize) -> u64 {
    (0..len)
        .map(|i| (i.min(window) + (len - 1 - i).min(window)) as u64)
        .sum()
}

/// Trains skip-gram embeddings over `train_docs`; windows never cross
/// document boundaries and out-of-vocabulary tokens are dropped first.
pub fn train_word2vec<D, S>(
    train_docs: &[D],
    vocab: &Vocabulary,
    params: &SgnsParams,
) -> Result<EmbeddingMatrix>
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    params.validate()?;
    let k = params.negatives;
    let v = vocab.len();
    if v < k + 1 {
        return Err(Error::TooFewTerms {
            vocab: v,
            needed: k + 1,
        });
    }
    let d = params.dimension;
    let mut rng = rng_from_seed(params.seed);
    let init = Uniform::new_inclusive(-0.5 / d as f64, 0.5 / d as f64);
    let mut input: Vec<f64> = (0..v * d).map(|_| init.sample(&mut rng)).collect();
    let mut output = vec![0.0; v * d];

    let weights: Vec<f64> = vocab
        .corpus_counts()
        .iter()
        .map(|&c| (c as f64).powf(params.smoothing))
        .collect();
    let noise = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidInput(format!("negative-sampling table: {e}")))?;

    let docs: Vec<Vec<usize>> = train_docs.iter().map(|doc| encode(doc.as_ref(), vocab)).collect();
    let per_epoch: u64 = docs.iter().map(|doc| pairs_in(doc.len(), params.window)).sum();
    let total = (per_epoch * params.epochs as u64).max(1) as f64;
    let lr0 = params.learning_rate;
    let lr_end = params.min_learning_rate.min(lr0);

    let mut step = 0u64;
    let mut neu1e = vec![0.0; d];
    for _ in 0..params.epochs {
        for doc in &docs {
            for (i, &center) in doc.iter().enumerate() {
                let lo = i.saturating_sub(params.window);
                let hi = (i + params.window).min(doc.len().saturating_sub(1));
                for (j, &ctx) in doc.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let lr = lr0 - (lr0 - lr_end) * (step as f64 / total);
                    step += 1;
                    neu1e.iter_mut().for_each(|x| *x = 0.0);
                    let vc = center * d;
                    for n in 0..=k {
                        let (target, label) = if n == 0 {
                            (ctx, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == ctx {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let ut = target * d;
                        let s = dot(&output[ut..ut + d], &input[vc..vc + d]);
                        let g = lr * (label - sigmoid(s));
                        axpy(g, &output[ut..ut + d], &mut neu1e);
                        let (inp, out) = (&input[vc..vc + d], &mut output[ut..ut + d]);
                        axpy(g, inp, out);
                    }
                    axpy(1.0, &neu1e, &mut input[vc..vc + d]);
                }
            }
        }
    }
    if input.iter().chain(&output).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "embedding",
        });
    }
    Ok(EmbeddingMatrix {
        dimension: d,
        input,
        output,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Sum,
    Mean,
}

/// Sum or mean of the input vectors of in-vocabulary tokens. Documents
/// with no known token map to the zero vector.
pub fn aggregate_embeddings<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    emb: &EmbeddingMatrix,
    mode: Aggregation,
) -> FeatureVector {
    let mut acc = vec![0.0; emb.dimension()];
    let mut n = 0usize;
    for t in tokens {
        if let Some(i) = vocab.get(t.as_ref()) {
            axpy(1.0, emb.input_vector(i), &mut acc);
            n += 1;
        }
    }
    if mode == Aggregation::Mean && n > 0 {
        acc.iter_mut().for_each(|x| *x /= n as f64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorize::build_vocabulary;

    fn small_docs() -> Vec<Vec<String>> {
        let words = ["a", "b", "c", "d", "e", "f", "g", "h"];
        (0..20)
            .map(|i| (0..12).map(|j| words[(i * 3 + j * 5) % 8].to_string()).collect())
            .collect()
    }

    #[test]
    fn zero_vectors_give_two_ln2() {
        let z = [0.0; 4];
        let (loss, g) = sgns_loss_and_grad(&z, &z, &[&z]).unwrap();
        assert!((loss - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        assert!(g.center.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn center_gradient_at_origin_balances() {
        let zero = [0.0; 3];
        let u_ctx = [1.0, 2.0, -1.0];
        let u_neg = [0.5, -1.0, 3.0];
        let (_, g) = sgns_loss_and_grad(&zero, &u_ctx, &[&u_neg]).unwrap();
        for i in 0..3 {
            assert!((g.center[i] - (-0.5 * u_ctx[i] + 0.5 * u_neg[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn aligned_large_context_has_small_positive_gradient() {
        let v = [10.0, 0.0];
        let (loss, g) = sgns_loss_and_grad(&v, &v, &[]).unwrap();
        assert!(loss < 1e-40);
        assert!(crate::matrix::norm(&g.context) < 1e-40);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        assert!(sgns_loss_and_grad(&[0.0; 2], &[0.0; 3], &[]).is_err());
    }

    #[test]
    fn zero_learning_rate_keeps_initialization() {
        let docs = small_docs();
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        let p = SgnsParams {
            dimension: 8,
            epochs: 1,
            learning_rate: 0.0,
            seed: 3,
            ..Default::default()
        };
        let emb = train_word2vec(&docs, &vocab, &p).unwrap();
        // reproduce the initializer draw
        let mut rng = rng_from_seed(3);
        let init = Uniform::new_inclusive(-0.5 / 8.0, 0.5 / 8.0);
        let expect: Vec<f64> = (0..vocab.len() * 8).map(|_| init.sample(&mut rng)).collect();
        assert_eq!(emb.input, expect);
        assert!(emb.output.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn same_seed_same_matrix() {
        let docs = small_docs();
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        let p = SgnsParams {
            dimension: 8,
            seed: 11,
            ..Default::default()
        };
        let a = train_word2vec(&docs, &vocab, &p).unwrap();
        let b = train_word2vec(&docs, &vocab, &p).unwrap();
        assert_eq!(a, b);
        let c = train_word2vec(&docs, &vocab, &SgnsParams { seed: 12, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tiny_vocabulary_is_rejected() {
        let docs = vec![vec!["a", "b", "c"]];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        assert!(matches!(
            train_word2vec(&docs, &vocab, &SgnsParams::default()),
            Err(Error::TooFewTerms { vocab: 3, needed: 6 })
        ));
    }

    fn unit_embedding() -> (Vocabulary, EmbeddingMatrix) {
        let vocab = build_vocabulary(&[vec!["x", "x", "y"]], 1, None).unwrap();
        let emb = EmbeddingMatrix {
            dimension: 2,
            input: vec![1.0, 0.0, 0.0, 1.0],
            output: vec![0.0; 4],
        };
        (vocab, emb)
    }

    #[test]
    fn sum_and_mean_aggregation() {
        let (vocab, emb) = unit_embedding();
        assert_eq!(aggregate_embeddings(&["x", "y"], &vocab, &emb, Aggregation::Sum), [1.0, 1.0]);
        assert_eq!(aggregate_embeddings(&["x", "y", "oov"], &vocab, &emb, Aggregation::Mean), [0.5, 0.5]);
        let empty: [&str; 0] = [];
        assert_eq!(aggregate_embeddings(&empty, &vocab, &emb, Aggregation::Mean), [0.0, 0.0]);
        assert_eq!(aggregate_embeddings(&["x"; 3], &vocab, &emb, Aggregation::Sum), [3.0, 0.0]);
    }

    #[test]
    fn text_export_uses_six_digits() {
        let (vocab, mut emb) = unit_embedding();
        emb.input = vec![0.123456789, -1.5, 1234567.0, 0.0000123456789];
        assert_eq!(emb.to_text(&vocab), "x 0.123457 -1.5\ny 1.23457e6 1.23457e-5\n");
    }
}
