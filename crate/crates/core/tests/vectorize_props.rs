use std::collections::HashMap;
use std::sync::Arc;

use headline_trend::vectorize::{
    aggregate_embeddings, assemble_features, bow_vector, build_vocabulary, extract_ngrams, tfidf_paper_vector,
    tfidf_standard_vector, train_word2vec, Aggregation, BaseVectorizer, FeatureSpec, FittedFeatures, NgramConfig,
    SentimentLexicon, SgnsParams, VocabConfig,
};
use proptest::prelude::*;

fn docs() -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec("[a-h]", 0..15), 1..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vocabulary_invariants(d in docs(), min_df in 1usize..4, max in prop::option::of(1usize..8)) {
        let Ok(v) = build_vocabulary(&d, min_df, max) else {
            // only legal when nothing survives pruning
            let mut df: HashMap<&str, usize> = HashMap::new();
            for doc in &d {
                let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
                seen.sort();
                seen.dedup();
                for t in seen {
                    *df.entry(t).or_default() += 1;
                }
            }
            prop_assert!(df.values().all(|&c| c < min_df));
            return Ok(());
        };
        let terms = v.terms();
        let mut sorted = terms.to_vec();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), terms.len());
        if let Some(m) = max {
            prop_assert!(terms.len() <= m);
        }
        for (i, term) in terms.iter().enumerate() {
            let df = d.iter().filter(|doc| doc.contains(term)).count() as u64;
            let cc = d.iter().flatten().filter(|t| *t == term).count() as u64;
            prop_assert_eq!(v.doc_freq(i), df);
            prop_assert_eq!(v.corpus_count(i), cc);
            prop_assert!(df >= min_df as u64 && cc >= df);
        }
        for i in 1..v.len() {
            let (a, b) = (v.corpus_count(i - 1), v.corpus_count(i));
            prop_assert!(a > b || (a == b && terms[i - 1] < terms[i]));
        }
    }

    #[test]
    fn bow_and_tfidf_recount(d in docs(), probe in prop::collection::vec("[a-j]", 0..30)) {
        let Ok(v) = build_vocabulary(&d, 1, None) else { return Ok(()); };
        let bow = bow_vector(&probe, &v);
        let in_vocab = probe.iter().filter(|t| v.get(t).is_some()).count();
        prop_assert_eq!(bow.iter().sum::<f64>(), in_vocab as f64);
        for (i, t) in v.terms().iter().enumerate() {
            let c = probe.iter().filter(|p| *p == t).count() as f64;
            prop_assert_eq!(bow[i], c);
        }
        let tf = tfidf_paper_vector(&probe, &v);
        prop_assert!(tf.iter().all(|x| (0.0..=1.0).contains(x)));
        let st = tfidf_standard_vector(&probe, &v);
        let n: f64 = st.iter().map(|x| x * x).sum::<f64>().sqrt();
        if in_vocab == 0 {
            prop_assert_eq!(n, 0.0);
        } else {
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_tfidf_sums_to_one_per_term(d in docs()) {
        let Ok(v) = build_vocabulary(&d, 1, None) else { return Ok(()); };
        let mut total = vec![0.0; v.len()];
        for doc in &d {
            for (t, x) in total.iter_mut().zip(tfidf_paper_vector(doc, &v)) {
                *t += x;
            }
        }
        for t in total {
            prop_assert!((t - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ngram_counts(tokens in prop::collection::vec("[a-d]", 0..20), n in 1usize..6, combine: bool) {
        let g = extract_ngrams(&tokens, NgramConfig { n, combine_with_unigrams: combine });
        let grams = (tokens.len() + 1).saturating_sub(n);
        let expected = if n == 1 { tokens.len() } else if combine { tokens.len() + grams } else { grams };
        prop_assert_eq!(g.len(), expected);
    }

    #[test]
    fn sum_aggregation_is_additive(a in prop::collection::vec("[a-h]", 0..20), b in prop::collection::vec("[a-h]", 0..20)) {
        let corpus: Vec<Vec<String>> = (0..30)
            .map(|i| (0..10).map(|j| ((b'a' + ((i * 3 + j * 5) % 8) as u8) as char).to_string()).collect())
            .collect();
        let v = build_vocabulary(&corpus, 1, None).unwrap();
        let p = SgnsParams { dimension: 6, epochs: 1, ..Default::default() };
        let e = train_word2vec(&corpus, &v, &p).unwrap();
        let ab: Vec<String> = a.iter().chain(&b).cloned().collect();
        let whole = aggregate_embeddings(&ab, &v, &e, Aggregation::Sum);
        let sa = aggregate_embeddings(&a, &v, &e, Aggregation::Sum);
        let sb = aggregate_embeddings(&b, &v, &e, Aggregation::Sum);
        for k in 0..whole.len() {
            prop_assert!((whole[k] - sa[k] - sb[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn assembled_dimension_is_fixed_across_days() {
    let train: Vec<Vec<&str>> = vec![
        vec!["war", "market", "oil"],
        vec!["market", "rally", "oil"],
        vec!["war", "peace", "rally"],
    ];
    let test: Vec<Vec<&str>> = vec![vec![], vec!["unknown"], vec!["war", "war", "growth"]];
    let lex = Arc::new(SentimentLexicon::bundled());
    for base in BaseVectorizer::ALL {
        for sentiment in [false, true] {
            let spec = FeatureSpec { base, ngram: None, sentiment };
            let p = SgnsParams { dimension: 4, negatives: 2, ..Default::default() };
            let vc = VocabConfig { min_df: 1, max_size: None };
            let f = FittedFeatures::fit(&train, spec, vc, &p, Some(lex.clone())).unwrap();
            for day in &test {
                assert_eq!(assemble_features(day, &f).unwrap().len(), f.dimension(), "{}", spec.name());
            }
        }
    }
}
