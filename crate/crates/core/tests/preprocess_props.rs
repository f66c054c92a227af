use std::collections::HashSet;

use headline_trend::preprocess::{
    default_stopwords, filter_named_entities, preprocess_day, preprocess_headline, remove_stopwords,
    strip_bytestring_artifacts, tokenize, NerMode, PreprocessConfig, Token,
};
use proptest::prelude::*;

fn words(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.as_str().to_string()).collect()
}

fn is_subsequence(sub: &[String], of: &[String]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|s| it.any(|o| o == s))
}

fn headline() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 ,.!?'\"()$%&;:-]{0,60}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tokenize_is_idempotent(text in headline()) {
        let cfg = PreprocessConfig::default();
        let once = words(&tokenize(&text, &cfg));
        let twice = words(&tokenize(&once.join(" "), &cfg));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn lowercase_tokens_are_plain_alphanumerics(text in "\\PC{0,60}") {
        for t in tokenize(&text, &PreprocessConfig::default()) {
            prop_assert!(!t.as_str().is_empty());
            prop_assert!(t.as_str().bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()), "{}", t);
        }
    }

    #[test]
    fn filters_keep_order(text in headline(), mode in 0u8..3, gaz in prop::collection::hash_set("[a-z]{1,3}", 0..5)) {
        let cfg = PreprocessConfig {
            ner_mode: [NerMode::Off, NerMode::Remove, NerMode::KeepOnly][mode as usize],
            gazetteer: gaz,
            ..Default::default()
        };
        let all = words(&tokenize(&text, &cfg));
        let pairs: Vec<(String, Token)> = text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|w| !w.is_empty())
            .zip(tokenize(&text, &cfg))
            .map(|(w, t)| (w.to_string(), t))
            .collect();
        let ner = words(&filter_named_entities(pairs, &cfg));
        prop_assert!(is_subsequence(&ner, &all));
        let sw = words(&remove_stopwords(tokenize(&text, &cfg), &cfg.stopwords));
        prop_assert!(is_subsequence(&sw, &all));
        let full = words(&preprocess_headline(&text, &cfg));
        prop_assert!(is_subsequence(&full, &all));
        prop_assert!(full.iter().all(|w| !cfg.stopwords.contains(w)));
    }

    #[test]
    fn day_is_no_longer_than_its_headlines(hs in prop::collection::vec(headline(), 0..25)) {
        let cfg = PreprocessConfig::default();
        let raw: usize = hs.iter().map(|h| tokenize(&strip_bytestring_artifacts(h), &cfg).len()).sum();
        let day = preprocess_day(&hs, &cfg);
        prop_assert!(day.len() <= raw);
        let joined: Vec<String> = hs.iter().flat_map(|h| words(&preprocess_headline(h, &cfg))).collect();
        prop_assert_eq!(words(&day), joined);
    }

    #[test]
    fn unwrapped_text_is_left_alone(text in "[A-Za-z0-9 ,.]{0,40}") {
        prop_assume!(!text.trim_start().starts_with("b'") && !text.trim_start().starts_with("b\""));
        prop_assert_eq!(strip_bytestring_artifacts(&text), text);
    }

    #[test]
    fn wrapping_is_removed(text in "[A-Za-z0-9 ,.]{0,40}") {
        prop_assert_eq!(strip_bytestring_artifacts(&format!("b'{text}'")), text.clone());
        prop_assert_eq!(strip_bytestring_artifacts(&format!("b\"{text}\"")), text);
    }
}

#[test]
fn default_list_has_the_common_function_words() {
    let s = default_stopwords();
    assert_eq!(s.len(), 127);
    for w in ["the", "a", "and"] {
        assert!(s.contains(w));
    }
    let empty: HashSet<String> = HashSet::new();
    let t = tokenize("The market", &PreprocessConfig::default());
    assert_eq!(remove_stopwords(t.clone(), &empty), t);
}
