//! Headline cleaning: byte-string artifact removal, tokenization, stop-word
//! removal and a heuristic named-entity filter.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::util::parse_word_list;

const DEFAULT_STOPWORDS: &str = include_str!("../resources/stopwords_en.txt");

/// The bundled 127-word English stop-word list.
pub fn default_stopwords() -> HashSet<String> {
    parse_word_list(DEFAULT_STOPWORDS).into_iter().collect()
}

/// A cleaned word: a non-empty run of ASCII letters and digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NerMode {
    #[default]
    Off,
    /// Drop entity tokens.
    Remove,
    /// Keep only entity tokens.
    KeepOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub stopwords: HashSet<String>,
    pub ner_mode: NerMode,
    pub gazetteer: HashSet<String>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            remove_stopwords: true,
            stopwords: default_stopwords(),
            ner_mode: NerMode::Off,
            gazetteer: HashSet::new(),
        }
    }
}

/// Removes the `b'...'` / `b"..."` wrapping left by byte strings serialized
/// as text, unescaping `\'`, `\"` and `\\` inside. Other text is returned
/// unchanged.
pub fn strip_bytestring_artifacts(text: &str) -> String {
    let t = text.trim();
    let inner = ["b'", "b\""].iter().find_map(|prefix| {
        let quote = &prefix[1..];
        t.strip_prefix(prefix)
            .and_then(|rest| rest.strip_suffix(quote))
    });
    let Some(inner) = inner else {
        return text.to_string();
    };
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(&next) = chars.peek() {
                if matches!(next, '\'' | '"' | '\\') {
                    out.push(next);
                    chars.next();
                    continue;
                }
            }
        }
        out.push(c);
    }
    out
}

/// Splits on maximal runs of characters that are not ASCII letters or
/// digits, returning `(original form, token)` pairs.
fn split_words(text: &str, lowercase: bool) -> Vec<(String, Token)> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| {
            let tok = if lowercase {
                w.to_ascii_lowercase()
            } else {
                w.to_string()
            };
            (w.to_string(), Token(tok))
        })
        .collect()
}

pub fn tokenize(text: &str, config: &PreprocessConfig) -> Vec<Token> {
    split_words(text, config.lowercase)
        .into_iter()
        .map(|(_, t)| t)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<Token>, stopwords: &HashSet<String>) -> Vec<Token> {
    if stopwords.is_empty() {
        return tokens;
    }
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(&t.0.to_ascii_lowercase()))
        .collect()
}

/// Entity test: capitalized somewhere other than the first word of the
/// headline, or listed in the gazetteer.
fn is_entity(position: usize, original: &str, gazetteer: &HashSet<String>) -> bool {
    let capitalized = original
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_uppercase());
    (position > 0 && capitalized) || gazetteer.contains(&original.to_ascii_lowercase())
}

/// `tokens_with_case` must be one headline, in order, so that position 0 is
/// the sentence-initial word.
pub fn filter_named_entities(
    tokens_with_case: Vec<(String, Token)>,
    config: &PreprocessConfig,
) -> Vec<Token> {
    let keep_entities = match config.ner_mode {
        NerMode::Off => return tokens_with_case.into_iter().map(|(_, t)| t).collect(),
        NerMode::Remove => false,
        NerMode::KeepOnly => true,
    };
    tokens_with_case
        .into_iter()
        .enumerate()
        .filter(|(i, (orig, _))| is_entity(*i, orig, &config.gazetteer) == keep_entities)
        .map(|(_, (_, t))| t)
        .collect()
}

pub fn preprocess_headline(text: &str, config: &PreprocessConfig) -> Vec<Token> {
    let stripped = strip_bytestring_artifacts(text);
    let pairs = split_words(&stripped, config.lowercase);
    let tokens = filter_named_entities(pairs, config);
    if config.remove_stopwords {
        remove_stopwords(tokens, &config.stopwords)
    } else {
        tokens
    }
}

/// All of a day's headlines run through the pipeline and concatenated in
/// headline order.
pub fn preprocess_day<S: AsRef<str>>(headlines: &[S], config: &PreprocessConfig) -> Vec<Token> {
    headlines
        .iter()
        .flat_map(|h| preprocess_headline(h.as_ref(), config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(Token::as_str).collect()
    }

    fn toks(ws: &[&str]) -> Vec<Token> {
        ws.iter().map(|w| Token(w.to_string())).collect()
    }

    #[test]
    fn strips_single_quoted_bytestring() {
        assert_eq!(strip_bytestring_artifacts("b'Market rallies'"), "Market rallies");
        assert_eq!(strip_bytestring_artifacts("Market rallies"), "Market rallies");
    }

    #[test]
    fn strips_double_quoted_bytestring_and_unescapes() {
        assert_eq!(
            strip_bytestring_artifacts(r#"b"He said \"no\"""#),
            r#"He said "no""#
        );
        assert_eq!(strip_bytestring_artifacts(r"b'It\'s over'"), "It's over");
    }

    #[test]
    fn unterminated_prefix_is_left_alone() {
        assert_eq!(strip_bytestring_artifacts("b'oops"), "b'oops");
        assert_eq!(strip_bytestring_artifacts("bob's"), "bob's");
    }

    #[test]
    fn tokenize_drops_punctuation() {
        let cfg = PreprocessConfig::default();
        assert_eq!(
            words(&tokenize("U.S. stocks fall, again!", &cfg)),
            ["u", "s", "stocks", "fall", "again"]
        );
        assert!(tokenize("", &cfg).is_empty());
        assert_eq!(
            words(&tokenize("Fed's rate-hike 2008", &cfg)),
            ["fed", "s", "rate", "hike", "2008"]
        );
    }

    #[test]
    fn tokenize_can_keep_case() {
        let cfg = PreprocessConfig {
            lowercase: false,
            ..Default::default()
        };
        assert_eq!(words(&tokenize("IMF warns", &cfg)), ["IMF", "warns"]);
    }

    #[test]
    fn default_stopwords_cover_the_common_three() {
        let sw = default_stopwords();
        assert_eq!(sw.len(), 127);
        let out = remove_stopwords(toks(&["the", "market", "and", "a", "rally"]), &sw);
        assert_eq!(words(&out), ["market", "rally"]);
        assert!(remove_stopwords(vec![], &sw).is_empty());
        let t = toks(&["the", "x"]);
        assert_eq!(remove_stopwords(t.clone(), &HashSet::new()), t);
    }

    fn ner_cfg(mode: NerMode, gaz: &[&str]) -> PreprocessConfig {
        PreprocessConfig {
            ner_mode: mode,
            gazetteer: gaz.iter().map(|s| s.to_string()).collect(),
            remove_stopwords: false,
            ..Default::default()
        }
    }

    #[test]
    fn entities_removed_by_case_and_gazetteer() {
        let cfg = ner_cfg(NerMode::Remove, &["russia", "georgia"]);
        let out = filter_named_entities(split_words("Russia invades Georgia", true), &cfg);
        assert_eq!(words(&out), ["invades"]);
    }

    #[test]
    fn sentence_initial_capital_is_not_an_entity() {
        let cfg = ner_cfg(NerMode::Remove, &[]);
        let out = filter_named_entities(split_words("Stocks slide as IMF warns", true), &cfg);
        assert_eq!(words(&out), ["stocks", "slide", "as", "warns"]);
        let keep = ner_cfg(NerMode::KeepOnly, &[]);
        let out = filter_named_entities(split_words("Stocks slide as IMF warns", true), &keep);
        assert_eq!(words(&out), ["imf"]);
    }

    #[test]
    fn all_entities_removed_gives_empty() {
        let cfg = ner_cfg(NerMode::Remove, &["trump"]);
        let out = filter_named_entities(split_words("Trump France IMF", true), &cfg);
        assert!(out.is_empty());
    }

    #[test]
    fn ner_off_is_identity() {
        let cfg = ner_cfg(NerMode::Off, &["russia"]);
        let out = filter_named_entities(split_words("Russia invades Georgia", true), &cfg);
        assert_eq!(words(&out), ["russia", "invades", "georgia"]);
    }

    #[test]
    fn day_concatenates_headlines_in_order() {
        let cfg = PreprocessConfig::default();
        assert_eq!(
            words(&preprocess_day(&["Stocks rise", "Stocks fall"], &cfg)),
            ["stocks", "rise", "stocks", "fall"]
        );
        let empty = vec![String::new(); 25];
        assert!(preprocess_day(&empty, &cfg).is_empty());
        assert!(preprocess_day(&["The and a", "of the"], &cfg).is_empty());
    }

    #[test]
    fn day_applies_bytestring_stripping() {
        let cfg = PreprocessConfig::default();
        assert_eq!(
            words(&preprocess_day(&["b'Oil prices rise'"], &cfg)),
            ["oil", "prices", "rise"]
        );
    }
}
