//! Seeded synthetic data: Gaussian blobs, headline corpora and
//! substitution corpora for embedding checks. Used by the test suites and
//! the sample-data generator.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{LabeledCorpus, LabeledDay, HEADLINES_PER_DAY};
use crate::matrix::FeatureMatrix;
use crate::util::rng_from_seed;

/// `n` rows in `d` dimensions; class 1 centered at `+mean` in every
/// coordinate, class 0 at `-mean`, unit variance. Labels are fair coin flips.
pub fn two_blobs(n: usize, d: usize, mean: f64, seed: u64) -> (FeatureMatrix, Vec<u8>) {
    let mut rng = rng_from_seed(seed);
    let mut x = FeatureMatrix::zeros(n, d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label: u8 = rng.gen_range(0..2);
        let c = if label == 1 { mean } else { -mean };
        for v in x.row_mut(i) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = c + z;
        }
        y.push(label);
    }
    (x, y)
}

/// Uniform random features with labels from a random hyperplane, for
/// identity checks that need unstructured data.
pub fn random_dataset(n: usize, d: usize, seed: u64) -> (FeatureMatrix, Vec<u8>) {
    let mut rng = rng_from_seed(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut x = FeatureMatrix::zeros(n, d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row = x.row_mut(i);
        for v in row.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
        let s: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + rng.gen_range(-0.5..0.5);
        y.push(u8::from(s > 0.0));
    }
    (x, y)
}

const NEUTRAL: &[&str] = &[
    "government", "minister", "report", "talks", "police", "court", "election", "plan", "city",
    "trade", "water", "oil", "bank", "border", "army", "vote", "energy", "deal", "leader",
    "president", "world", "week", "years", "state", "people", "children", "health", "officials",
    "protest", "military", "security", "union", "ministry", "china", "europe", "russia", "india",
    "israel", "iran", "africa", "internet", "media", "climate", "summit", "budget", "law",
    "parliament", "company", "workers", "prices",
];
const UPBEAT: &[&str] = &[
    "growth", "rally", "record", "gains", "recovery", "boost", "agreement", "peace", "surge",
    "optimism",
];
const GLOOMY: &[&str] = &[
    "crisis", "war", "crash", "attack", "collapse", "fears", "recession", "killed", "sanctions",
    "losses",
];

fn headline(rng: &mut crate::util::Rng, label: u8, signal: f64) -> String {
    let len = rng.gen_range(4..9);
    let mut words: Vec<&str> = (0..len)
        .map(|_| *NEUTRAL.choose(rng).expect("non-empty"))
        .collect();
    if rng.gen_bool(signal) {
        let pool = if label == 1 { UPBEAT } else { GLOOMY };
        let slot = rng.gen_range(0..len);
        words[slot] = pool.choose(rng).expect("non-empty");
    }
    if rng.gen_bool(0.3) {
        let slot = rng.gen_range(1..len);
        words.insert(slot, "the");
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s
}

/// Weekday-only corpus between `start` and `end` inclusive. Each headline
/// carries a class-indicative word with probability `signal`.
pub fn headline_corpus(start: NaiveDate, end: NaiveDate, signal: f64, seed: u64) -> LabeledCorpus {
    let mut rng = rng_from_seed(seed);
    let mut days = Vec::new();
    let mut date = start;
    while date <= end {
        if !matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            let label: u8 = rng.gen_range(0..2);
            let headlines = (0..HEADLINES_PER_DAY)
                .map(|_| headline(&mut rng, label, signal))
                .collect();
            days.push(LabeledDay {
                date,
                headlines,
                label,
            });
        }
        match date.succ_opt() {
            Some(d) => date = d,
            None => break,
        }
    }
    LabeledCorpus::new(days).expect("dates are generated in order")
}

/// First `n` weekdays from `start`.
pub fn headline_corpus_days(start: NaiveDate, n: usize, signal: f64, seed: u64) -> LabeledCorpus {
    // 7 calendar days hold 5 weekdays
    let span = (n * 7).div_ceil(5) as u64 + 7;
    let end = start + chrono::Days::new(span);
    let c = headline_corpus(start, end, signal, seed);
    c.slice(0..n.min(c.len()))
}

/// A token corpus in which `a` and `b` are interchangeable by construction.
#[derive(Debug, Clone)]
pub struct SubstitutionCorpus {
    pub docs: Vec<Vec<String>>,
    pub a: String,
    pub b: String,
    /// Tokens that never share a sentence with `a` or `b`.
    pub probes: Vec<String>,
}

/// `n_topics` disjoint topic vocabularies of `words_per_topic` words each.
/// Every sentence draws all of its words from one topic. In topic 0 a
/// dedicated slot word is emitted as `a` or `b` by a fair coin, so both
/// tokens see exactly the same context distribution.
pub fn substitution_corpus(
    total_tokens: usize,
    n_topics: usize,
    words_per_topic: usize,
    sentence_len: usize,
    seed: u64,
) -> SubstitutionCorpus {
    let mut rng = rng_from_seed(seed);
    let topic_words: Vec<Vec<String>> = (0..n_topics)
        .map(|t| (0..words_per_topic).map(|w| format!("t{t}w{w}")).collect())
        .collect();
    let (a, b) = ("alpha".to_string(), "beta".to_string());
    let mut docs = Vec::new();
    let mut emitted = 0;
    while emitted < total_tokens {
        let t = rng.gen_range(0..n_topics);
        let doc: Vec<String> = (0..sentence_len)
            .map(|_| {
                // topic 0 has one extra slot for the substituted pair
                let k = rng.gen_range(0..words_per_topic + usize::from(t == 0));
                if t == 0 && k == words_per_topic {
                    if rng.gen_bool(0.5) { a.clone() } else { b.clone() }
                } else {
                    topic_words[t][k].clone()
                }
            })
            .collect();
        emitted += doc.len();
        docs.push(doc);
    }
    let probes = (0..10)
        .map(|i| topic_words[1 + i % (n_topics - 1)][i / (n_topics - 1)].clone())
        .collect();
    SubstitutionCorpus { docs, a, b, probes }
}
