//! Seeded synthetic corpora with known structure, for experiments where the
//! answer is fixed by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, Example};

const SYLLABLES: &[&str] = &[
    "か", "き", "く", "け", "こ", "さ", "し", "す", "せ", "そ", "な", "に", "ぬ", "ね", "の", "は",
    "ひ", "ふ", "へ", "ほ", "ま", "み", "む", "め", "も", "や", "ゆ", "よ", "ら", "り", "れ", "ろ",
];
const PARTICLES: &[&str] = &["が", "を", "に", "で", "と"];

/// Sentence-initial adverbs and the auxiliary each one adds.
pub const MODAL_ADVERBS: &[(&str, &str)] = &[("きっと", "will"), ("たぶん", "may"), ("ぜひ", "must")];

struct Lexicon {
    nouns: Vec<String>,
    stems: Vec<String>,
}

impl Lexicon {
    fn new(rng: &mut ChaCha8Rng, nouns: usize, stems: usize) -> Self {
        let mut word = |len: std::ops::RangeInclusive<usize>| -> String {
            let n = rng.gen_range(len);
            (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
        };
        let nouns = (0..nouns).map(|_| word(2..=4)).collect();
        let stems = (0..stems).map(|_| word(2..=3)).collect();
        Self { nouns, stems }
    }

    /// Noun–particle phrases followed by a verb stem, at least `min_chars`
    /// characters long.
    fn body(&self, rng: &mut ChaCha8Rng, min_chars: usize) -> Vec<String> {
        let mut tokens = Vec::new();
        let mut chars = 0;
        loop {
            let noun = self.nouns.choose(rng).unwrap().clone();
            let particle = PARTICLES.choose(rng).unwrap().to_string();
            chars += noun.chars().count() + particle.chars().count();
            tokens.push(noun);
            tokens.push(particle);
            if chars >= min_chars && rng.gen_bool(0.5) {
                break;
            }
        }
        tokens.push(self.stems.choose(rng).unwrap().clone());
        tokens
    }
}

fn example(label: &str, tokens: Vec<String>) -> Example {
    let sentence: String = tokens.concat();
    Example::new(label, sentence, Some(tokens)).expect("synthetic example is well formed")
}

/// Corpus where the final character sets the tense (`た` past, `る` present)
/// and, in a `flip_rate` share of sentences, a sentence-initial adverb adds a
/// modal auxiliary (`きっと…た` is `will+past`). At least ten characters
/// separate the adverb from the end, so suffix features alone never see it.
pub fn adverb_flip_corpus(n: usize, flip_rate: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon = Lexicon::new(&mut rng, 200, 60);
    (0..n)
        .map(|_| {
            let past = rng.gen_bool(0.5);
            let adverb = rng.gen_bool(flip_rate).then(|| *MODAL_ADVERBS.choose(&mut rng).unwrap());
            let mut tokens = Vec::new();
            if let Some((word, _)) = adverb {
                tokens.push(word.to_owned());
            }
            tokens.extend(lexicon.body(&mut rng, 10));
            tokens.push(if past { "た" } else { "る" }.to_owned());
            let label = match (adverb, past) {
                (None, false) => "present".to_owned(),
                (None, true) => "past".to_owned(),
                (Some((_, aux)), false) => aux.to_owned(),
                (Some((_, aux)), true) => format!("{aux}+past"),
            };
            example(&label, tokens)
        })
        .collect()
}

/// Sentence endings shared by both domains of [`domain_pair`].
pub const DOMAIN_ENDINGS: &[&str] = &["る", "た", "ている", "よう"];
const DOMAIN_LABELS: &[&str] = &["present", "past", "progressive", "will"];

/// Two domains over the same endings with conflicting ending→label maps:
/// the first maps `DOMAIN_ENDINGS[i]` to the i-th label, the second to the
/// next one round. Each domain also has its own vocabulary.
pub fn domain_pair(n_per_domain: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut domain = |shift: usize| -> Dataset {
        let lexicon = Lexicon::new(&mut rng, 150, 40);
        (0..n_per_domain)
            .map(|_| {
                let e = rng.gen_range(0..DOMAIN_ENDINGS.len());
                let mut tokens = lexicon.body(&mut rng, 4);
                tokens.push(DOMAIN_ENDINGS[e].to_owned());
                example(DOMAIN_LABELS[(e + shift) % DOMAIN_LABELS.len()], tokens)
            })
            .collect()
    };
    let first = domain(0);
    let second = domain(1);
    (first, second)
}

/// Category shares of a news-style corpus, most frequent first; the last
/// share is spread over the `OTHER_CATEGORIES`.
pub const TABLE_RATES: &[(&str, f64)] = &[
    ("present", 0.42),
    ("past", 0.36),
    ("imperative", 0.05),
    ("perfect", 0.04),
    ("will", 0.03),
    ("progressive", 0.03),
    ("can", 0.02),
];
pub const OTHER_RATE: f64 = 0.05;
pub const OTHER_CATEGORIES: &[&str] = &["must", "may", "can+past", "have-to", "will+progressive"];

fn ending_for(label: &str) -> &'static str {
    match label {
        "present" => "る",
        "past" => "た",
        "imperative" => "ろ",
        "perfect" => "てしまった",
        "will" => "だろう",
        "progressive" => "ている",
        "can" => "られる",
        "must" => "ねばならない",
        "may" => "かもしれない",
        "can+past" => "られた",
        "have-to" => "なければならない",
        _ => "ているだろう",
    }
}

/// `n` sentences (in shuffled order) whose category counts follow
/// [`TABLE_RATES`] (rounded, remainder to `present`). Past sentences end in
/// `た` and present ones never do.
pub fn table_corpus(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon = Lexicon::new(&mut rng, 200, 60);
    let mut labels: Vec<&str> = Vec::with_capacity(n);
    for &(label, rate) in &TABLE_RATES[1..] {
        labels.extend(std::iter::repeat_n(label, (rate * n as f64).round() as usize));
    }
    let others = (OTHER_RATE * n as f64).round() as usize;
    labels.extend((0..others).map(|i| OTHER_CATEGORIES[i % OTHER_CATEGORIES.len()]));
    labels.truncate(n);
    labels.resize(n, "present");
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .map(|label| {
            let mut tokens = lexicon.body(&mut rng, 4);
            tokens.push(ending_for(label).to_owned());
            example(label, tokens)
        })
        .collect()
}
