//! Sparse binary features.
//!
//! Three feature sets are supported:
//!
//! * [`FeatureSet::Suffix`] (feature-set 2): the 1- to 10-character strings
//!   ending the sentence.
//! * [`FeatureSet::Tokens`] (feature-set 3): every token of the sentence.
//! * [`FeatureSet::Combined`] (feature-set 1): the union of the two.
//!
//! Features are interned into a [`Vocabulary`]; an example becomes a
//! [`FeatureVector`], the sorted set of its feature ids.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::error::Error;

pub const DEFAULT_MAX_SUFFIX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Suffix,
    Token,
}

/// A namespaced feature. Suffix and token features with identical text are
/// distinct. The suffix length `n` is the character count of `text`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Feature {
    pub kind: FeatureKind,
    pub text: String,
}

impl Feature {
    pub fn suffix(text: impl Into<String>) -> Self {
        Self {
            kind: FeatureKind::Suffix,
            text: text.into(),
        }
    }

    pub fn token(text: impl Into<String>) -> Self {
        Self {
            kind: FeatureKind::Token,
            text: text.into(),
        }
    }

    /// Suffix length in characters; `None` for token features.
    pub fn n(&self) -> Option<usize> {
        match self.kind {
            FeatureKind::Suffix => Some(self.text.chars().count()),
            FeatureKind::Token => None,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FeatureKind::Suffix => write!(f, "suffix:{}", self.text),
            FeatureKind::Token => write!(f, "token:{}", self.text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureSet {
    /// Feature-set 1: suffixes and tokens.
    #[serde(rename = "1")]
    Combined,
    /// Feature-set 2: sentence-final character n-grams.
    #[serde(rename = "2")]
    Suffix,
    /// Feature-set 3: tokens.
    #[serde(rename = "3")]
    Tokens,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [FeatureSet::Combined, FeatureSet::Suffix, FeatureSet::Tokens];

    pub fn number(self) -> u8 {
        match self {
            FeatureSet::Combined => 1,
            FeatureSet::Suffix => 2,
            FeatureSet::Tokens => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(FeatureSet::Combined),
            2 => Some(FeatureSet::Suffix),
            3 => Some(FeatureSet::Tokens),
            _ => None,
        }
    }

    fn uses_suffixes(self) -> bool {
        matches!(self, FeatureSet::Combined | FeatureSet::Suffix)
    }

    fn uses_tokens(self) -> bool {
        matches!(self, FeatureSet::Combined | FeatureSet::Tokens)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.parse::<u8>()
            .ok()
            .and_then(FeatureSet::from_number)
            .ok_or_else(|| Error::Argument(format!("feature set must be 1, 2 or 3, got `{s}`")))
    }
}

/// Splits a sentence into tokens.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, sentence: &str) -> Vec<String>;
}

/// Splits on Unicode whitespace.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl Tokenizer for WhitespaceTokenizer {
    fn tokenize(&self, sentence: &str) -> Vec<String> {
        tokenize(sentence)
    }
}

pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_owned).collect()
}

/// Tokens of an example: its supplied token list if present, otherwise the
/// tokenizer's output on the sentence.
pub fn example_tokens(example: &Example, tokenizer: &dyn Tokenizer) -> Vec<String> {
    match example.tokens() {
        Some(tokens) => tokens.to_vec(),
        None => tokenizer.tokenize(example.sentence()),
    }
}

/// The last `min(max_n, len)` suffixes of `sentence`, shortest first.
pub fn suffix_ngrams(sentence: &str, max_n: usize) -> Vec<Feature> {
    let boundaries: Vec<usize> = sentence.char_indices().map(|(i, _)| i).collect();
    boundaries
        .iter()
        .rev()
        .take(max_n)
        .map(|&start| Feature::suffix(&sentence[start..]))
        .collect()
}

/// Removes trailing Unicode punctuation (e.g. `。`, `.`, `!`).
pub fn strip_trailing_punctuation(sentence: &str) -> &str {
    sentence.trim_end_matches(|c: char| c.is_ascii_punctuation() || is_cjk_punctuation(c))
}

fn is_cjk_punctuation(c: char) -> bool {
    matches!(c, '\u{3000}'..='\u{303F}' | '\u{FF01}'..='\u{FF0F}' | '\u{FF1A}'..='\u{FF20}' | '…')
}

/// Bidirectional feature ↔ id map with contiguous ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Feature>", into = "Vec<Feature>")]
pub struct Vocabulary {
    features: Vec<Feature>,
    ids: HashMap<Feature, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, feature: &Feature) -> Option<u32> {
        self.ids.get(feature).copied()
    }

    pub fn feature(&self, id: u32) -> &Feature {
        &self.features[id as usize]
    }

    pub fn intern(&mut self, feature: Feature) -> u32 {
        if let Some(&id) = self.ids.get(&feature) {
            return id;
        }
        let id = self.features.len() as u32;
        self.ids.insert(feature.clone(), id);
        self.features.push(feature);
        id
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Feature)> {
        self.features.iter().enumerate().map(|(i, f)| (i as u32, f))
    }
}

impl From<Vec<Feature>> for Vocabulary {
    fn from(features: Vec<Feature>) -> Self {
        let mut vocab = Vocabulary::new();
        for feature in features {
            vocab.intern(feature);
        }
        vocab
    }
}

impl From<Vocabulary> for Vec<Feature> {
    fn from(vocab: Vocabulary) -> Self {
        vocab.features
    }
}

/// Sorted, duplicate-free set of feature ids. All features are binary, so
/// the inner product of two vectors is the size of their intersection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<u32>);

impl FeatureVector {
    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        let mut ids: Vec<u32> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// `|self ∩ other|`, by merging the two sorted id lists.
    pub fn dot(&self, other: &FeatureVector) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

/// Serializable extraction settings stored alongside trained models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub feature_set: FeatureSet,
    pub max_suffix: usize,
    pub strip_punctuation: bool,
}

impl FeatureConfig {
    pub fn new(feature_set: FeatureSet) -> Self {
        Self {
            feature_set,
            max_suffix: DEFAULT_MAX_SUFFIX,
            strip_punctuation: false,
        }
    }

    pub fn extractor(&self) -> FeatureExtractor<'static> {
        FeatureExtractor {
            feature_set: self.feature_set,
            max_suffix: self.max_suffix,
            strip_punctuation: self.strip_punctuation,
            tokenizer: &WhitespaceTokenizer,
        }
    }
}

/// Turns examples into features for one feature set.
#[derive(Clone, Copy)]
pub struct FeatureExtractor<'t> {
    pub feature_set: FeatureSet,
    pub max_suffix: usize,
    /// Drop trailing punctuation before taking suffixes.
    pub strip_punctuation: bool,
    pub tokenizer: &'t dyn Tokenizer,
}

impl fmt::Debug for FeatureExtractor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeatureExtractor")
            .field("feature_set", &self.feature_set)
            .field("max_suffix", &self.max_suffix)
            .field("strip_punctuation", &self.strip_punctuation)
            .finish_non_exhaustive()
    }
}

impl FeatureExtractor<'static> {
    pub fn new(feature_set: FeatureSet) -> Self {
        Self {
            feature_set,
            max_suffix: DEFAULT_MAX_SUFFIX,
            strip_punctuation: false,
            tokenizer: &WhitespaceTokenizer,
        }
    }
}

impl<'t> FeatureExtractor<'t> {
    pub fn with_tokenizer(self, tokenizer: &'t dyn Tokenizer) -> FeatureExtractor<'t> {
        FeatureExtractor { tokenizer, ..self }
    }

    pub fn config(&self) -> FeatureConfig {
        FeatureConfig {
            feature_set: self.feature_set,
            max_suffix: self.max_suffix,
            strip_punctuation: self.strip_punctuation,
        }
    }

    /// The string suffixes are taken from, after optional normalization.
    pub fn suffix_source<'s>(&self, sentence: &'s str) -> &'s str {
        if self.strip_punctuation {
            strip_trailing_punctuation(sentence)
        } else {
            sentence
        }
    }

    /// Raw features of an example, deduplicated, in a deterministic order
    /// (suffixes shortest first, then tokens in sentence order).
    pub fn features(&self, example: &Example) -> Vec<Feature> {
        let mut out = Vec::new();
        if self.feature_set.uses_suffixes() {
            out.extend(suffix_ngrams(
                self.suffix_source(example.sentence()),
                self.max_suffix,
            ));
        }
        if self.feature_set.uses_tokens() {
            let mut seen = std::collections::HashSet::new();
            for token in example_tokens(example, self.tokenizer) {
                if seen.insert(token.clone()) {
                    out.push(Feature::token(token));
                }
            }
        }
        out
    }

    /// Extract against a vocabulary. When `frozen`, unseen features are
    /// dropped and the vocabulary is left untouched; otherwise they are
    /// interned.
    pub fn extract(&self, example: &Example, vocab: &mut Vocabulary, frozen: bool) -> FeatureVector {
        let features = self.features(example);
        if frozen {
            FeatureVector::from_ids(features.iter().filter_map(|f| vocab.get(f)))
        } else {
            FeatureVector::from_ids(features.into_iter().map(|f| vocab.intern(f)))
        }
    }

    pub fn extract_frozen(&self, example: &Example, vocab: &Vocabulary) -> FeatureVector {
        FeatureVector::from_ids(self.features(example).iter().filter_map(|f| vocab.get(f)))
    }

    /// Build a vocabulary from `examples` (first-appearance order) and return
    /// it with the examples' vectors.
    pub fn fit<'e>(
        &self,
        examples: impl IntoIterator<Item = &'e Example>,
    ) -> (Vocabulary, Vec<FeatureVector>) {
        let mut vocab = Vocabulary::new();
        let vectors = examples
            .into_iter()
            .map(|ex| self.extract(ex, &mut vocab, false))
            .collect();
        (vocab, vectors)
    }
}
