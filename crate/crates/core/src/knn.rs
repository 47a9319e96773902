//! k-nearest-neighborhood classification over sentence-final character
//! matches.
//!
//! The similarity of two sentences is the length of their longest common
//! character suffix, capped at [`MAX_SIMILARITY`]. Every training example
//! whose similarity ties the k-th best joins the vote, so the voting set can
//! exceed `k`.

use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::error::{Error, Result};
use crate::features::strip_trailing_punctuation;
use crate::labels::LabelSet;

pub const MAX_SIMILARITY: usize = 10;

pub fn similarity(a: &str, b: &str) -> usize {
    a.chars()
        .rev()
        .zip(b.chars().rev())
        .take(MAX_SIMILARITY)
        .take_while(|(x, y)| x == y)
        .count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    strip_punctuation: bool,
    labels: LabelSet,
    /// Last `MAX_SIMILARITY` characters of each training sentence, reversed.
    tails: Vec<String>,
    targets: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnPrediction {
    pub label: String,
    /// Number of training examples that voted.
    pub voters: usize,
    /// Similarity of the k-th neighbour; every example at or above it voted.
    pub threshold: usize,
}

impl KnnModel {
    pub fn train<'e>(
        examples: impl IntoIterator<Item = &'e Example>,
        k: usize,
        strip_punctuation: bool,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("k must be at least 1".into()));
        }
        let examples: Vec<&Example> = examples.into_iter().collect();
        if examples.is_empty() {
            return Err(Error::Model("k-NN needs at least one training example".into()));
        }
        let labels = LabelSet::from_labels(examples.iter().map(|e| e.label()));
        let mut tails = Vec::with_capacity(examples.len());
        let mut targets = Vec::with_capacity(examples.len());
        for ex in examples {
            let source = normalize(ex.sentence(), strip_punctuation);
            tails.push(source.chars().rev().take(MAX_SIMILARITY).collect());
            targets.push(labels.index(ex.label()).expect("label was just registered"));
        }
        Ok(Self {
            k,
            strip_punctuation,
            labels,
            tails,
            targets,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    /// Similarity of `sentence` to every training example, in training order.
    pub fn similarities(&self, sentence: &str) -> Vec<usize> {
        let query: Vec<char> = normalize(sentence, self.strip_punctuation)
            .chars()
            .rev()
            .take(MAX_SIMILARITY)
            .collect();
        self.tails
            .iter()
            .map(|tail| {
                tail.chars()
                    .zip(&query)
                    .take_while(|(a, b)| a == *b)
                    .count()
            })
            .collect()
    }

    pub fn classify(&self, sentence: &str) -> KnnPrediction {
        let sims = self.similarities(sentence);

        // Similarities are small integers, so the k-th best is found by
        // walking a histogram from the top.
        let mut histogram = [0usize; MAX_SIMILARITY + 1];
        for &s in &sims {
            histogram[s] += 1;
        }
        let mut threshold = 0;
        let mut seen = 0;
        for s in (0..=MAX_SIMILARITY).rev() {
            seen += histogram[s];
            if seen >= self.k {
                threshold = s;
                break;
            }
        }

        let mut votes = vec![0usize; self.labels.len()];
        let mut voters = 0;
        for (i, &s) in sims.iter().enumerate() {
            if s >= threshold {
                votes[self.targets[i] as usize] += 1;
                voters += 1;
            }
        }
        let winner = self.labels.argmax(&votes);
        KnnPrediction {
            label: self.labels.name(winner).to_owned(),
            voters,
            threshold,
        }
    }
}

fn normalize(sentence: &str, strip_punctuation: bool) -> &str {
    if strip_punctuation {
        strip_trailing_punctuation(sentence)
    } else {
        sentence
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn examples(pairs: &[(&str, &str)]) -> Vec<Example> {
        pairs
            .iter()
            .map(|(l, s)| Example::new(*l, *s, None).unwrap())
            .collect()
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity("しない", "こない"), 2);
        assert_eq!(similarity("abcd", "abcd"), 4);
        let long = "abcdefghijklmno";
        assert_eq!(similarity(long, long), 10);
        assert_eq!(similarity("abc", "xyz"), 0);
        assert_eq!(similarity("", "abc"), 0);
    }

    #[test]
    fn exact_match_nearest() {
        let exs = examples(&[("past", "来た"), ("present", "来る")]);
        let model = KnnModel::train(&exs, 1, false).unwrap();
        assert_eq!(model.classify("来た").label, "past");
        assert_eq!(model.classify("来た").voters, 1);
    }

    #[test]
    fn five_way_tie_all_vote() {
        // Five examples all sharing a 2-character suffix with the query; the
        // three `b` examples outvote the two `a` ones even though k = 3
        // would have admitted only the first three in training order.
        let exs = examples(&[
            ("a", "xxた"),
            ("a", "yyた"),
            ("b", "zzた"),
            ("b", "wwた"),
            ("b", "vvた"),
            ("c", "る"),
        ]);
        let model = KnnModel::train(&exs, 3, false).unwrap();
        let p = model.classify("qqた");
        assert_eq!(p.voters, 5);
        assert_eq!(p.threshold, 1);
        assert_eq!(p.label, "b");
    }

    #[test]
    fn zero_similarity_falls_back_to_majority() {
        let exs = examples(&[("a", "x1"), ("b", "x2"), ("b", "x3"), ("c", "x4")]);
        let model = KnnModel::train(&exs, 1, false).unwrap();
        let p = model.classify("zzz");
        assert_eq!(p.label, "b");
        assert_eq!(p.voters, 4);
    }

    #[test]
    fn vote_tie_breaks_on_frequency_then_name() {
        // Query matches one `a` and one `b` equally; `b` is more frequent
        // in training overall.
        let exs = examples(&[("a", "pた"), ("b", "qた"), ("b", "る"), ("c", "ぬ")]);
        let model = KnnModel::train(&exs, 2, false).unwrap();
        assert_eq!(model.classify("rた").label, "b");

        let exs = examples(&[("b", "pた"), ("a", "qた")]);
        let model = KnnModel::train(&exs, 2, false).unwrap();
        assert_eq!(model.classify("rた").label, "a");
    }

    #[test]
    fn rejects_empty_and_zero_k() {
        assert!(matches!(
            KnnModel::train(&Vec::<Example>::new(), 1, false),
            Err(Error::Model(_))
        ));
        let exs = examples(&[("a", "x")]);
        assert!(matches!(KnnModel::train(&exs, 0, false), Err(Error::Argument(_))));
    }

    #[test]
    fn similarities_match_free_function() {
        let exs = examples(&[("a", "走っていた"), ("b", "いた"), ("c", "abcdefghijklmn")]);
        let model = KnnModel::train(&exs, 1, false).unwrap();
        for q in ["ていた", "zzabcdefghijklmn", ""] {
            let expected: Vec<usize> = exs.iter().map(|e| similarity(e.sentence(), q)).collect();
            assert_eq!(model.similarities(q), expected);
        }
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(a in "[abc]{0,14}", b in "[abc]{0,14}") {
            let s = similarity(&a, &b);
            prop_assert_eq!(s, similarity(&b, &a));
            prop_assert!(s <= 10.min(a.chars().count()).min(b.chars().count()));
        }

        #[test]
        fn voting_set_at_least_k(
            sentences in prop::collection::vec(("[ab]", "[xyz]{0,4}"), 1..30),
            k in 1usize..8,
            query in "[xyz]{0,4}",
        ) {
            let exs: Vec<Example> = sentences
                .iter()
                .map(|(l, s)| Example::new(l.as_str(), s.as_str(), None).unwrap())
                .collect();
            let model = KnnModel::train(&exs, k, false).unwrap();
            let p = model.classify(&query);
            let sims = model.similarities(&query);
            prop_assert!(p.voters >= k.min(exs.len()));
            // More than k voters only when the k-th similarity is tied.
            if p.voters > k {
                let mut sorted = sims.clone();
                sorted.sort_unstable_by(|a, b| b.cmp(a));
                prop_assert_eq!(sorted[k - 1], sorted[k]);
            }
        }
    }
}
