use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::smo::{BinarySvmModel, SvmParams};
use crate::corpus::Example;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureExtractor, FeatureVector, Vocabulary};
use crate::labels::LabelSet;

/// One binary decision between labels `first < second`; positive decision
/// values vote for `first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClassifier {
    Trained(BinarySvmModel),
    /// At most one of the two labels had training examples; always votes
    /// for `winner`.
    Degenerate { winner: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub first: u32,
    pub second: u32,
    pub classifier: PairClassifier,
}

impl Pair {
    pub fn winner(&self, x: &FeatureVector) -> u32 {
        match &self.classifier {
            PairClassifier::Trained(model) => {
                if model.decide(x).1 == 1 {
                    self.first
                } else {
                    self.second
                }
            }
            PairClassifier::Degenerate { winner } => *winner,
        }
    }
}

/// One-versus-one multiclass SVM: `N(N−1)/2` binary classifiers, each
/// trained on the examples of its two labels, combined by voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseModel {
    features: FeatureConfig,
    params: SvmParams,
    vocab: Vocabulary,
    labels: LabelSet,
    pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwisePrediction {
    pub label: String,
    pub votes: Vec<usize>,
}

impl PairwiseModel {
    pub fn train<'e>(
        examples: impl IntoIterator<Item = &'e Example>,
        extractor: &FeatureExtractor<'_>,
        params: &SvmParams,
    ) -> Result<Self> {
        Self::train_with_labels(examples, std::iter::empty(), extractor, params)
    }

    /// Like [`train`](Self::train) but over a label universe that may include
    /// labels absent from `examples` (e.g. inside a cross-validation fold).
    /// Pairs touching an absent label are degenerate.
    pub fn train_with_labels<'e, 'u>(
        examples: impl IntoIterator<Item = &'e Example>,
        universe: impl IntoIterator<Item = &'u str>,
        extractor: &FeatureExtractor<'_>,
        params: &SvmParams,
    ) -> Result<Self> {
        let examples: Vec<&Example> = examples.into_iter().collect();
        let labels = LabelSet::with_universe(universe, examples.iter().map(|&e| e.label()));
        if labels.len() < 2 {
            return Err(Error::training(format!(
                "pairwise SVM needs at least two labels, found {}",
                labels.len()
            )));
        }
        let (vocab, vectors) = extractor.fit(examples.iter().copied());
        let targets: Vec<u32> = examples
            .iter()
            .map(|e| labels.index(e.label()).expect("label registered"))
            .collect();

        let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
        for (i, &t) in targets.iter().enumerate() {
            by_label[t as usize].push(i);
        }

        let n = labels.len() as u32;
        let pair_ids: Vec<(u32, u32)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();

        let pairs = pair_ids
            .par_iter()
            .map(|&(first, second)| {
                let pos = &by_label[first as usize];
                let neg = &by_label[second as usize];
                let classifier = if pos.is_empty() || neg.is_empty() {
                    let winner = match (pos.is_empty(), neg.is_empty()) {
                        (false, true) => first,
                        (true, false) => second,
                        _ if labels.prefers(second as usize, first as usize) => second,
                        _ => first,
                    };
                    PairClassifier::Degenerate { winner }
                } else {
                    // Merge back into training order.
                    let mut members: Vec<usize> = pos.iter().chain(neg).copied().collect();
                    members.sort_unstable();
                    let xs: Vec<&FeatureVector> = members.iter().map(|&i| &vectors[i]).collect();
                    let ys: Vec<i8> = members
                        .iter()
                        .map(|&i| if targets[i] == first { 1 } else { -1 })
                        .collect();
                    PairClassifier::Trained(BinarySvmModel::train(&xs, &ys, params).map_err(
                        |e| match e {
                            Error::Training { message, best_dual } => Error::Training {
                                message: format!(
                                    "{} vs {}: {message}",
                                    labels.name(first as usize),
                                    labels.name(second as usize)
                                ),
                                best_dual,
                            },
                            other => other,
                        },
                    )?)
                };
                Ok(Pair {
                    first,
                    second,
                    classifier,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            features: extractor.config(),
            params: *params,
            vocab,
            labels,
            pairs,
        })
    }

    #[cfg(test)]
    pub(crate) fn from_parts(labels: LabelSet, pairs: Vec<Pair>) -> Self {
        Self {
            features: FeatureConfig::new(crate::features::FeatureSet::Tokens),
            params: SvmParams::default(),
            vocab: Vocabulary::new(),
            labels,
            pairs,
        }
    }

    pub fn feature_config(&self) -> FeatureConfig {
        self.features
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn vectorize(&self, example: &Example) -> FeatureVector {
        self.features.extractor().extract_frozen(example, &self.vocab)
    }

    pub fn votes(&self, x: &FeatureVector) -> Vec<usize> {
        let mut votes = vec![0; self.labels.len()];
        for pair in &self.pairs {
            votes[pair.winner(x) as usize] += 1;
        }
        votes
    }

    pub fn classify(&self, x: &FeatureVector) -> PairwisePrediction {
        let votes = self.votes(x);
        let best = self.labels.argmax(&votes);
        PairwisePrediction {
            label: self.labels.name(best).to_owned(),
            votes,
        }
    }

    pub fn classify_example(&self, example: &Example) -> PairwisePrediction {
        self.classify(&self.vectorize(example))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureSet;

    fn ex(label: &str, tokens: &str) -> Example {
        Example::new(label, tokens, None).unwrap()
    }

    fn tokens() -> FeatureExtractor<'static> {
        FeatureExtractor::new(FeatureSet::Tokens)
    }

    fn three_label_corpus() -> Vec<Example> {
        vec![
            ex("a", "x1 p"),
            ex("a", "x1 q"),
            ex("b", "x2 p"),
            ex("b", "x2 r"),
            ex("c", "x3 q"),
            ex("c", "x3 r"),
        ]
    }

    #[test]
    fn classifier_count() {
        let model = PairwiseModel::train(&three_label_corpus(), &tokens(), &SvmParams::default())
            .unwrap();
        assert_eq!(model.pairs().len(), 3);
        for q in ["x1", "x2", "x3"] {
            let p = model.classify_example(&ex("?", q));
            assert_eq!(p.votes.iter().sum::<usize>(), 3);
        }
        assert_eq!(model.classify_example(&ex("?", "x1")).label, "a");
        assert_eq!(model.classify_example(&ex("?", "x2")).label, "b");
        assert_eq!(model.classify_example(&ex("?", "x3")).label, "c");
    }

    #[test]
    fn two_labels_reduce_to_binary() {
        let exs = vec![ex("neg", "n1"), ex("pos", "p1"), ex("neg", "n2"), ex("pos", "p1 n2")];
        let model = PairwiseModel::train(&exs, &tokens(), &SvmParams::default()).unwrap();
        assert_eq!(model.pairs().len(), 1);
        let PairClassifier::Trained(binary) = &model.pairs()[0].classifier else {
            panic!("expected a trained pair");
        };
        for q in ["n1", "p1", "n2", "p1 n2", "zzz", "n1 p1"] {
            let fv = model.vectorize(&ex("?", q));
            let expected = if binary.decide(&fv).1 == 1 { "neg" } else { "pos" };
            assert_eq!(model.classify(&fv).label, expected, "{q}");
        }
    }

    #[test]
    fn cyclic_tie_goes_to_most_frequent() {
        let labels = LabelSet::from_labels(["a", "b", "b", "c"]);
        let degenerate = |first, second, winner| Pair {
            first,
            second,
            classifier: PairClassifier::Degenerate { winner },
        };
        // a beats b, b beats c, c beats a
        let model = PairwiseModel::from_parts(
            labels,
            vec![degenerate(0, 1, 0), degenerate(1, 2, 1), degenerate(0, 2, 2)],
        );
        let p = model.classify(&FeatureVector::default());
        assert_eq!(p.votes, [1, 1, 1]);
        assert_eq!(p.label, "b");
    }

    #[test]
    fn voting_ignores_classifier_order() {
        let mut model = PairwiseModel::train(&three_label_corpus(), &tokens(), &SvmParams::default())
            .unwrap();
        let queries: Vec<FeatureVector> = ["x1 r", "p q", "x2 x3", "r"]
            .iter()
            .map(|q| model.vectorize(&ex("?", q)))
            .collect();
        let before: Vec<String> = queries.iter().map(|q| model.classify(q).label).collect();
        model.pairs.reverse();
        model.pairs.swap(0, 1);
        let after: Vec<String> = queries.iter().map(|q| model.classify(q).label).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn absent_labels_give_degenerate_pairs() {
        let exs = vec![ex("a", "x"), ex("b", "y")];
        let model = PairwiseModel::train_with_labels(
            &exs,
            ["a", "b", "c"],
            &tokens(),
            &SvmParams::default(),
        )
        .unwrap();
        assert_eq!(model.pairs().len(), 3);
        let degenerate: Vec<u32> = model
            .pairs()
            .iter()
            .filter_map(|p| match p.classifier {
                PairClassifier::Degenerate { winner } => Some(winner),
                _ => None,
            })
            .collect();
        assert_eq!(degenerate, [0, 1]);
        assert_ne!(model.classify_example(&ex("?", "x")).label, "c");
    }

    #[test]
    fn single_label_is_an_error() {
        let exs = vec![ex("a", "x"), ex("a", "y")];
        assert!(matches!(
            PairwiseModel::train(&exs, &tokens(), &SvmParams::default()),
            Err(Error::Training { .. })
        ));
    }

    #[test]
    fn forty_six_labels_give_1035_pairs() {
        let exs: Vec<Example> = (0..46).map(|i| ex(&format!("l{i:02}"), &format!("t{i}"))).collect();
        let model = PairwiseModel::train(&exs, &tokens(), &SvmParams::default()).unwrap();
        assert_eq!(model.pairs().len(), 46 * 45 / 2);
    }
}
