//! Decision-list classification.
//!
//! For every feature `f` seen in training the model keeps the occurrence
//! rate `p̃(a|f)` of each label `a` among training examples containing `f`.
//! To classify, the single present feature with the highest `max_a p̃(a|f)`
//! is chosen and its most probable label returned.
//!
//! Ties between features go to the one seen more often in training, then to
//! the lexicographically smaller feature text. Ties between labels use the
//! shared frequency/name rule of [`LabelSet`]. Inputs sharing no feature
//! with the model fall back to the global majority label.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureConfig, FeatureExtractor, FeatureVector, Vocabulary};
use crate::labels::LabelSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntry {
    /// Number of training examples containing the feature.
    pub total: u64,
    /// `(label index, count)` pairs with positive counts, by label index.
    pub counts: Vec<(u32, u64)>,
    /// `p̃(label|feature)`, parallel to `counts`.
    pub conditionals: Vec<f64>,
    /// Position in `counts` of the feature's best label.
    best: usize,
}

impl FeatureEntry {
    pub fn best_label(&self) -> u32 {
        self.counts[self.best].0
    }

    pub fn best_count(&self) -> u64 {
        self.counts[self.best].1
    }

    pub fn best_probability(&self) -> f64 {
        self.conditionals[self.best]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionListModel {
    features: FeatureConfig,
    vocab: Vocabulary,
    labels: LabelSet,
    /// Indexed by feature id.
    entries: Vec<FeatureEntry>,
}

/// The single rule behind a decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub feature_id: u32,
    pub feature: Feature,
    pub probability: f64,
    pub feature_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeclistPrediction {
    pub label: String,
    /// `None` when the input shared no feature with the model.
    pub rule: Option<Rule>,
}

impl DeclistPrediction {
    pub fn is_fallback(&self) -> bool {
        self.rule.is_none()
    }
}

impl DecisionListModel {
    pub fn train<'e>(
        examples: impl IntoIterator<Item = &'e Example>,
        extractor: &FeatureExtractor<'_>,
    ) -> Result<Self> {
        let examples: Vec<&Example> = examples.into_iter().collect();
        if examples.is_empty() {
            return Err(Error::Model("decision list needs at least one training example".into()));
        }
        let labels = LabelSet::from_labels(examples.iter().map(|e| e.label()));
        let (vocab, vectors) = extractor.fit(examples.iter().copied());

        let mut raw: Vec<Vec<u64>> = vec![vec![0; labels.len()]; vocab.len()];
        for (ex, fv) in examples.iter().zip(&vectors) {
            let label = labels.index(ex.label()).expect("label registered") as usize;
            for &id in fv.ids() {
                raw[id as usize][label] += 1;
            }
        }

        let entries = raw
            .into_iter()
            .map(|per_label| {
                let total: u64 = per_label.iter().sum();
                let counts: Vec<(u32, u64)> = per_label
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(l, &c)| (l as u32, c))
                    .collect();
                let conditionals = counts.iter().map(|&(_, c)| c as f64 / total as f64).collect();
                let best_label = labels.argmax(&per_label) as u32;
                let best = counts
                    .iter()
                    .position(|&(l, _)| l == best_label)
                    .expect("best label has a positive count");
                FeatureEntry {
                    total,
                    counts,
                    conditionals,
                    best,
                }
            })
            .collect();

        Ok(Self {
            features: extractor.config(),
            vocab,
            labels,
            entries,
        })
    }

    pub fn feature_config(&self) -> FeatureConfig {
        self.features
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn entry(&self, feature: &Feature) -> Option<&FeatureEntry> {
        self.vocab.get(feature).map(|id| &self.entries[id as usize])
    }

    /// `p̃(label|feature)`, zero for unseen pairs.
    pub fn conditional(&self, feature: &Feature, label: &str) -> f64 {
        let (Some(entry), Some(label)) = (self.entry(feature), self.labels.index(label)) else {
            return 0.0;
        };
        entry
            .counts
            .iter()
            .position(|&(l, _)| l == label)
            .map_or(0.0, |i| entry.conditionals[i])
    }

    pub fn vectorize(&self, example: &Example) -> FeatureVector {
        self.features.extractor().extract_frozen(example, &self.vocab)
    }

    /// Ordering of candidate rules: `Greater` means `a` beats `b`.
    fn compare_rules(&self, a: u32, b: u32) -> Ordering {
        let (ea, eb) = (&self.entries[a as usize], &self.entries[b as usize]);
        // best_count / total compared exactly by cross-multiplication.
        let pa = ea.best_count() as u128 * eb.total as u128;
        let pb = eb.best_count() as u128 * ea.total as u128;
        pa.cmp(&pb)
            .then(ea.total.cmp(&eb.total))
            .then_with(|| {
                let (fa, fb) = (self.vocab.feature(a), self.vocab.feature(b));
                (&fb.text, fb.kind).cmp(&(&fa.text, fa.kind))
            })
    }

    pub fn classify(&self, fv: &FeatureVector) -> DeclistPrediction {
        let best = fv
            .ids()
            .iter()
            .copied()
            .filter(|&id| (id as usize) < self.entries.len())
            .reduce(|best, id| {
                if self.compare_rules(id, best) == Ordering::Greater {
                    id
                } else {
                    best
                }
            });
        match best {
            Some(id) => {
                let entry = &self.entries[id as usize];
                DeclistPrediction {
                    label: self.labels.name(entry.best_label() as usize).to_owned(),
                    rule: Some(Rule {
                        feature_id: id,
                        feature: self.vocab.feature(id).clone(),
                        probability: entry.best_probability(),
                        feature_count: entry.total,
                    }),
                }
            }
            None => DeclistPrediction {
                label: self.labels.name(self.labels.majority()).to_owned(),
                rule: None,
            },
        }
    }

    pub fn classify_example(&self, example: &Example) -> DeclistPrediction {
        self.classify(&self.vectorize(example))
    }
}
