use serde::{Deserialize, Serialize};

/// Sorted label inventory with training frequencies.
///
/// Every learner breaks ties between labels the same way: higher training
/// frequency first, then lexicographically smaller label. Since labels are
/// stored sorted, "lexicographically smaller" is "smaller index".
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelSet {
    names: Vec<String>,
    counts: Vec<usize>,
}

impl LabelSet {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a str>) -> Self {
        let mut map = std::collections::BTreeMap::<&str, usize>::new();
        for label in labels {
            *map.entry(label).or_insert(0) += 1;
        }
        Self {
            names: map.keys().map(|s| s.to_string()).collect(),
            counts: map.values().copied().collect(),
        }
    }

    /// Inventory over `universe` (which may contain labels with no training
    /// examples) with counts taken from `labels`.
    pub fn with_universe<'u, 'l>(
        universe: impl IntoIterator<Item = &'u str>,
        labels: impl IntoIterator<Item = &'l str>,
    ) -> Self {
        let mut map = std::collections::BTreeMap::<String, usize>::new();
        for label in universe {
            map.entry(label.to_owned()).or_insert(0);
        }
        for label in labels {
            match map.get_mut(label) {
                Some(count) => *count += 1,
                None => {
                    map.insert(label.to_owned(), 1);
                }
            }
        }
        Self {
            names: map.keys().map(|s| s.to_string()).collect(),
            counts: map.values().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, label: &str) -> Option<u32> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(label))
            .ok()
            .map(|i| i as u32)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn count(&self, index: usize) -> usize {
        self.counts[index]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// True when label `a` should win a tie against label `b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        (self.counts[a], std::cmp::Reverse(a)) > (self.counts[b], std::cmp::Reverse(b))
    }

    /// Index of the highest score, ties broken by frequency then name.
    pub fn argmax<T: PartialOrd + Copy>(&self, scores: &[T]) -> usize {
        debug_assert_eq!(scores.len(), self.len());
        let mut best = 0;
        for i in 1..scores.len() {
            if scores[i] > scores[best] || (scores[i] == scores[best] && self.prefers(i, best)) {
                best = i;
            }
        }
        best
    }

    /// The most frequent training label.
    pub fn majority(&self) -> usize {
        self.argmax(&self.counts)
    }
}
