//! Labeled sentence corpora.
//!
//! A corpus file is UTF-8 text with one example per line:
//!
//! ```text
//! # comment
//! past<TAB>昨日来た
//! can<TAB>走れる<TAB>走れ る
//! ```
//!
//! The first field is the category label, the second the sentence, and the
//! optional third field a space-separated token list. Blank lines and lines
//! starting with `#` are skipped.

mod category;
mod folds;

pub use category::{parse_category_descriptor, Auxiliary, CategorySpec, Tense};
pub use folds::{split_folds, FoldPlan};
pub(crate) use folds::plan_for_len;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Example {
    label: String,
    sentence: String,
    tokens: Option<Vec<String>>,
}

impl Example {
    pub fn new(
        label: impl Into<String>,
        sentence: impl Into<String>,
        tokens: Option<Vec<String>>,
    ) -> Result<Self> {
        let label = label.into();
        let sentence = sentence.into();
        validate_label(&label).map_err(Error::InvalidExample)?;
        if sentence.contains(['\t', '\n', '\r']) {
            return Err(Error::InvalidExample(format!(
                "sentence {sentence:?} contains a tab or line break"
            )));
        }
        if let Some(tokens) = &tokens {
            for token in tokens {
                if token.is_empty() || token.contains(char::is_whitespace) {
                    return Err(Error::InvalidExample(format!(
                        "token {token:?} is empty or contains whitespace"
                    )));
                }
            }
        }
        Ok(Self {
            label,
            sentence,
            tokens,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sentence(&self) -> &str {
        &self.sentence
    }

    pub fn tokens(&self) -> Option<&[String]> {
        self.tokens.as_deref()
    }

    pub fn with_label(&self, label: impl Into<String>) -> Result<Self> {
        Self::new(label, self.sentence.clone(), self.tokens.clone())
    }
}

fn validate_label(label: &str) -> std::result::Result<(), String> {
    if label.trim().is_empty() {
        return Err("label is empty".into());
    }
    if label.contains(['\t', '\n', '\r']) {
        return Err(format!("label {label:?} contains a tab or line break"));
    }
    if label.starts_with('#') {
        return Err(format!("label {label:?} starts with the comment marker `#`"));
    }
    Ok(())
}

/// An ordered collection of examples together with its label inventory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    examples: Vec<Example>,
    label_counts: BTreeMap<String, usize>,
}

impl Dataset {
    pub fn new(examples: Vec<Example>) -> Self {
        let mut label_counts = BTreeMap::new();
        for example in &examples {
            *label_counts.entry(example.label.clone()).or_insert(0) += 1;
        }
        Self {
            examples,
            label_counts,
        }
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Label frequencies, keyed and iterated in lexicographic label order.
    pub fn label_counts(&self) -> &BTreeMap<String, usize> {
        &self.label_counts
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.label_counts.keys().map(String::as_str)
    }

    /// Subset of examples picked by index, in the given index order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset::new(indices.iter().map(|&i| self.examples[i].clone()).collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.examples.iter()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        parse_corpus_bytes(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serialize_corpus(self))?;
        Ok(())
    }
}

impl FromIterator<Example> for Dataset {
    fn from_iter<I: IntoIterator<Item = Example>>(iter: I) -> Self {
        Dataset::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Example;
    type IntoIter = std::slice::Iter<'a, Example>;

    fn into_iter(self) -> Self::IntoIter {
        self.examples.iter()
    }
}

pub fn parse_corpus_bytes(bytes: &[u8]) -> Result<Dataset> {
    parse_corpus(std::str::from_utf8(bytes)?)
}

pub fn parse_corpus(text: &str) -> Result<Dataset> {
    let mut examples = Vec::new();
    for (index, line) in text.split('\n').enumerate() {
        let line_no = index + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(format!(
                "expected 2 or 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let tokens = fields.get(2).map(|field| {
            field
                .split(' ')
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect::<Vec<_>>()
        });
        let example = Example::new(fields[0], fields[1], tokens).map_err(|e| match e {
            Error::InvalidExample(message) => parse_err(message),
            other => other,
        })?;
        examples.push(example);
    }
    Ok(Dataset::new(examples))
}

pub fn serialize_corpus(dataset: &Dataset) -> String {
    let mut out = String::new();
    for example in dataset {
        out.push_str(&example.label);
        out.push('\t');
        out.push_str(&example.sentence);
        if let Some(tokens) = &example.tokens {
            let _ = write!(out, "\t{}", tokens.join(" "));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_line() {
        let ds = parse_corpus("past\tきた").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.examples()[0].label(), "past");
        assert_eq!(ds.examples()[0].sentence(), "きた");
        assert_eq!(ds.examples()[0].tokens(), None);
    }

    #[test]
    fn empty_document() {
        assert!(parse_corpus("").unwrap().is_empty());
        assert!(parse_corpus("\n\n# only comments\n").unwrap().is_empty());
    }

    #[test]
    fn pre_tokenized_line() {
        let ds = parse_corpus("c\t走れる\t走れ る").unwrap();
        let ex = &ds.examples()[0];
        assert_eq!(ex.label(), "c");
        assert_eq!(ex.tokens().unwrap(), ["走れ", "る"]);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let ds = parse_corpus("# header\npast\tきた\n\npresent\tくる\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.label_counts()["past"], 1);
        assert_eq!(ds.label_counts()["present"], 1);
    }

    #[test]
    fn empty_sentence_is_legal() {
        let ds = parse_corpus("present\t").unwrap();
        assert_eq!(ds.examples()[0].sentence(), "");
    }

    #[test]
    fn wrong_field_count_names_line() {
        match parse_corpus("past\tきた\nbroken\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_corpus("a\tb\tc\td").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_label_is_rejected() {
        assert!(matches!(
            parse_corpus("ok\tx\n\tsentence").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn invalid_utf8_is_an_encoding_error() {
        assert!(matches!(
            parse_corpus_bytes(b"past\t\xff\xfe").unwrap_err(),
            Error::Encoding(_)
        ));
    }

    #[test]
    fn inventory_counts_sum_to_len() {
        let ds = parse_corpus("a\tx\nb\ty\na\tz\n").unwrap();
        assert_eq!(ds.label_counts().values().sum::<usize>(), ds.len());
        assert_eq!(ds.labels().collect::<Vec<_>>(), ["a", "b"]);
    }

    fn arb_example() -> impl Strategy<Value = Example> {
        let label = "[a-z][a-z+]{0,8}";
        let sentence = "[^\t\n\r]{0,12}";
        let tokens = prop::option::of(prop::collection::vec("[^\\s]{1,4}", 0..4));
        (label, sentence, tokens).prop_map(|(l, s, t)| Example::new(l, s, t).unwrap())
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(examples in prop::collection::vec(arb_example(), 0..20)) {
            let ds = Dataset::new(examples);
            let text = serialize_corpus(&ds);
            prop_assert_eq!(parse_corpus(&text).unwrap(), ds);
        }
    }
}
