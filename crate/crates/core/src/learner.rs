//! A uniform face over the four learners plus the suffix baseline, used by
//! the evaluation harness, the CLI and the C interface.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::declist::DecisionListModel;
use crate::error::{Error, Result};
use crate::eval::baseline_classify;
use crate::features::{FeatureConfig, FeatureSet};
use crate::knn::KnnModel;
use crate::maxent::{MaxEntModel, MaxEntParams};
use crate::svm::{PairwiseModel, SvmParams};

/// Tag written at the head of every model file.
pub const MODEL_FORMAT: &str = "tam-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum LearnerSpec {
    Knn { k: usize },
    #[serde(rename = "dlist")]
    DecisionList,
    #[serde(rename = "maxent")]
    MaxEnt { params: MaxEntParams },
    Svm { params: SvmParams },
    Baseline,
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Knn { .. } => "knn",
            LearnerSpec::DecisionList => "dlist",
            LearnerSpec::MaxEnt { .. } => "maxent",
            LearnerSpec::Svm { .. } => "svm",
            LearnerSpec::Baseline => "baseline",
        }
    }

    /// Whether the feature set matters to this learner at all.
    pub fn uses_features(&self) -> bool {
        !matches!(self, LearnerSpec::Baseline)
    }

    /// k-NN is only defined over character suffixes.
    pub fn check(&self, feature_set: FeatureSet) -> Result<()> {
        match self {
            LearnerSpec::Knn { k } => {
                if *k == 0 {
                    return Err(Error::Config("knn needs k >= 1".into()));
                }
                if feature_set != FeatureSet::Suffix {
                    return Err(Error::Config(format!(
                        "knn is only defined for feature set 2 (suffix similarity); got {feature_set}"
                    )));
                }
            }
            LearnerSpec::Svm { params } => {
                if !(params.c > 0.0) {
                    return Err(Error::Config(format!("svm needs C > 0, got {}", params.c)));
                }
                if params.degree == 0 {
                    return Err(Error::Config("svm needs d >= 1".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Short human-readable row name, e.g. `svm(d=2)` or `knn(k=3)`.
    pub fn row_label(&self) -> String {
        match self {
            LearnerSpec::Knn { k } => format!("knn(k={k})"),
            LearnerSpec::Svm { params } => format!("svm(d={})", params.degree),
            other => other.name().to_owned(),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.row_label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "data", rename_all = "lowercase")]
pub enum ModelKind {
    Knn(KnnModel),
    #[serde(rename = "dlist")]
    DecisionList(DecisionListModel),
    #[serde(rename = "maxent")]
    MaxEnt(MaxEntModel),
    Svm(PairwiseModel),
    Baseline,
}

/// A trained learner together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    learner: LearnerSpec,
    features: FeatureConfig,
    model: ModelKind,
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    format: &'a str,
    learner: &'a LearnerSpec,
    features: &'a FeatureConfig,
    model: &'a ModelKind,
}

#[derive(Deserialize)]
struct ModelFileIn {
    learner: LearnerSpec,
    features: FeatureConfig,
    model: ModelKind,
}

impl TrainedModel {
    pub fn train<'e>(
        spec: &LearnerSpec,
        examples: impl IntoIterator<Item = &'e Example>,
        features: FeatureConfig,
    ) -> Result<Self> {
        Self::train_with_labels(spec, examples, std::iter::empty(), features)
    }

    /// `universe` lists labels the SVM must know about even if `examples`
    /// lacks them; other learners ignore it.
    pub fn train_with_labels<'e, 'u>(
        spec: &LearnerSpec,
        examples: impl IntoIterator<Item = &'e Example>,
        universe: impl IntoIterator<Item = &'u str>,
        features: FeatureConfig,
    ) -> Result<Self> {
        spec.check(features.feature_set)?;
        let extractor = features.extractor();
        let model = match spec {
            LearnerSpec::Knn { k } => {
                ModelKind::Knn(KnnModel::train(examples, *k, features.strip_punctuation)?)
            }
            LearnerSpec::DecisionList => {
                ModelKind::DecisionList(DecisionListModel::train(examples, &extractor)?)
            }
            LearnerSpec::MaxEnt { params } => {
                ModelKind::MaxEnt(MaxEntModel::train(examples, &extractor, params)?)
            }
            LearnerSpec::Svm { params } => ModelKind::Svm(PairwiseModel::train_with_labels(
                examples, universe, &extractor, params,
            )?),
            LearnerSpec::Baseline => ModelKind::Baseline,
        };
        Ok(Self {
            learner: *spec,
            features,
            model,
        })
    }

    pub fn learner(&self) -> &LearnerSpec {
        &self.learner
    }

    pub fn features(&self) -> FeatureConfig {
        self.features
    }

    pub fn kind(&self) -> &ModelKind {
        &self.model
    }

    pub fn method(&self) -> &'static str {
        self.learner.name()
    }

    pub fn predict(&self, example: &Example) -> String {
        match &self.model {
            ModelKind::Knn(m) => m.classify(example.sentence()).label,
            ModelKind::DecisionList(m) => m.classify_example(example).label,
            ModelKind::MaxEnt(m) => m.classify_example(example).label,
            ModelKind::Svm(m) => m.classify_example(example).label,
            ModelKind::Baseline => baseline_classify(example.sentence()).to_owned(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFileOut {
            format: MODEL_FORMAT,
            learner: &self.learner,
            features: &self.features,
            model: &self.model,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
        }
        // Check the tag first so a foreign file gets a clear message.
        let header: Header = serde_json::from_str(text)?;
        if header.format != MODEL_FORMAT {
            return Err(Error::Model(format!(
                "unsupported model format {:?} (expected {MODEL_FORMAT:?})",
                header.format
            )));
        }
        let file: ModelFileIn = serde_json::from_str(text)?;
        if file.learner.name() != model_method(&file.model) {
            return Err(Error::Model("model data does not match its learner".into()));
        }
        Ok(Self {
            learner: file.learner,
            features: file.features,
            model: file.model,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn model_method(kind: &ModelKind) -> &'static str {
    match kind {
        ModelKind::Knn(_) => "knn",
        ModelKind::DecisionList(_) => "dlist",
        ModelKind::MaxEnt(_) => "maxent",
        ModelKind::Svm(_) => "svm",
        ModelKind::Baseline => "baseline",
    }
}
