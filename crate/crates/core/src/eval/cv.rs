use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{plan_for_len, Dataset, Example, FoldPlan};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::learner::{LearnerSpec, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Held-out folds.
    Open,
    /// Trained and tested on the same data.
    Closed,
    /// Disjoint training and test sets.
    TrainTest,
    /// Training and test sets from different sources; shared examples are
    /// held out by cross-validation.
    CrossDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldScore {
    pub fold: usize,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    /// Position in the evaluated dataset.
    pub index: usize,
    pub gold: String,
    pub predicted: String,
}

impl Prediction {
    pub fn is_correct(&self) -> bool {
        self.gold == self.predicted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub learner: LearnerSpec,
    pub features: FeatureConfig,
    pub mode: EvalMode,
    pub n_folds: Option<usize>,
    pub seed: Option<u64>,
    pub folds: Vec<FoldScore>,
    /// One record per evaluated example, ordered by index.
    pub predictions: Vec<Prediction>,
}

impl PrecisionReport {
    pub fn correct(&self) -> usize {
        self.folds.iter().map(|f| f.correct).sum()
    }

    pub fn total(&self) -> usize {
        self.folds.iter().map(|f| f.total).sum()
    }

    /// Fraction of examples labelled correctly; 0 for an empty report.
    pub fn precision(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            total => self.correct() as f64 / total as f64,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.mode == EvalMode::Closed
    }
}

fn score(fold: usize, predictions: &[Prediction]) -> FoldScore {
    FoldScore {
        fold,
        correct: predictions.iter().filter(|p| p.is_correct()).count(),
        total: predictions.len(),
    }
}

fn predict_all(model: &TrainedModel, examples: &[Example], indices: &[usize]) -> Vec<Prediction> {
    indices
        .iter()
        .map(|&i| Prediction {
            index: i,
            gold: examples[i].label().to_owned(),
            predicted: model.predict(&examples[i]),
        })
        .collect()
}

fn check_nonempty(dataset: &Dataset, what: &str) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::Argument(format!("{what} dataset is empty")));
    }
    Ok(())
}

/// Open test: for each fold, train on the rest and label the fold. Features
/// (and the vocabulary) come from the training portion only.
pub fn cross_validate(
    spec: &LearnerSpec,
    features: FeatureConfig,
    dataset: &Dataset,
    plan: &FoldPlan,
) -> Result<PrecisionReport> {
    spec.check(features.feature_set)?;
    check_nonempty(dataset, "cross-validation")?;
    if plan.assignment().len() != dataset.len() {
        return Err(Error::Argument(format!(
            "fold plan covers {} examples but the dataset has {}",
            plan.assignment().len(),
            dataset.len()
        )));
    }
    let examples = dataset.examples();
    let universe: Vec<&str> = dataset.labels().collect();

    let per_fold = (0..plan.n_folds())
        .into_par_iter()
        .map(|fold| {
            let train = plan.train_indices(fold);
            let test = plan.test_indices(fold);
            log::debug!("{spec} fold {fold}: train {} test {}", train.len(), test.len());
            let model = TrainedModel::train_with_labels(
                spec,
                train.iter().map(|&i| &examples[i]),
                universe.iter().copied(),
                features,
            )?;
            Ok(predict_all(&model, examples, &test))
        })
        .collect::<Result<Vec<_>>>()?;

    let folds = per_fold.iter().enumerate().map(|(f, p)| score(f, p)).collect();
    let mut predictions: Vec<Prediction> = per_fold.into_iter().flatten().collect();
    predictions.sort_by_key(|p| p.index);

    Ok(PrecisionReport {
        learner: *spec,
        features,
        mode: EvalMode::Open,
        n_folds: Some(plan.n_folds()),
        seed: Some(plan.seed()),
        folds,
        predictions,
    })
}

/// Closed test: train on everything, label everything.
pub fn closed_test(
    spec: &LearnerSpec,
    features: FeatureConfig,
    dataset: &Dataset,
) -> Result<PrecisionReport> {
    check_nonempty(dataset, "closed-test")?;
    let model = TrainedModel::train(spec, dataset, features)?;
    let all: Vec<usize> = (0..dataset.len()).collect();
    let predictions = predict_all(&model, dataset.examples(), &all);
    Ok(PrecisionReport {
        learner: *spec,
        features,
        mode: EvalMode::Closed,
        n_folds: None,
        seed: None,
        folds: vec![score(0, &predictions)],
        predictions,
    })
}

/// Train on `train`, label `test`.
pub fn train_test(
    spec: &LearnerSpec,
    features: FeatureConfig,
    train: &Dataset,
    test: &Dataset,
) -> Result<PrecisionReport> {
    check_nonempty(train, "training")?;
    let model = TrainedModel::train(spec, train, features)?;
    evaluate_model(&model, test)
}

/// Label `test` with an already trained model.
pub fn evaluate_model(model: &TrainedModel, test: &Dataset) -> Result<PrecisionReport> {
    check_nonempty(test, "test")?;
    let all: Vec<usize> = (0..test.len()).collect();
    let predictions = predict_all(model, test.examples(), &all);
    Ok(PrecisionReport {
        learner: *model.learner(),
        features: model.features(),
        mode: EvalMode::TrainTest,
        n_folds: None,
        seed: None,
        folds: vec![score(0, &predictions)],
        predictions,
    })
}

/// Train on one dataset and label another. Test examples that also occur in
/// `train` would be scored closed, so they are split into `n_folds` folds
/// (fewer if there are fewer of them) and each fold is labelled by a model
/// trained on `train` minus every copy of that fold's examples. The remaining
/// test examples are labelled by a model trained on all of `train`.
///
/// Fold 0 of the report is the non-overlapping part; folds 1.. are the
/// overlap folds.
pub fn cross_domain_eval(
    spec: &LearnerSpec,
    features: FeatureConfig,
    train: &Dataset,
    test: &Dataset,
    n_folds: usize,
    seed: u64,
) -> Result<PrecisionReport> {
    spec.check(features.feature_set)?;
    check_nonempty(train, "training")?;
    check_nonempty(test, "test")?;
    if n_folds < 2 {
        return Err(Error::Argument(format!("need at least 2 folds, got {n_folds}")));
    }
    let in_train: HashSet<&Example> = train.iter().collect();
    let (overlap, fresh): (Vec<usize>, Vec<usize>) =
        (0..test.len()).partition(|&i| in_train.contains(&test.examples()[i]));
    log::info!(
        "cross-domain: {} test examples, {} shared with training",
        test.len(),
        overlap.len()
    );

    // Overlap fold plans need at least two members; a single shared example
    // forms a fold of its own.
    let overlap_folds: Vec<Vec<usize>> = match overlap.len() {
        0 => Vec::new(),
        1 => vec![overlap.clone()],
        len => {
            let plan = plan_for_len(len, n_folds.min(len), seed)?;
            (0..plan.n_folds())
                .map(|f| plan.test_indices(f).into_iter().map(|j| overlap[j]).collect())
                .collect()
        }
    };

    let mut jobs: Vec<Vec<usize>> = vec![fresh];
    jobs.extend(overlap_folds);

    let per_job = jobs
        .par_iter()
        .enumerate()
        .map(|(job, held)| {
            if held.is_empty() {
                return Ok(Vec::new());
            }
            let model = if job == 0 {
                TrainedModel::train(spec, train, features)?
            } else {
                let held_out: HashSet<&Example> = held.iter().map(|&i| &test.examples()[i]).collect();
                let remaining: Vec<&Example> =
                    train.iter().filter(|e| !held_out.contains(e)).collect();
                if remaining.is_empty() {
                    return Err(Error::Argument(
                        "holding out the shared examples leaves no training data".into(),
                    ));
                }
                TrainedModel::train(spec, remaining, features)?
            };
            Ok(predict_all(&model, test.examples(), held))
        })
        .collect::<Result<Vec<_>>>()?;

    let folds = per_job.iter().enumerate().map(|(f, p)| score(f, p)).collect();
    let mut predictions: Vec<Prediction> = per_job.into_iter().flatten().collect();
    predictions.sort_by_key(|p| p.index);

    Ok(PrecisionReport {
        learner: *spec,
        features,
        mode: EvalMode::CrossDomain,
        n_folds: Some(n_folds),
        seed: Some(seed),
        folds,
        predictions,
    })
}
