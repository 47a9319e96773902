//! Maximum-entropy classification.
//!
//! Features are the indicator functions `g(a, b) = [f ∈ b][label = a]` for
//! every (feature, label) pair. The model is the conditional exponential
//! family
//!
//! ```text
//! p(a | b) = exp(Σ_f λ[f,a]·[f ∈ b]) / Z(b)
//! ```
//!
//! whose maximum-likelihood weights are exactly those for which model and
//! empirical feature expectations agree; among all distributions meeting
//! those constraints it is the one of maximal entropy. Weights are fitted
//! with L-BFGS on the negative log-likelihood, whose gradient *is* the
//! constraint residual `(expected − empirical) / N`, so the stopping rule
//! `max |residual| ≤ tol` checks the constraints directly.

use serde::{Deserialize, Serialize};

use crate::corpus::Example;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureExtractor, FeatureVector, Vocabulary};
use crate::labels::LabelSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxEntParams {
    /// Stop once every constraint residual, as a rate, is at most `tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Variance of an optional Gaussian prior on the weights.
    pub prior_variance: Option<f64>,
    /// Weights are kept within `±weight_clamp`.
    pub weight_clamp: f64,
}

impl Default for MaxEntParams {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iters: 1000,
            prior_variance: None,
            weight_clamp: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// No step along the search direction decreased the objective.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub iterations: usize,
    /// Largest `|expected − empirical| / N` over all (feature, label) pairs
    /// at the returned weights, including the prior term when present.
    pub residual: f64,
    pub stop: StopReason,
    /// Whether any weight hit the clamp.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntModel {
    features: FeatureConfig,
    vocab: Vocabulary,
    labels: LabelSet,
    /// Row-major `[feature][label]`.
    weights: Vec<f64>,
    info: TrainingInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntPrediction {
    pub label: String,
    /// `p(label | input)` in label-index order.
    pub distribution: Vec<f64>,
}

struct Problem<'a> {
    vectors: &'a [FeatureVector],
    targets: &'a [usize],
    n_labels: usize,
    /// Empirical counts, row-major like the weights.
    empirical: Vec<f64>,
    prior_variance: Option<f64>,
}

impl Problem<'_> {
    /// Objective and gradient, both divided by N.
    fn evaluate(&self, weights: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.vectors.len() as f64;
        let l = self.n_labels;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut nll = 0.0;
        let mut scores = vec![0.0; l];
        for (fv, &y) in self.vectors.iter().zip(self.targets) {
            let log_z = log_softmax_scores(weights, fv, l, &mut scores);
            nll += log_z - scores[y];
            for &f in fv.ids() {
                let row = &mut grad[f as usize * l..(f as usize + 1) * l];
                for (g, s) in row.iter_mut().zip(&scores) {
                    *g += (s - log_z).exp();
                }
            }
        }
        let mut value = nll;
        for ((g, e), w) in grad.iter_mut().zip(&self.empirical).zip(weights) {
            *g -= e;
            if let Some(var) = self.prior_variance {
                *g += w / var;
                value += w * w / (2.0 * var);
            }
            *g /= n;
        }
        value / n
    }
}

/// Fills `scores` with unnormalized log-probabilities and returns `log Z`.
fn log_softmax_scores(weights: &[f64], fv: &FeatureVector, l: usize, scores: &mut [f64]) -> f64 {
    scores.iter_mut().for_each(|s| *s = 0.0);
    for &f in fv.ids() {
        let row = &weights[f as usize * l..(f as usize + 1) * l];
        for (s, w) in scores.iter_mut().zip(row) {
            *s += w;
        }
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const HISTORY: usize = 10;

fn lbfgs(problem: &Problem<'_>, dim: usize, params: &MaxEntParams) -> (Vec<f64>, TrainingInfo) {
    let mut x = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut f = problem.evaluate(&x, &mut g);
    let mut history: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        std::collections::VecDeque::with_capacity(HISTORY);
    let mut clamped = false;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    let mut x_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    while iterations < params.max_iters {
        if max_abs(&g) <= params.tol {
            stop = StopReason::Converged;
            break;
        }
        iterations += 1;

        // Two-loop recursion for d = -H g.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|di| *di *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        // Backtracking line search on the Armijo condition.
        let mut step = if history.is_empty() {
            1.0 / max_abs(&g).max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let mut hit_clamp = false;
            for ((xn, xi), di) in x_new.iter_mut().zip(&x).zip(&d) {
                let v = xi + step * di;
                let c = v.clamp(-params.weight_clamp, params.weight_clamp);
                hit_clamp |= c != v;
                *xn = c;
            }
            let f_new = problem.evaluate(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f + 1e-4 * step * slope {
                accepted = Some((f_new, hit_clamp));
                break;
            }
            step *= 0.5;
        }
        let Some((f_new, hit_clamp)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        if hit_clamp && !clamped {
            log::warn!(
                "maxent: weights reached the ±{} clamp (a feature separates its label perfectly)",
                params.weight_clamp
            );
        }
        clamped |= hit_clamp;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        } else if hit_clamp {
            history.clear();
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
    }
    if stop == StopReason::MaxIterations && max_abs(&g) <= params.tol {
        stop = StopReason::Converged;
    }
    let info = TrainingInfo {
        iterations,
        residual: max_abs(&g),
        stop,
        clamped,
    };
    (x, info)
}

impl MaxEntModel {
    pub fn train<'e>(
        examples: impl IntoIterator<Item = &'e Example>,
        extractor: &FeatureExtractor<'_>,
        params: &MaxEntParams,
    ) -> Result<Self> {
        if !(params.tol > 0.0) {
            return Err(Error::Argument(format!("tol must be positive, got {}", params.tol)));
        }
        if let Some(var) = params.prior_variance {
            if !(var > 0.0) {
                return Err(Error::Argument(format!("prior variance must be positive, got {var}")));
            }
        }
        let examples: Vec<&Example> = examples.into_iter().collect();
        if examples.is_empty() {
            return Err(Error::Model("maximum entropy needs at least one training example".into()));
        }
        let labels = LabelSet::from_labels(examples.iter().map(|e| e.label()));
        let (vocab, vectors) = extractor.fit(examples.iter().copied());
        let l = labels.len();
        let targets: Vec<usize> = examples
            .iter()
            .map(|e| labels.index(e.label()).expect("label registered") as usize)
            .collect();
        let mut empirical = vec![0.0; vocab.len() * l];
        for (fv, &y) in vectors.iter().zip(&targets) {
            for &f in fv.ids() {
                empirical[f as usize * l + y] += 1.0;
            }
        }
        let problem = Problem {
            vectors: &vectors,
            targets: &targets,
            n_labels: l,
            empirical,
            prior_variance: params.prior_variance,
        };
        let (weights, info) = lbfgs(&problem, vocab.len() * l, params);
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::training("maximum entropy produced non-finite weights"));
        }
        if info.stop != StopReason::Converged {
            log::warn!(
                "maxent stopped ({:?}) after {} iterations with residual {:.3e}",
                info.stop,
                info.iterations,
                info.residual
            );
        }
        Ok(Self {
            features: extractor.config(),
            vocab,
            labels,
            weights,
            info,
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

    pub fn info(&self) -> &TrainingInfo {
        &self.info
    }

    pub fn weight(&self, feature: u32, label: usize) -> f64 {
        self.weights[feature as usize * self.labels.len() + label]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vectorize(&self, example: &Example) -> FeatureVector {
        self.features.extractor().extract_frozen(example, &self.vocab)
    }

    pub fn distribution(&self, fv: &FeatureVector) -> Vec<f64> {
        let l = self.labels.len();
        let known = FeatureVector::from_ids(
            fv.ids().iter().copied().filter(|&f| (f as usize) < self.vocab.len()),
        );
        let mut scores = vec![0.0; l];
        let log_z = log_softmax_scores(&self.weights, &known, l, &mut scores);
        scores.iter().map(|s| (s - log_z).exp()).collect()
    }

    pub fn classify(&self, fv: &FeatureVector) -> MaxEntPrediction {
        let distribution = self.distribution(fv);
        let best = self.labels.argmax(&distribution);
        MaxEntPrediction {
            label: self.labels.name(best).to_owned(),
            distribution,
        }
    }

    pub fn classify_example(&self, example: &Example) -> MaxEntPrediction {
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

    fn train(exs: &[Example]) -> MaxEntModel {
        MaxEntModel::train(exs, &FeatureExtractor::new(FeatureSet::Tokens), &MaxEntParams::default())
            .unwrap()
    }

    /// Σ_i p(a|x_i)·[f ∈ x_i] − count(f, a), divided by N, recomputed from
    /// the public prediction API.
    fn max_residual(model: &MaxEntModel, exs: &[Example]) -> f64 {
        let l = model.labels().len();
        let v = model.vocabulary().len();
        let mut diff = vec![0.0; v * l];
        for e in exs {
            let fv = model.vectorize(e);
            let p = model.distribution(&fv);
            let y = model.labels().index(e.label()).unwrap() as usize;
            for &f in fv.ids() {
                for a in 0..l {
                    diff[f as usize * l + a] += p[a];
                }
                diff[f as usize * l + y] -= 1.0;
            }
        }
        diff.iter().fold(0.0f64, |m, d| m.max(d.abs())) / exs.len() as f64
    }

    #[test]
    fn matches_empirical_conditional() {
        let exs = [ex("A", "f"), ex("A", "f"), ex("B", "f")];
        let model = train(&exs);
        assert_eq!(model.info().stop, StopReason::Converged);
        let p = model.classify_example(&ex("?", "f"));
        assert_eq!(p.label, "A");
        assert!((p.distribution[0] - 2.0 / 3.0).abs() < 1e-3);
        assert!(max_residual(&model, &exs) <= 1e-4);
    }

    #[test]
    fn no_features_gives_uniform() {
        let exs = [ex("A", ""), ex("B", ""), ex("C", "")];
        let model = train(&exs);
        let p = model.classify(&FeatureVector::default());
        for v in &p.distribution {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(model.info().iterations, 0);
        assert_eq!(p.label, "A");
    }

    #[test]
    fn separating_features_classify_correctly() {
        let exs = [ex("A", "f1"), ex("A", "f1"), ex("B", "f2"), ex("B", "f2")];
        let model = train(&exs);
        assert_eq!(model.classify_example(&ex("?", "f1")).label, "A");
        assert_eq!(model.classify_example(&ex("?", "f2")).label, "B");
        assert!(model.weights().iter().all(|w| w.is_finite() && w.abs() <= 30.0));
        assert!(max_residual(&model, &exs) <= 1e-4);
    }

    #[test]
    fn distribution_is_normalized() {
        let exs = [ex("A", "a b"), ex("B", "b c"), ex("C", "c a"), ex("A", "a")];
        let model = train(&exs);
        for q in ["a", "b c", "a b c", "", "zzz"] {
            let sum: f64 = model.classify_example(&ex("?", q)).distribution.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn order_invariant_predictions() {
        let exs = vec![
            ex("A", "a b"),
            ex("B", "b c"),
            ex("C", "c a"),
            ex("A", "a"),
            ex("B", "b"),
            ex("A", "a c"),
        ];
        let mut reversed = exs.clone();
        reversed.reverse();
        let m1 = train(&exs);
        let m2 = train(&reversed);
        for q in ["a", "b", "c", "a b", "b c", "a c", "a b c"] {
            let p1 = m1.classify_example(&ex("?", q));
            let p2 = m2.classify_example(&ex("?", q));
            assert_eq!(p1.label, p2.label);
            for (x, y) in p1.distribution.iter().zip(&p2.distribution) {
                assert!((x - y).abs() < 1e-3, "{q}: {x} vs {y}");
            }
        }
    }

    /// Contexts {f1}, {f2}, {f1,f2} with two labels leave one free parameter
    /// once the two constraints are imposed. Sweep it and check that no
    /// feasible distribution has higher conditional entropy than the fit.
    #[test]
    fn fitted_model_has_maximal_entropy() {
        let exs = [
            ex("A", "f1"),
            ex("A", "f1"),
            ex("B", "f1"),
            ex("B", "f2"),
            ex("A", "f2"),
            ex("B", "f2"),
            ex("A", "f1 f2"),
            ex("A", "f1 f2"),
            ex("B", "f1 f2"),
        ];
        let model = train(&exs);
        let prob_a = |q: &str| model.classify_example(&ex("?", q)).distribution[0];
        let h = |p: f64| {
            if p <= 0.0 || p >= 1.0 {
                0.0
            } else {
                -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
            }
        };
        // Each context has weight 3/9.
        let entropy = |p1: f64, p2: f64, p12: f64| (h(p1) + h(p2) + h(p12)) / 3.0;
        let fitted = entropy(prob_a("f1"), prob_a("f2"), prob_a("f1 f2"));

        // Constraints (counts of label A):
        //   f1: 3·p1 + 3·p12 = 4,  f2: 3·p2 + 3·p12 = 3
        let mut best = f64::NEG_INFINITY;
        for step in 0..=2000 {
            let p12 = step as f64 / 2000.0;
            let p1 = 4.0 / 3.0 - p12;
            let p2 = 1.0 - p12;
            if (0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2) {
                best = best.max(entropy(p1, p2, p12));
            }
        }
        assert!(fitted >= best - 1e-6, "fitted {fitted} < grid {best}");
        let (p1, p2, p12) = (prob_a("f1"), prob_a("f2"), prob_a("f1 f2"));
        assert!((3.0 * p1 + 3.0 * p12 - 4.0).abs() < 1e-3);
        assert!((3.0 * p2 + 3.0 * p12 - 3.0).abs() < 1e-3);
    }

    #[test]
    fn prior_keeps_weights_small() {
        let exs = [ex("A", "f1"), ex("B", "f2")];
        let params = MaxEntParams {
            prior_variance: Some(1.0),
            ..MaxEntParams::default()
        };
        let model =
            MaxEntModel::train(&exs, &FeatureExtractor::new(FeatureSet::Tokens), &params).unwrap();
        assert_eq!(model.info().stop, StopReason::Converged);
        assert!(model.weights().iter().all(|w| w.abs() < 2.0));
        assert!(!model.info().clamped);
    }

    #[test]
    fn rejects_bad_arguments() {
        let tok = FeatureExtractor::new(FeatureSet::Tokens);
        let bad = MaxEntParams {
            tol: 0.0,
            ..MaxEntParams::default()
        };
        assert!(MaxEntModel::train(&[ex("A", "f")], &tok, &bad).is_err());
        assert!(MaxEntModel::train(&Vec::<Example>::new(), &tok, &MaxEntParams::default()).is_err());
    }
}
