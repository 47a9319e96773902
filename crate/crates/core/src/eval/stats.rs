use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use super::cv::PrecisionReport;
use crate::corpus::{Dataset, Example};
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureExtractor};

/// Largest `n_plus + n_minus` for which the sign test sums the binomial
/// distribution exactly; above it the normal approximation is used.
pub const EXACT_SIGN_TEST_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTestResult {
    pub n_plus: u64,
    pub n_minus: u64,
    pub p_value: f64,
    pub level: f64,
    pub significant: bool,
    pub exact: bool,
}

/// `ln Σ exp(xs)` without overflow.
fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `P(X ≥ k)` for `X ~ Binomial(n, p)`, summed exactly in log space.
pub fn binomial_upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let terms = (k..=n).map(|j| ln_binomial(n, j) + j as f64 * lp + (n - j) as f64 * lq);
    log_sum_exp(terms).exp().min(1.0)
}

/// Two-sided sign test of `H0: P(+) = 1/2`. Ties are the caller's to drop.
pub fn sign_test(n_plus: u64, n_minus: u64, level: f64) -> SignTestResult {
    let n = n_plus + n_minus;
    let exact = n <= EXACT_SIGN_TEST_LIMIT;
    let p_value = if n == 0 {
        1.0
    } else if exact {
        let hi = n_plus.max(n_minus);
        (2.0 * binomial_upper_tail(hi, n, 0.5)).min(1.0)
    } else {
        let diff = n_plus.abs_diff(n_minus) as f64;
        let z = ((diff - 1.0).max(0.0)) / (n as f64).sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    SignTestResult {
        n_plus,
        n_minus,
        p_value,
        level,
        significant: p_value < level,
        exact,
    }
}

/// Sign test between two reports over the same examples: `n_plus` counts
/// examples only `a` labels correctly, `n_minus` those only `b` does.
pub fn sign_test_reports(
    a: &PrecisionReport,
    b: &PrecisionReport,
    level: f64,
) -> Result<SignTestResult> {
    if a.predictions.len() != b.predictions.len()
        || a.predictions.iter().zip(&b.predictions).any(|(x, y)| x.index != y.index)
    {
        return Err(Error::Argument(
            "reports do not cover the same examples".into(),
        ));
    }
    let (mut plus, mut minus) = (0, 0);
    for (x, y) in a.predictions.iter().zip(&b.predictions) {
        match (x.is_correct(), y.is_correct()) {
            (true, false) => plus += 1,
            (false, true) => minus += 1,
            _ => {}
        }
    }
    Ok(sign_test(plus, minus, level))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveFeature {
    pub feature: Feature,
    /// Number of examples in the flip set containing the feature.
    pub frequency: u64,
    /// Number of examples overall containing it.
    pub overall: u64,
    pub p_value: f64,
}

/// Features over-represented in `flip` relative to `all`: for each feature,
/// a one-sided exact binomial test of its count in `flip` against the rate
/// it has in `all`. Sorted by frequency in `flip`, most frequent first.
pub fn effective_features<'a>(
    flip: impl IntoIterator<Item = &'a Example>,
    all: impl IntoIterator<Item = &'a Example>,
    extractor: &FeatureExtractor<'_>,
    level: f64,
) -> Vec<EffectiveFeature> {
    fn counts<'a>(
        examples: impl IntoIterator<Item = &'a Example>,
        extractor: &FeatureExtractor<'_>,
    ) -> (u64, BTreeMap<Feature, u64>) {
        let mut n = 0;
        let mut map = BTreeMap::new();
        for example in examples {
            n += 1;
            let mut features = extractor.features(example);
            features.sort();
            features.dedup();
            for f in features {
                *map.entry(f).or_insert(0) += 1;
            }
        }
        (n, map)
    }

    let (n_flip, flip_counts) = counts(flip, extractor);
    if n_flip == 0 {
        return Vec::new();
    }
    let (n_all, all_counts) = counts(all, extractor);

    let mut selected: Vec<EffectiveFeature> = flip_counts
        .into_iter()
        .filter_map(|(feature, frequency)| {
            // A flip set outside `all` still gets a defined rate.
            let overall = all_counts.get(&feature).copied().unwrap_or(0).max(frequency);
            let rate = overall as f64 / n_all.max(n_flip) as f64;
            let p_value = binomial_upper_tail(frequency, n_flip, rate);
            (p_value < level).then_some(EffectiveFeature {
                feature,
                frequency,
                overall,
                p_value,
            })
        })
        .collect();
    selected.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then(a.p_value.total_cmp(&b.p_value))
            .then_with(|| a.feature.cmp(&b.feature))
    });
    selected
}

/// `(label, count / N)`, most frequent first, ties by label.
pub fn category_distribution(dataset: &Dataset) -> Vec<(String, f64)> {
    let n = dataset.len() as f64;
    let mut rates: Vec<(String, usize)> = dataset
        .label_counts()
        .iter()
        .map(|(label, &count)| (label.clone(), count))
        .collect();
    rates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rates.into_iter().map(|(l, c)| (l, c as f64 / n)).collect()
}
