//! Cross-validation, the suffix baseline, and significance tests.

mod cv;
mod report;
mod stats;

pub use cv::{
    closed_test, cross_domain_eval, cross_validate, evaluate_model, train_test, EvalMode, FoldScore, Prediction,
    PrecisionReport,
};
pub use report::{format_table, jsonl_records, TableCell, TableRow};
pub use stats::{
    binomial_upper_tail, category_distribution, effective_features, sign_test,
    sign_test_reports, EffectiveFeature, SignTestResult, EXACT_SIGN_TEST_LIMIT,
};

/// Past if the sentence ends in `た`, present otherwise.
pub fn baseline_classify(sentence: &str) -> &'static str {
    if sentence.ends_with('た') {
        "past"
    } else {
        "present"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline() {
        assert_eq!(baseline_classify("走った"), "past");
        assert_eq!(baseline_classify("走る"), "present");
        assert_eq!(baseline_classify(""), "present");
        assert_eq!(baseline_classify("た。"), "present");
    }
}
