use tam_core::corpus::{parse_corpus, serialize_corpus, split_folds, Dataset};
use tam_core::eval::{
    baseline_classify, category_distribution, closed_test, cross_domain_eval, cross_validate,
    sign_test_reports,
};
use tam_core::features::{FeatureConfig, FeatureSet};
use tam_core::learner::{LearnerSpec, TrainedModel};
use tam_core::maxent::MaxEntParams;
use tam_core::svm::SvmParams;
use tam_core::synth::{adverb_flip_corpus, domain_pair, table_corpus};

#[test]
fn corpus_text_round_trip_preserves_experiments() {
    let data = adverb_flip_corpus(150, 0.2, 21);
    let back = parse_corpus(&serialize_corpus(&data)).unwrap();
    assert_eq!(data, back);
    let plan = split_folds(&data, 5, 0).unwrap();
    let spec = LearnerSpec::DecisionList;
    let fc = FeatureConfig::new(FeatureSet::Combined);
    assert_eq!(
        cross_validate(&spec, fc, &data, &plan).unwrap(),
        cross_validate(&spec, fc, &back, &plan).unwrap()
    );
}

#[test]
fn baseline_precision_is_known_by_construction() {
    let data = table_corpus(2000, 22);
    let report = closed_test(&LearnerSpec::Baseline, FeatureConfig::new(FeatureSet::Combined), &data).unwrap();
    let rates = category_distribution(&data);
    let rate = |l: &str| rates.iter().find(|(x, _)| x == l).unwrap().1;
    assert!((report.precision() - (rate("past") + rate("present"))).abs() < 1e-12);
    assert_eq!(baseline_classify("食べた"), "past");
}

#[test]
fn same_domain_beats_cross_domain() {
    let (a, b) = domain_pair(300, 23);
    let spec = LearnerSpec::Svm { params: SvmParams::with_degree(1) };
    let fc = FeatureConfig::new(FeatureSet::Combined);
    let same = cross_validate(&spec, fc, &b, &split_folds(&b, 10, 0).unwrap()).unwrap();
    let cross = cross_domain_eval(&spec, fc, &a, &b, 10, 0).unwrap();
    assert!(same.precision() > cross.precision());
    assert_eq!(cross.total(), b.len());
}

#[test]
fn cross_domain_with_test_inside_train_is_all_held_out() {
    let data = adverb_flip_corpus(120, 0.2, 24);
    let test: Dataset = data.select(&(0..40).collect::<Vec<_>>());
    let spec = LearnerSpec::MaxEnt { params: MaxEntParams::default() };
    let fc = FeatureConfig::new(FeatureSet::Combined);
    let report = cross_domain_eval(&spec, fc, &data, &test, 10, 0).unwrap();
    assert_eq!(report.folds[0].total, 0);
    assert_eq!(report.total(), 40);
}

#[test]
fn sign_test_between_feature_sets() {
    let data = adverb_flip_corpus(400, 0.2, 25);
    let plan = split_folds(&data, 10, 0).unwrap();
    let spec = LearnerSpec::Svm { params: SvmParams::with_degree(1) };
    let fs1 = cross_validate(&spec, FeatureConfig::new(FeatureSet::Combined), &data, &plan).unwrap();
    let fs2 = cross_validate(&spec, FeatureConfig::new(FeatureSet::Suffix), &data, &plan).unwrap();
    let r = sign_test_reports(&fs1, &fs2, 0.01).unwrap();
    assert!(r.n_plus > r.n_minus);
    assert!(r.significant);
}

#[test]
fn saved_models_predict_identically() {
    let dir = tempfile::tempdir().unwrap();
    let data = adverb_flip_corpus(120, 0.2, 26);
    let specs = [
        (LearnerSpec::Knn { k: 3 }, FeatureSet::Suffix),
        (LearnerSpec::DecisionList, FeatureSet::Tokens),
        (LearnerSpec::MaxEnt { params: MaxEntParams::default() }, FeatureSet::Combined),
        (LearnerSpec::Svm { params: SvmParams::with_degree(2) }, FeatureSet::Combined),
    ];
    for (i, (spec, fs)) in specs.iter().enumerate() {
        let model = TrainedModel::train(spec, &data, FeatureConfig::new(*fs)).unwrap();
        let file = dir.path().join(format!("{i}.json"));
        model.save(&file).unwrap();
        let back = TrainedModel::load(&file).unwrap();
        assert_eq!(back.learner(), spec);
        for e in &data {
            assert_eq!(model.predict(e), back.predict(e));
        }
    }
}
