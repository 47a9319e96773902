use std::ffi::{CStr, CString};
use std::ptr;

use tam_core::corpus::serialize_corpus;
use tam_core::synth::adverb_flip_corpus;
use tam_ffi::*;

fn corpus(n: usize) -> CString {
    CString::new(serialize_corpus(&adverb_flip_corpus(n, 0.2, 7))).unwrap()
}

fn last_error() -> String {
    let p = tam_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn parse(text: &CString) -> *mut TamDataset {
    let mut ds = ptr::null_mut();
    assert_eq!(tam_dataset_parse(text.as_ptr(), &mut ds), TamStatus::Ok);
    ds
}

unsafe fn predict(model: *const TamModel, sentence: &str, tokens: Option<&str>) -> String {
    let s = CString::new(sentence).unwrap();
    let t = tokens.map(|t| CString::new(t).unwrap());
    let mut out = ptr::null_mut();
    let status = tam_model_predict(model, s.as_ptr(), t.as_ref().map_or(ptr::null(), |t| t.as_ptr()), &mut out);
    assert_eq!(status, TamStatus::Ok);
    let label = CStr::from_ptr(out).to_str().unwrap().to_owned();
    tam_string_free(out);
    label
}

#[test]
fn train_predict_save_load() {
    unsafe {
        let ds = parse(&corpus(120));
        assert_eq!(tam_dataset_len(ds), 120);
        let params = TamTrainParams { method: TamMethod::DecisionList, ..tam_train_params_default() };
        let mut model = ptr::null_mut();
        assert_eq!(tam_model_train(ds, &params, &mut model), TamStatus::Ok);
        assert!(tam_last_error_message().is_null());

        let before = predict(model, "きっと明日は雨が降って寒くなった", Some("きっと 明日 は 雨 が 降っ て 寒く なっ た"));
        assert!(!before.is_empty());

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.json").to_str().unwrap()).unwrap();
        assert_eq!(tam_model_save(model, path.as_ptr()), TamStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(tam_model_load(path.as_ptr(), &mut back), TamStatus::Ok);
        for sentence in ["たぶん彼は来る", "ぜひ一度行ってみた", "雨"] {
            assert_eq!(predict(model, sentence, None), predict(back, sentence, None));
        }
        tam_model_free(model);
        tam_model_free(back);
        tam_dataset_free(ds);
    }
}

#[test]
fn null_and_bad_arguments_are_reported() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(tam_dataset_parse(ptr::null(), &mut ds), TamStatus::NullArgument);
        assert!(ds.is_null());
        assert!(last_error().contains("text"));

        let bad = CString::new("no tab here\n").unwrap();
        assert_eq!(tam_dataset_parse(bad.as_ptr(), &mut ds), TamStatus::Parse);
        assert!(ds.is_null());

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(tam_dataset_parse(invalid.as_ptr().cast(), &mut ds), TamStatus::InvalidUtf8);

        let missing = CString::new("/nonexistent/corpus.tsv").unwrap();
        assert_eq!(tam_dataset_load(missing.as_ptr(), &mut ds), TamStatus::Io);

        let ds = parse(&corpus(40));
        let mut model = ptr::null_mut();
        let knn = TamTrainParams { method: TamMethod::Knn, ..tam_train_params_default() };
        assert_eq!(tam_model_train(ds, &knn, &mut model), TamStatus::Config);
        assert!(last_error().contains("knn"));
        let fs9 = TamTrainParams { feature_set: 9, ..tam_train_params_default() };
        assert_eq!(tam_model_train(ds, &fs9, &mut model), TamStatus::Config);
        assert_eq!(tam_model_train(ptr::null(), &knn, &mut model), TamStatus::NullArgument);
        assert!(model.is_null());

        let mut precision = 0.0;
        let params = tam_train_params_default();
        assert_eq!(tam_cross_validate(ds, &params, 1, 0, &mut precision), TamStatus::Argument);

        assert_eq!(tam_model_load(missing.as_ptr(), &mut model), TamStatus::Io);
        let not_a_model = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(not_a_model.path(), "{}").unwrap();
        let p = CString::new(not_a_model.path().to_str().unwrap()).unwrap();
        assert_eq!(tam_model_load(p.as_ptr(), &mut model), TamStatus::Model);

        tam_dataset_free(ds);
        tam_dataset_free(ptr::null_mut());
        tam_model_free(ptr::null_mut());
        tam_string_free(ptr::null_mut());
        assert_eq!(tam_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn single_label_training_fails() {
    unsafe {
        let ds = parse(&CString::new("past\tした\npast\tいった\n").unwrap());
        let mut model = ptr::null_mut();
        assert_eq!(tam_model_train(ds, &tam_train_params_default(), &mut model), TamStatus::Training);
        tam_dataset_free(ds);
    }
}

#[test]
fn sign_test_matches_exact_value() {
    let mut r = TamSignTest::default();
    unsafe {
        assert_eq!(tam_sign_test(9, 1, 0.05, &mut r), TamStatus::Ok);
        assert!((r.p_value - 22.0 / 1024.0).abs() < 1e-12);
        assert!(r.significant && r.exact);
        assert_eq!(tam_sign_test(648, 427, 0.01, &mut r), TamStatus::Ok);
        assert!(r.significant && !r.exact);
        assert_eq!(tam_sign_test(1, 1, 1.5, &mut r), TamStatus::Argument);
        assert_eq!(tam_sign_test(1, 1, 0.05, ptr::null_mut()), TamStatus::NullArgument);
    }
}

#[test]
fn cross_validation_matches_core() {
    use tam_core::corpus::split_folds;
    use tam_core::eval::cross_validate;
    use tam_core::features::{FeatureConfig, FeatureSet};
    use tam_core::learner::LearnerSpec;

    let data = adverb_flip_corpus(100, 0.2, 7);
    let expected = cross_validate(
        &LearnerSpec::Knn { k: 3 },
        FeatureConfig::new(FeatureSet::Suffix),
        &data,
        &split_folds(&data, 5, 3).unwrap(),
    )
    .unwrap()
    .precision();
    unsafe {
        let ds = parse(&corpus(100));
        let params = TamTrainParams { method: TamMethod::Knn, feature_set: 2, k: 3, ..tam_train_params_default() };
        let mut precision = -1.0;
        assert_eq!(tam_cross_validate(ds, &params, 5, 3, &mut precision), TamStatus::Ok);
        assert_eq!(precision, expected);
        tam_dataset_free(ds);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/tam.h");
    for name in [
        "tam_last_error_message",
        "tam_train_params_default",
        "tam_dataset_parse",
        "tam_dataset_load",
        "tam_dataset_len",
        "tam_dataset_free",
        "tam_model_train",
        "tam_model_predict",
        "tam_model_save",
        "tam_model_load",
        "tam_model_free",
        "tam_string_free",
        "tam_sign_test",
        "tam_cross_validate",
        "TAM_STATUS_PANIC",
        "TAM_METHOD_SVM",
    ] {
        assert!(header.contains(name), "{name} missing from tam.h");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/tam.h");
    let out = match std::process::Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c", header])
        .output()
    {
        Ok(out) => out,
        Err(_) => {
            eprintln!("cc not found; skipping");
            return;
        }
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
