//! C interface to `tam-core`.
//!
//! Datasets and models are opaque handles created and freed by this library.
//! Every function returns a [`TamStatus`]; on failure a description is kept
//! per thread and can be read with [`tam_last_error_message`]. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use tam_core::corpus::{parse_corpus, split_folds, Dataset, Example};
use tam_core::eval::{cross_validate, sign_test};
use tam_core::features::{FeatureConfig, FeatureSet};
use tam_core::learner::{LearnerSpec, TrainedModel};
use tam_core::maxent::MaxEntParams;
use tam_core::svm::SvmParams;
use tam_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed corpus or category descriptor.
    Parse = 3,
    /// Illegal learner / feature-set combination or parameter.
    Config = 4,
    /// Argument out of range (e.g. fold count).
    Argument = 5,
    Io = 6,
    /// Unreadable or mismatched model file.
    Model = 7,
    /// Training failed (single-class data, no convergence).
    Training = 8,
    /// Internal error; the library caught a panic.
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamMethod {
    Knn = 0,
    DecisionList = 1,
    MaxEnt = 2,
    Svm = 3,
    Baseline = 4,
}

/// Learner settings. Start from `tam_train_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TamTrainParams {
    pub method: TamMethod,
    /// 1 = suffixes + tokens, 2 = suffixes, 3 = tokens. k-NN needs 2.
    pub feature_set: u8,
    /// Neighbours for k-NN.
    pub k: u32,
    /// Polynomial kernel degree for the SVM.
    pub degree: u32,
    /// SVM box constant.
    pub c: f64,
    pub strip_punctuation: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TamSignTest {
    pub p_value: f64,
    pub significant: bool,
    /// False when the normal approximation was used.
    pub exact: bool,
}

/// Opaque corpus handle.
pub struct TamDataset {
    inner: Dataset,
}

/// Opaque trained-model handle.
pub struct TamModel {
    inner: TrainedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

struct Failure(TamStatus);

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let status = match &error {
            Error::Parse { .. }
            | Error::Encoding(_)
            | Error::Descriptor { .. }
            | Error::InvalidExample(_) => TamStatus::Parse,
            Error::Config(_) => TamStatus::Config,
            Error::Argument(_) => TamStatus::Argument,
            Error::Io(_) => TamStatus::Io,
            Error::Model(_) | Error::Serde(_) => TamStatus::Model,
            Error::Training { .. } => TamStatus::Training,
        };
        set_error(error.to_string());
        Failure(status)
    }
}

fn fail(status: TamStatus, message: &str) -> Failure {
    set_error(message);
    Failure(status)
}

/// Runs `body`, turning errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TamStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TamStatus::Ok
        }
        Ok(Err(Failure(status))) => status,
        Err(_) => {
            set_error("internal panic");
            TamStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(TamStatus::NullArgument, &format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TamStatus::InvalidUtf8, &format!("{what} is not UTF-8")))
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(TamStatus::NullArgument, &format!("{what} is NULL")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(TamStatus::NullArgument, &format!("{what} is NULL")))
}

fn resolve(params: &TamTrainParams) -> Result<(LearnerSpec, FeatureConfig), Failure> {
    let fs = FeatureSet::from_number(params.feature_set).ok_or_else(|| {
        fail(
            TamStatus::Config,
            &format!("feature set must be 1, 2 or 3, got {}", params.feature_set),
        )
    })?;
    let spec = match params.method {
        TamMethod::Knn => LearnerSpec::Knn { k: params.k as usize },
        TamMethod::DecisionList => LearnerSpec::DecisionList,
        TamMethod::MaxEnt => LearnerSpec::MaxEnt {
            params: MaxEntParams::default(),
        },
        TamMethod::Svm => LearnerSpec::Svm {
            params: SvmParams {
                c: params.c,
                ..SvmParams::with_degree(params.degree)
            },
        },
        TamMethod::Baseline => LearnerSpec::Baseline,
    };
    spec.check(fs)?;
    let mut features = FeatureConfig::new(fs);
    features.strip_punctuation = params.strip_punctuation;
    Ok((spec, features))
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tam_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// SVM with feature set 1, k = 1, d = 1, C = 1.
#[no_mangle]
pub extern "C" fn tam_train_params_default() -> TamTrainParams {
    TamTrainParams {
        method: TamMethod::Svm,
        feature_set: 1,
        k: 1,
        degree: 1,
        c: 1.0,
        strip_punctuation: false,
    }
}

/// Parses corpus text (`label<TAB>sentence[<TAB>tokens]` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tam_dataset_parse(text: *const c_char, out: *mut *mut TamDataset) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inner = parse_corpus(c_str(text, "text")?)?;
        *out = Box::into_raw(Box::new(TamDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tam_dataset_load(path: *const c_char, out: *mut *mut TamDataset) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inner = Dataset::load(c_str(path, "path")?)?;
        *out = Box::into_raw(Box::new(TamDataset { inner }));
        Ok(())
    })
}

/// Number of examples; 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tam_dataset_len(dataset: *const TamDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// # Safety
/// `dataset` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tam_dataset_free(dataset: *mut TamDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// # Safety
/// `dataset` must be a live handle, `params` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tam_model_train(
    dataset: *const TamDataset,
    params: *const TamTrainParams,
    out: *mut *mut TamModel,
) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let dataset = non_null(dataset, "dataset")?;
        let (spec, features) = resolve(non_null(params, "params")?)?;
        let inner = TrainedModel::train(&spec, &dataset.inner, features)?;
        *out = Box::into_raw(Box::new(TamModel { inner }));
        Ok(())
    })
}

/// Labels one sentence. `tokens` is NULL or a space-separated token list
/// (used by feature sets 1 and 3 instead of whitespace splitting). The
/// label written to `out` must be released with `tam_string_free`.
///
/// # Safety
/// `model` must be a live handle; strings NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tam_model_predict(
    model: *const TamModel,
    sentence: *const c_char,
    tokens: *const c_char,
    out: *mut *mut c_char,
) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let model = non_null(model, "model")?;
        let sentence = c_str(sentence, "sentence")?;
        let tokens = if tokens.is_null() {
            None
        } else {
            Some(
                c_str(tokens, "tokens")?
                    .split(' ')
                    .filter(|t| !t.is_empty())
                    .map(String::from)
                    .collect(),
            )
        };
        // The label is not consulted when predicting.
        let example = Example::new("?", sentence, tokens)?;
        let label = model.inner.predict(&example);
        *out = CString::new(label)
            .map_err(|_| fail(TamStatus::Model, "label contains NUL"))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tam_model_save(model: *const TamModel, path: *const c_char) -> TamStatus {
    guard(|| {
        let model = non_null(model, "model")?;
        model.inner.save(c_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tam_model_load(path: *const c_char, out: *mut *mut TamModel) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inner = TrainedModel::load(c_str(path, "path")?)?;
        *out = Box::into_raw(Box::new(TamModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tam_model_free(model: *mut TamModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Two-sided sign test; `level` must lie in (0, 1).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tam_sign_test(
    n_plus: u64,
    n_minus: u64,
    level: f64,
    out: *mut TamSignTest,
) -> TamStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if !(level > 0.0 && level < 1.0) {
            return Err(fail(TamStatus::Argument, "level must lie in (0, 1)"));
        }
        if n_plus.checked_add(n_minus).is_none() {
            return Err(fail(TamStatus::Argument, "counts overflow"));
        }
        let r = sign_test(n_plus, n_minus, level);
        *out = TamSignTest {
            p_value: r.p_value,
            significant: r.significant,
            exact: r.exact,
        };
        Ok(())
    })
}

/// Open cross-validation; writes the precision (correct / total).
///
/// # Safety
/// `dataset` must be a live handle, `params` and `precision` valid.
#[no_mangle]
pub unsafe extern "C" fn tam_cross_validate(
    dataset: *const TamDataset,
    params: *const TamTrainParams,
    folds: u32,
    seed: u64,
    precision: *mut f64,
) -> TamStatus {
    guard(|| {
        let precision = out_ptr(precision, "precision")?;
        let dataset = non_null(dataset, "dataset")?;
        let (spec, features) = resolve(non_null(params, "params")?)?;
        let plan = split_folds(&dataset.inner, folds as usize, seed)?;
        *precision = cross_validate(&spec, features, &dataset.inner, &plan)?.precision();
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_a_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, TamStatus::Panic);
        assert!(!tam_last_error_message().is_null());
        assert_eq!(guard(|| Ok(())), TamStatus::Ok);
        assert!(tam_last_error_message().is_null());
    }

    #[test]
    fn core_errors_map_to_statuses() {
        let Failure(s) = Error::Config("x".into()).into();
        assert_eq!(s, TamStatus::Config);
        let Failure(s) = Error::Model("x".into()).into();
        assert_eq!(s, TamStatus::Model);
    }

    #[test]
    fn defaults_resolve_to_linear_svm() {
        let (spec, features) = resolve(&tam_train_params_default()).ok().unwrap();
        assert_eq!(spec.row_label(), "svm(d=1)");
        assert_eq!(features, FeatureConfig::new(FeatureSet::Combined));
        let bad = TamTrainParams { degree: 0, ..tam_train_params_default() };
        assert!(resolve(&bad).is_err());
    }
}
