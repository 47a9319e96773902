#ifndef TAM_H
#define TAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TamMethod {
  TAM_METHOD_KNN = 0,
  TAM_METHOD_DECISION_LIST = 1,
  TAM_METHOD_MAX_ENT = 2,
  TAM_METHOD_SVM = 3,
  TAM_METHOD_BASELINE = 4,
} TamMethod;

typedef enum TamStatus {
  TAM_STATUS_OK = 0,
  // A required pointer argument was NULL.
  TAM_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  TAM_STATUS_INVALID_UTF8 = 2,
  // Malformed corpus or category descriptor.
  TAM_STATUS_PARSE = 3,
  // Illegal learner / feature-set combination or parameter.
  TAM_STATUS_CONFIG = 4,
  // Argument out of range (e.g. fold count).
  TAM_STATUS_ARGUMENT = 5,
  TAM_STATUS_IO = 6,
  // Unreadable or mismatched model file.
  TAM_STATUS_MODEL = 7,
  // Training failed (single-class data, no convergence).
  TAM_STATUS_TRAINING = 8,
  // Internal error; the library caught a panic.
  TAM_STATUS_PANIC = 9,
} TamStatus;

// Opaque corpus handle.
typedef struct TamDataset TamDataset;

// Opaque trained-model handle.
typedef struct TamModel TamModel;

// Learner settings. Start from `tam_train_params_default`.
typedef struct TamTrainParams {
  enum TamMethod method;
  // 1 = suffixes + tokens, 2 = suffixes, 3 = tokens. k-NN needs 2.
  uint8_t feature_set;
  // Neighbours for k-NN.
  uint32_t k;
  // Polynomial kernel degree for the SVM.
  uint32_t degree;
  // SVM box constant.
  double c;
  bool strip_punctuation;
} TamTrainParams;

typedef struct TamSignTest {
  double p_value;
  bool significant;
  // False when the normal approximation was used.
  bool exact;
} TamSignTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// success. Valid until the next call into the library on this thread.
const char *tam_last_error_message(void);

// SVM with feature set 1, k = 1, d = 1, C = 1.
struct TamTrainParams tam_train_params_default(void);

// Parses corpus text (`label<TAB>sentence[<TAB>tokens]` lines).
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum TamStatus tam_dataset_parse(const char *text, struct TamDataset **out);

// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum TamStatus tam_dataset_load(const char *path, struct TamDataset **out);

// Number of examples; 0 for NULL.
//
// # Safety
// `dataset` must be NULL or a live handle.
size_t tam_dataset_len(const struct TamDataset *dataset);

// # Safety
// `dataset` must be NULL or a handle not yet freed.
void tam_dataset_free(struct TamDataset *dataset);

// # Safety
// `dataset` must be a live handle, `params` and `out` valid pointers.
enum TamStatus tam_model_train(const struct TamDataset *dataset,
                               const struct TamTrainParams *params,
                               struct TamModel **out);

// Labels one sentence. `tokens` is NULL or a space-separated token list
// (used by feature sets 1 and 3 instead of whitespace splitting). The
// label written to `out` must be released with `tam_string_free`.
//
// # Safety
// `model` must be a live handle; strings NUL-terminated; `out` valid.
enum TamStatus tam_model_predict(const struct TamModel *model,
                                 const char *sentence,
                                 const char *tokens,
                                 char **out);

// # Safety
// `model` must be a live handle and `path` NUL-terminated.
enum TamStatus tam_model_save(const struct TamModel *model, const char *path);

// # Safety
// `path` must be NUL-terminated and `out` valid.
enum TamStatus tam_model_load(const char *path, struct TamModel **out);

// # Safety
// `model` must be NULL or a handle not yet freed.
void tam_model_free(struct TamModel *model);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a string from this library not yet freed.
void tam_string_free(char *s);

// Two-sided sign test; `level` must lie in (0, 1).
//
// # Safety
// `out` must be a valid pointer.
enum TamStatus tam_sign_test(uint64_t n_plus,
                             uint64_t n_minus,
                             double level,
                             struct TamSignTest *out);

// Open cross-validation; writes the precision (correct / total).
//
// # Safety
// `dataset` must be a live handle, `params` and `precision` valid.
enum TamStatus tam_cross_validate(const struct TamDataset *dataset,
                                  const struct TamTrainParams *params,
                                  uint32_t folds,
                                  uint64_t seed,
                                  double *precision);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAM_H */
