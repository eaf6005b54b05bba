#ifndef CLESH_H
#define CLESH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum CleshStatus {
  CLESH_STATUS_OK = 0,
  CLESH_STATUS_NULL_POINTER = 1,
  CLESH_STATUS_INVALID_UTF8 = 2,
  CLESH_STATUS_INVALID_CONFIG = 3,
  CLESH_STATUS_INPUT_ERROR = 4,
  CLESH_STATUS_STAT_ERROR = 5,
  CLESH_STATUS_OUTPUT_ERROR = 6,
  CLESH_STATUS_PANIC = 7,
} CleshStatus;

/**
 * Analysis settings.
 */
typedef struct CleshConfig CleshConfig;

/**
 * Feature and SHAP matrices.
 */
typedef struct CleshDataset CleshDataset;

/**
 * Result of [`clesh_run`] or [`clesh_analyze`].
 */
typedef struct CleshRun CleshRun;

/**
 * Outcome of a hypothesis test. `df` is NaN when not applicable.
 */
typedef struct CleshTestResult {
  double statistic;
  double p_value;
  double df;
  bool parametric;
  bool degenerate;
} CleshTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *clesh_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *clesh_version(void);

/**
 * New configuration with default values.
 */
struct CleshConfig *clesh_config_new(void);

/**
 * Sets one key (`p_univariate`, `manual_num`, ...) from its text form.
 *
 * # Safety
 * `config` must come from [`clesh_config_new`]; `key` and `value` must be
 * NUL-terminated strings.
 */
enum CleshStatus clesh_config_set(struct CleshConfig *config, const char *key, const char *value);

/**
 * # Safety
 * `config` must come from [`clesh_config_new`] or be null.
 */
void clesh_config_free(struct CleshConfig *config);

/**
 * Loads a features CSV and a SHAP CSV.
 *
 * # Safety
 * All string arguments must be NUL-terminated; `out` must be writable.
 */
enum CleshStatus clesh_dataset_load(const char *features_path,
                                    const char *shap_path,
                                    const char *label,
                                    struct CleshDataset **out);

/**
 * Builds a dataset from column-major arrays of `n_samples * n_features` values.
 *
 * # Safety
 * `names` must hold `n_features` NUL-terminated strings; `features` and
 * `shap` must each hold `n_samples * n_features` doubles; `out` must be writable.
 */
enum CleshStatus clesh_dataset_from_columns(size_t n_samples,
                                            size_t n_features,
                                            const char *const *names,
                                            const char *label,
                                            const double *features,
                                            const double *shap,
                                            struct CleshDataset **out);

/**
 * # Safety
 * `dataset` must be a live handle or null.
 */
size_t clesh_dataset_n_samples(const struct CleshDataset *dataset);

/**
 * # Safety
 * `dataset` must be a live handle or null.
 */
size_t clesh_dataset_n_features(const struct CleshDataset *dataset);

/**
 * # Safety
 * `dataset` must come from a `clesh_dataset_*` constructor or be null.
 */
void clesh_dataset_free(struct CleshDataset *dataset);

/**
 * Number of important features that the full pipeline would analyze.
 *
 * # Safety
 * Handles must be live; `out_k` must be writable.
 */
enum CleshStatus clesh_select_num_important(const struct CleshConfig *config,
                                            const struct CleshDataset *dataset,
                                            size_t *out_k);

/**
 * Runs every analysis stage and writes the report to the configured `output_dir`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CleshStatus clesh_run(const struct CleshConfig *config,
                           const struct CleshDataset *dataset,
                           struct CleshRun **out);

/**
 * Like [`clesh_run`] but writes nothing.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CleshStatus clesh_analyze(const struct CleshConfig *config,
                               const struct CleshDataset *dataset,
                               struct CleshRun **out);

/**
 * # Safety
 * `run` must be a live handle or null.
 */
size_t clesh_run_n_important(const struct CleshRun *run);

/**
 * Feature index (column order) of the important feature at `rank`, or -1.
 *
 * # Safety
 * `run` must be a live handle or null.
 */
int64_t clesh_run_important_feature(const struct CleshRun *run, size_t rank);

/**
 * # Safety
 * `run` must be a live handle or null.
 */
size_t clesh_run_n_significant_univariate(const struct CleshRun *run);

/**
 * # Safety
 * `run` must be a live handle or null.
 */
size_t clesh_run_n_significant_interactions(const struct CleshRun *run);

/**
 * # Safety
 * `run` must come from [`clesh_run`] / [`clesh_analyze`] or be null.
 */
void clesh_run_free(struct CleshRun *run);

/**
 * Shapiro-Wilk normality test; `statistic` is W.
 *
 * # Safety
 * `x` must hold `n` doubles; `out` must be writable.
 */
enum CleshStatus clesh_shapiro_wilk(const double *x, size_t n, struct CleshTestResult *out);

/**
 * Two-sided one-sample t-test of `x` against `mu`.
 *
 * # Safety
 * `x` must hold `n` doubles; `out` must be writable.
 */
enum CleshStatus clesh_t_test_one_sample(const double *x,
                                         size_t n,
                                         double mu,
                                         struct CleshTestResult *out);

/**
 * Two-sided paired t-test of `x - y` against zero.
 *
 * # Safety
 * `x` and `y` must hold `n` doubles; `out` must be writable.
 */
enum CleshStatus clesh_t_test_paired(const double *x,
                                     const double *y,
                                     size_t n,
                                     struct CleshTestResult *out);

/**
 * Wilcoxon rank-sum test (exact for small samples without ties).
 *
 * # Safety
 * `x` must hold `nx` and `y` must hold `ny` doubles; `out` must be writable.
 */
enum CleshStatus clesh_rank_sum(const double *x,
                                size_t nx,
                                const double *y,
                                size_t ny,
                                struct CleshTestResult *out);

/**
 * Wilcoxon signed-rank test of `x` against `mu`.
 *
 * # Safety
 * `x` must hold `n` doubles; `out` must be writable.
 */
enum CleshStatus clesh_signed_rank(const double *x,
                                   size_t n,
                                   double mu,
                                   struct CleshTestResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLESH_H */
