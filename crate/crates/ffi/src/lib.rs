//! C ABI for clesh.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`clesh_run` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CleshStatus`]; on failure [`clesh_last_error`] describes the error for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use clesh::config::Config;
use clesh::dataset::{load_dataset, DatasetBundle};
use clesh::error::CleshError;
use clesh::pipeline::{analyze, select_features, Analysis};
use clesh::report::assemble_report;
use clesh::stats::{self, StatError, TTestMode, TestResult};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleshStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InputError = 4,
    StatError = 5,
    OutputError = 6,
    Panic = 7,
}

/// Analysis settings.
pub struct CleshConfig(Config);

/// Feature and SHAP matrices.
pub struct CleshDataset(DatasetBundle);

/// Result of [`clesh_run`] or [`clesh_analyze`].
pub struct CleshRun {
    analysis: Analysis,
    significant_univariate: usize,
}

/// Outcome of a hypothesis test. `df` is NaN when not applicable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleshTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: f64,
    pub parametric: bool,
    pub degenerate: bool,
}

impl From<&TestResult> for CleshTestResult {
    fn from(t: &TestResult) -> Self {
        CleshTestResult {
            statistic: t.statistic,
            p_value: t.p_value,
            df: t.df.unwrap_or(f64::NAN),
            parametric: t.parametric,
            degenerate: t.degenerate,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: CleshStatus, msg: impl Into<String>) -> CleshStatus {
    set_error(msg);
    status
}

fn status_of(e: &CleshError) -> CleshStatus {
    match e {
        CleshError::ConfigSyntax { .. }
        | CleshError::UnknownKey(_)
        | CleshError::InvalidValue { .. }
        | CleshError::InvalidConfig(_) => CleshStatus::InvalidConfig,
        CleshError::Write { .. } => CleshStatus::OutputError,
        CleshError::Analysis(_) => CleshStatus::StatError,
        _ => CleshStatus::InputError,
    }
}

/// Runs `f`, turning panics into [`CleshStatus::Panic`].
fn guard(f: impl FnOnce() -> CleshStatus) -> CleshStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CleshStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, CleshStatus> {
    if p.is_null() {
        return Err(fail(CleshStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CleshStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], CleshStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(CleshStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn clesh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn clesh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with default values.
#[no_mangle]
pub extern "C" fn clesh_config_new() -> *mut CleshConfig {
    Box::into_raw(Box::new(CleshConfig(Config::default())))
}

/// Sets one key (`p_univariate`, `manual_num`, ...) from its text form.
///
/// # Safety
/// `config` must come from [`clesh_config_new`]; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn clesh_config_set(
    config: *mut CleshConfig,
    key: *const c_char,
    value: *const c_char,
) -> CleshStatus {
    guard(|| {
        let Some(config) = config.as_mut() else {
            return fail(CleshStatus::NullPointer, "config is null");
        };
        let key = try_ffi!(str_arg(key, "key"));
        let value = try_ffi!(str_arg(value, "value"));
        let mut next = config.0.clone();
        if let Err(e) = next.set(key, value).and_then(|()| next.validate()) {
            return fail(status_of(&e), e.to_string());
        }
        config.0 = next;
        CleshStatus::Ok
    })
}

/// # Safety
/// `config` must come from [`clesh_config_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn clesh_config_free(config: *mut CleshConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Loads a features CSV and a SHAP CSV.
///
/// # Safety
/// All string arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_dataset_load(
    features_path: *const c_char,
    shap_path: *const c_char,
    label: *const c_char,
    out: *mut *mut CleshDataset,
) -> CleshStatus {
    guard(|| {
        if out.is_null() {
            return fail(CleshStatus::NullPointer, "out is null");
        }
        let features = try_ffi!(str_arg(features_path, "features_path"));
        let shap = try_ffi!(str_arg(shap_path, "shap_path"));
        let label = try_ffi!(str_arg(label, "label"));
        match load_dataset(Path::new(features), Path::new(shap), label) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(CleshDataset(b)));
                CleshStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Builds a dataset from column-major arrays of `n_samples * n_features` values.
///
/// # Safety
/// `names` must hold `n_features` NUL-terminated strings; `features` and
/// `shap` must each hold `n_samples * n_features` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_dataset_from_columns(
    n_samples: usize,
    n_features: usize,
    names: *const *const c_char,
    label: *const c_char,
    features: *const f64,
    shap: *const f64,
    out: *mut *mut CleshDataset,
) -> CleshStatus {
    guard(|| {
        if out.is_null() || (n_features > 0 && names.is_null()) {
            return fail(CleshStatus::NullPointer, "out or names is null");
        }
        let label = try_ffi!(str_arg(label, "label"));
        let Some(total) = n_samples.checked_mul(n_features) else {
            return fail(CleshStatus::InputError, "matrix size overflows");
        };
        let f = try_ffi!(slice_arg(features, total, "features"));
        let s = try_ffi!(slice_arg(shap, total, "shap"));
        let mut owned_names = Vec::with_capacity(n_features);
        for j in 0..n_features {
            owned_names.push(try_ffi!(str_arg(*names.add(j), "feature name")).to_string());
        }
        let columns = |m: &[f64]| -> Vec<Vec<f64>> {
            (0..n_features).map(|j| m[j * n_samples..(j + 1) * n_samples].to_vec()).collect()
        };
        match DatasetBundle::new(owned_names, label, columns(f), columns(s)) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(CleshDataset(b)));
                CleshStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `dataset` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_dataset_n_samples(dataset: *const CleshDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.n_samples())
}

/// # Safety
/// `dataset` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_dataset_n_features(dataset: *const CleshDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.n_features())
}

/// # Safety
/// `dataset` must come from a `clesh_dataset_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn clesh_dataset_free(dataset: *mut CleshDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of important features that the full pipeline would analyze.
///
/// # Safety
/// Handles must be live; `out_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_select_num_important(
    config: *const CleshConfig,
    dataset: *const CleshDataset,
    out_k: *mut usize,
) -> CleshStatus {
    guard(|| {
        let (Some(c), Some(d)) = (config.as_ref(), dataset.as_ref()) else {
            return fail(CleshStatus::NullPointer, "config or dataset is null");
        };
        if out_k.is_null() {
            return fail(CleshStatus::NullPointer, "out_k is null");
        }
        *out_k = select_features(&d.0, &c.0).1.chosen_k;
        CleshStatus::Ok
    })
}

unsafe fn run_impl(
    config: *const CleshConfig,
    dataset: *const CleshDataset,
    out: *mut *mut CleshRun,
    write_report: bool,
) -> CleshStatus {
    guard(|| {
        let (Some(c), Some(d)) = (config.as_ref(), dataset.as_ref()) else {
            return fail(CleshStatus::NullPointer, "config or dataset is null");
        };
        if out.is_null() {
            return fail(CleshStatus::NullPointer, "out is null");
        }
        let analysis = analyze(&d.0, &c.0);
        if write_report {
            if let Err(e) = assemble_report(&d.0, &analysis, &c.0) {
                return fail(status_of(&e), e.to_string());
            }
        }
        let significant_univariate = analysis.n_significant_univariate(&c.0);
        *out = Box::into_raw(Box::new(CleshRun {
            analysis,
            significant_univariate,
        }));
        CleshStatus::Ok
    })
}

/// Runs every analysis stage and writes the report to the configured `output_dir`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_run(
    config: *const CleshConfig,
    dataset: *const CleshDataset,
    out: *mut *mut CleshRun,
) -> CleshStatus {
    run_impl(config, dataset, out, true)
}

/// Like [`clesh_run`] but writes nothing.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_analyze(
    config: *const CleshConfig,
    dataset: *const CleshDataset,
    out: *mut *mut CleshRun,
) -> CleshStatus {
    run_impl(config, dataset, out, false)
}

/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_run_n_important(run: *const CleshRun) -> usize {
    run.as_ref().map_or(0, |r| r.analysis.important.len())
}

/// Feature index (column order) of the important feature at `rank`, or -1.
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_run_important_feature(run: *const CleshRun, rank: usize) -> i64 {
    run.as_ref()
        .and_then(|r| r.analysis.important.get(rank))
        .map_or(-1, |&j| j as i64)
}

/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_run_n_significant_univariate(run: *const CleshRun) -> usize {
    run.as_ref().map_or(0, |r| r.significant_univariate)
}

/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn clesh_run_n_significant_interactions(run: *const CleshRun) -> usize {
    run.as_ref().map_or(0, |r| r.analysis.n_significant_interactions())
}

/// # Safety
/// `run` must come from [`clesh_run`] / [`clesh_analyze`] or be null.
#[no_mangle]
pub unsafe extern "C" fn clesh_run_free(run: *mut CleshRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn write_test(out: *mut CleshTestResult, r: Result<TestResult, StatError>) -> CleshStatus {
    if out.is_null() {
        return fail(CleshStatus::NullPointer, "out is null");
    }
    match r {
        Ok(t) => {
            *out = CleshTestResult::from(&t);
            CleshStatus::Ok
        }
        Err(e) => fail(CleshStatus::StatError, e.to_string()),
    }
}

/// Shapiro-Wilk normality test; `statistic` is W.
///
/// # Safety
/// `x` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_shapiro_wilk(x: *const f64, n: usize, out: *mut CleshTestResult) -> CleshStatus {
    guard(|| {
        let x = try_ffi!(slice_arg(x, n, "x"));
        if out.is_null() {
            return fail(CleshStatus::NullPointer, "out is null");
        }
        match stats::shapiro_wilk(x, 0.05) {
            Ok(g) => {
                *out = CleshTestResult {
                    statistic: g.w_statistic,
                    p_value: g.p_value,
                    df: f64::NAN,
                    parametric: false,
                    degenerate: false,
                };
                CleshStatus::Ok
            }
            Err(e) => fail(CleshStatus::StatError, e.to_string()),
        }
    })
}

/// Two-sided one-sample t-test of `x` against `mu`.
///
/// # Safety
/// `x` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_t_test_one_sample(
    x: *const f64,
    n: usize,
    mu: f64,
    out: *mut CleshTestResult,
) -> CleshStatus {
    guard(|| {
        let x = try_ffi!(slice_arg(x, n, "x"));
        write_test(out, stats::t_test(x, TTestMode::OneSample { mu }))
    })
}

/// Two-sided paired t-test of `x - y` against zero.
///
/// # Safety
/// `x` and `y` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_t_test_paired(
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut CleshTestResult,
) -> CleshStatus {
    guard(|| {
        let x = try_ffi!(slice_arg(x, n, "x"));
        let y = try_ffi!(slice_arg(y, n, "y"));
        write_test(out, stats::t_test(x, TTestMode::Paired { y }))
    })
}

/// Wilcoxon rank-sum test (exact for small samples without ties).
///
/// # Safety
/// `x` must hold `nx` and `y` must hold `ny` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_rank_sum(
    x: *const f64,
    nx: usize,
    y: *const f64,
    ny: usize,
    out: *mut CleshTestResult,
) -> CleshStatus {
    guard(|| {
        let x = try_ffi!(slice_arg(x, nx, "x"));
        let y = try_ffi!(slice_arg(y, ny, "y"));
        write_test(out, stats::rank_sum_test(x, y))
    })
}

/// Wilcoxon signed-rank test of `x` against `mu`.
///
/// # Safety
/// `x` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clesh_signed_rank(
    x: *const f64,
    n: usize,
    mu: f64,
    out: *mut CleshTestResult,
) -> CleshStatus {
    guard(|| {
        let x = try_ffi!(slice_arg(x, n, "x"));
        write_test(out, stats::signed_rank_test(x, mu))
    })
}
