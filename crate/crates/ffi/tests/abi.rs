use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use clesh_ffi::*;

fn last_error() -> String {
    let p = clesh_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn config_set_and_reject() {
    let cfg = clesh_config_new();
    unsafe {
        assert_eq!(clesh_config_set(cfg, cstr("p_univariate").as_ptr(), cstr("0.01").as_ptr()), CleshStatus::Ok);
        assert_eq!(
            clesh_config_set(cfg, cstr("no_such_key").as_ptr(), cstr("1").as_ptr()),
            CleshStatus::InvalidConfig
        );
        assert!(last_error().contains("no_such_key"));
        assert_eq!(
            clesh_config_set(cfg, cstr("p_univariate").as_ptr(), cstr("2").as_ptr()),
            CleshStatus::InvalidConfig
        );
        assert_eq!(clesh_config_set(cfg, ptr::null(), cstr("1").as_ptr()), CleshStatus::NullPointer);
        clesh_config_free(cfg);
    }
}

#[test]
fn stat_wrappers() {
    let x = [1.1, 2.3, 0.7, 1.9, 2.8, 1.4];
    let y = [3.2, 4.1, 2.9, 3.8, 5.0, 4.4];
    let mut out = CleshTestResult {
        statistic: 0.0,
        p_value: 0.0,
        df: 0.0,
        parametric: false,
        degenerate: false,
    };
    unsafe {
        assert_eq!(clesh_rank_sum(x.as_ptr(), 6, y.as_ptr(), 6, &mut out), CleshStatus::Ok);
        // Complete separation of two groups of six, exact two-sided p = 2 / C(12, 6).
        assert!((out.p_value - 2.0 / 924.0).abs() < 1e-12);

        assert_eq!(clesh_t_test_one_sample(x.as_ptr(), 6, 0.0, &mut out), CleshStatus::Ok);
        assert_eq!(out.df, 5.0);
        assert!(out.parametric);

        assert_eq!(clesh_t_test_paired(x.as_ptr(), y.as_ptr(), 6, &mut out), CleshStatus::Ok);
        assert!(out.p_value < 0.001);

        assert_eq!(clesh_signed_rank(x.as_ptr(), 6, 0.0, &mut out), CleshStatus::Ok);
        assert!((out.p_value - 2.0 / 64.0).abs() < 1e-12);

        let w = [1.0, 2.0, 3.0];
        assert_eq!(clesh_shapiro_wilk(w.as_ptr(), 3, &mut out), CleshStatus::Ok);
        assert_eq!(out.statistic, 1.0);
        assert!(out.df.is_nan());

        assert_eq!(clesh_shapiro_wilk(w.as_ptr(), 2, &mut out), CleshStatus::StatError);
        assert!(!last_error().is_empty());
        assert_eq!(clesh_rank_sum(ptr::null(), 3, y.as_ptr(), 6, &mut out), CleshStatus::NullPointer);
    }
}

#[test]
fn dataset_from_columns() {
    let names = [cstr("a"), cstr("b")];
    let name_ptrs: Vec<_> = names.iter().map(|n| n.as_ptr()).collect();
    let n = 20;
    let features: Vec<f64> = (0..2 * n).map(|i| (i % n) as f64 + if i >= n { 0.5 } else { 0.0 }).collect();
    let shap: Vec<f64> = (0..2 * n).map(|i| if i < n { (i as f64) * 0.1 } else { 0.01 }).collect();
    let mut ds = ptr::null_mut();
    unsafe {
        let status = clesh_dataset_from_columns(
            n,
            2,
            name_ptrs.as_ptr(),
            cstr("y").as_ptr(),
            features.as_ptr(),
            shap.as_ptr(),
            &mut ds,
        );
        assert_eq!(status, CleshStatus::Ok, "{}", last_error());
        assert_eq!(clesh_dataset_n_samples(ds), n);
        assert_eq!(clesh_dataset_n_features(ds), 2);

        let cfg = clesh_config_new();
        let mut run = ptr::null_mut();
        assert_eq!(clesh_analyze(cfg, ds, &mut run), CleshStatus::Ok);
        // The two features differ, so the only cut (below the default range) keeps one.
        assert_eq!(clesh_run_n_important(run), 1);
        assert_eq!(clesh_run_important_feature(run, 0), 0);
        assert_eq!(clesh_run_important_feature(run, 5), -1);
        clesh_run_free(run);
        clesh_config_free(cfg);
        clesh_dataset_free(ds);
    }
}

#[test]
fn load_and_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let features = cstr(data_dir().join("demo_features.csv").to_str().unwrap());
    let shap = cstr(data_dir().join("demo_shap.csv").to_str().unwrap());
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(
            clesh_dataset_load(features.as_ptr(), shap.as_ptr(), cstr("Metabolic Syndrome").as_ptr(), &mut ds),
            CleshStatus::Ok,
            "{}",
            last_error()
        );
        let cfg = clesh_config_new();
        let out_dir = cstr(dir.path().to_str().unwrap());
        assert_eq!(clesh_config_set(cfg, cstr("output_dir").as_ptr(), out_dir.as_ptr()), CleshStatus::Ok);
        let mut k = 0usize;
        assert_eq!(clesh_select_num_important(cfg, ds, &mut k), CleshStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(clesh_run(cfg, ds, &mut run), CleshStatus::Ok, "{}", last_error());
        assert_eq!(clesh_run_n_important(run), k);
        assert!(clesh_run_n_significant_univariate(run) > 0);
        assert!(dir.path().join("report.md").is_file());
        assert!(dir.path().join("manifest.json").is_file());
        clesh_run_free(run);
        clesh_config_free(cfg);
        clesh_dataset_free(ds);
    }
}

#[test]
fn missing_file_reports_input_error() {
    let mut ds = ptr::null_mut();
    let status = unsafe {
        clesh_dataset_load(
            cstr("/nonexistent/f.csv").as_ptr(),
            cstr("/nonexistent/s.csv").as_ptr(),
            cstr("y").as_ptr(),
            &mut ds,
        )
    };
    assert_eq!(status, CleshStatus::InputError);
    assert!(ds.is_null());
    assert!(last_error().contains("/nonexistent/f.csv"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(clesh_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// The generated header compiles as C when a C compiler is available.
#[test]
fn header_compiles() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/clesh.h");
    assert!(header.is_file());
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["clesh_run", "clesh_config_new", "clesh_rank_sum", "CLESH_STATUS_OK", "CleshTestResult"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"clesh.h\"\nint main(void) { CleshConfig *c = clesh_config_new(); clesh_config_free(c); return CLESH_STATUS_OK; }\n",
    )
    .unwrap();
    let Ok(output) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler found; skipping compile check");
        return;
    };
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}
