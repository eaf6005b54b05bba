use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn clesh(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clesh"))
        .arg("--features")
        .arg(data("demo_features.csv"))
        .arg("--label")
        .arg("Metabolic Syndrome")
        .arg("--output-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("run clesh")
}

fn shap_arg() -> String {
    data("demo_shap.csv").to_string_lossy().into_owned()
}

#[test]
fn missing_shap_file_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = clesh(&["--shap", "/nonexistent/shap.csv"], &out);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("/nonexistent/shap.csv"));
    assert!(!out.exists());
}

#[test]
fn invalid_config_value_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = clesh(&["--shap", &shap_arg(), "--p-univariate", "1.5"], &out);
    assert_eq!(res.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn dry_run_prints_k_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = clesh(&["--shap", &shap_arg(), "--dry-run"], &out);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("chosen_k = ")), "{stdout}");
    assert!(!out.exists());
}

#[test]
fn manual_num_overrides_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = clesh(&["--shap", &shap_arg(), "--manual-num", "15", "--dry-run"], &out);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("chosen_k = 15"), "{stdout}");
    assert!(stdout.contains("rule = manual"), "{stdout}");
}

#[test]
fn config_file_and_html_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("clesh.conf");
    fs::write(&cfg, "# overrides\nmanual_num = 3\ninteraction_top_k = 1\n").unwrap();
    let res = clesh(&["--shap", &shap_arg(), "--config", cfg.to_str().unwrap(), "--html"], &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("important features        3"), "{stdout}");
    let html = fs::read_to_string(out.join("report.html")).unwrap();
    assert!(html.contains("<svg"));
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"report.html\""));
}

#[test]
fn verbose_logs_stages_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = clesh(&["--shap", &shap_arg(), "-v", "--manual-num", "2"], &out);
    assert!(res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    let positions: Vec<usize> = (1..=5)
        .map(|i| stderr.find(&format!("stage {i}/5")).unwrap_or_else(|| panic!("stage {i} missing:\n{stderr}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{stderr}");
}
