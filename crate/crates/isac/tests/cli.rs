use std::path::Path;
use std::process::{Command, Output};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irs-isac")).arg("--out").arg(dir).args(args).output().unwrap()
}

#[test]
fn evaluate_without_models_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(tmp.path(), &["evaluate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("model_s1_p2.isacnn"));
}

#[test]
fn later_stage_needs_earlier_models() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(!cli(tmp.path(), &["simulate", "--stage", "2", "--pair", "1"]).status.success());
    assert!(!cli(tmp.path(), &["simulate", "--stage", "4", "--pair", "1"]).status.success());
}

#[test]
fn complexity_table_layout() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cli(tmp.path(), &["complexity"]).status.success());
    let text = std::fs::read_to_string(tmp.path().join("complexity.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("context,M,L,adds,mults"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        assert!(cols[3].parse::<f64>().is_ok() && cols[4].parse::<f64>().is_ok());
    }
}

#[test]
fn ls_evaluation_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"estimator": "ls", "t_on": 20, "test_snr_grid_db": [0.0, 20.0]}"#).unwrap();
    let out = cli(tmp.path(), &["--config", cfg.to_str().unwrap(), "evaluate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("nmse_ls.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "snr_db,channel,estimator,nmse");
    assert_eq!(rows.len(), 1 + 2 * 4);
    let nmse = |i: usize| rows[i].rsplit(',').next().unwrap().parse::<f64>().unwrap();
    // Gu at 0 dB vs 20 dB.
    assert!(nmse(3) > 50.0 * nmse(7));
}

#[test]
fn unknown_figure_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(!cli(tmp.path(), &["reproduce-figure", "3"]).status.success());
}
