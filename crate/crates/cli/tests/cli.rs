//! Command-line contract: exit codes, file schemas, and manifest
//! reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use etherbell::protocol::CampaignConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_etherbell"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn etherbell")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, cfg: &CampaignConfig) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn missing_config_flag_and_file_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["rotate"]);
    assert_eq!(code(&out), 2);
    let out = run_in(dir.path(), &["rotate", "--config", "nope.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_config_field_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig::relativistic_preset(1, 100);
    let mut json: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    json["mystery_field"] = serde_json::json!(3);
    let path = dir.path().join("bad.json");
    fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = run_in(dir.path(), &["rotate", "--config", "bad.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery_field"));
}

#[test]
fn superluminal_wind_exits_2_citing_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CampaignConfig::preferred_frame_preset(1, 100);
    if let etherbell::physics::PhaseModel::PreferredFrame { ref mut wind } = cfg.model {
        wind.speed_mps = 4.0e8;
    }
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(dir.path(), &["rotate", "--config", "cfg.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wind.speed"));
}

#[test]
fn rotate_writes_reports_and_prints_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig::preferred_frame_preset(7, 100_000);
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(dir.path(), &["rotate", "--config", "cfg.json", "--out", "run"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PreferredFrameDetected"));
    for name in ["verdict.json", "rotation_points.csv", "manifest.json"] {
        assert!(dir.path().join("run").join(name).exists(), "{name} missing");
    }
    let csv = fs::read_to_string(dir.path().join("run/rotation_points.csv")).unwrap();
    assert!(csv.starts_with(
        "t_sidereal_h,stage_deg,model,n_pairs,n_postselected,n_same,n_diff,p_same,ci_low,ci_high\n"
    ));
    assert_eq!(csv.lines().count(), 3); // header + two stages
    let verdict: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/verdict.json")).unwrap())
            .unwrap();
    assert_eq!(verdict["decision"], "PreferredFrameDetected");
    assert!(verdict["sizing"]["round_number_convention"]["length_sum_m"].as_f64().unwrap() > 6.2);
}

#[test]
fn seed_and_events_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig::relativistic_preset(7, 50_000);
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(
        dir.path(),
        &["rotate", "--config", "cfg.json", "--out", "run", "--seed", "99", "--events", "1234"],
    );
    assert_eq!(code(&out), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 99);
    assert_eq!(manifest["config"]["events_per_point"], 1234);
    let csv = fs::read_to_string(dir.path().join("run/rotation_points.csv")).unwrap();
    assert!(csv.contains(",1234,"));
}

#[test]
fn hourly_relativistic_sweep_has_48_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CampaignConfig::relativistic_preset(3, 10_000);
    cfg.alignment = etherbell::protocol::AlignmentMode::Projected;
    cfg.site = Some(etherbell::protocol::suggested_site());
    cfg.sidereal_times_h = (0..24).map(f64::from).collect();
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(dir.path(), &["sweep", "--config", "cfg.json", "--out", "run"]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("run/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 49); // header + 24 times x 2 stages
}

#[test]
fn projected_sweep_without_site_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CampaignConfig::relativistic_preset(3, 1000);
    cfg.alignment = etherbell::protocol::AlignmentMode::Projected;
    cfg.sidereal_times_h = vec![0.0, 6.0];
    cfg.site = None;
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(dir.path(), &["sweep", "--config", "cfg.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("site"));
}

#[test]
fn shipped_sweep_config_peaks_at_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/sweep.json");
    let out = run_in(dir.path(), &["sweep", "--config", config, "--out", "run"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("at t_sidereal = 0 h"), "stdout: {stdout}");
}

#[test]
fn bell_contract_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // settings omitted -> exit 2
    let cfg = CampaignConfig::relativistic_preset(5, 1000);
    write_config(dir.path(), "nochsh.json", &cfg);
    let out = run_in(dir.path(), &["bell", "--config", "nochsh.json"]);
    assert_eq!(code(&out), 2);
    // zero events -> empty tally -> exit 3
    let cfg = CampaignConfig::bell_preset(5, 0);
    write_config(dir.path(), "zero.json", &cfg);
    let out = run_in(dir.path(), &["bell", "--config", "zero.json"]);
    assert_eq!(code(&out), 3);
    // happy path writes the report
    let cfg = CampaignConfig::bell_preset(5, 100_000);
    write_config(dir.path(), "ok.json", &cfg);
    let out = run_in(dir.path(), &["bell", "--config", "ok.json", "--out", "run"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/bell.json")).unwrap())
            .unwrap();
    let s = report["result"]["s_value"].as_f64().unwrap();
    assert!((s - 2.8284).abs() < 0.05, "s = {s}");
}

#[test]
fn power_prints_the_minimal_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["power", "--p1", "0.5", "--p2", "0.25", "--sigma", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "175");
    let out = run_in(dir.path(), &["power", "--p1", "0.5", "--p2", "0.25", "--sigma", "10"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "700");
    let out = run_in(dir.path(), &["power", "--p1", "0.5", "--p2", "0.5"]);
    assert_eq!(code(&out), 2);
    let out = run_in(dir.path(), &["power", "--p1", "1.5", "--p2", "0.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn rerunning_from_the_manifest_reproduces_outputs_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CampaignConfig::preferred_frame_preset(31, 50_000);
    write_config(dir.path(), "cfg.json", &cfg);
    let out = run_in(dir.path(), &["rotate", "--config", "cfg.json", "--out", "run1"]);
    assert_eq!(code(&out), 0);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run1/manifest.json")).unwrap())
            .unwrap();
    fs::write(
        dir.path().join("from_manifest.json"),
        serde_json::to_string(&manifest["config"]).unwrap(),
    )
    .unwrap();
    let out = run_in(dir.path(), &["rotate", "--config", "from_manifest.json", "--out", "run2"]);
    assert_eq!(code(&out), 0);

    for name in ["verdict.json", "rotation_points.csv"] {
        let a = fs::read(dir.path().join("run1").join(name)).unwrap();
        let b = fs::read(dir.path().join("run2").join(name)).unwrap();
        assert_eq!(a, b, "{name} not reproduced");
    }
}
