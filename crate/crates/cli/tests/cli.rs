//! End-to-end tests of the `vitals` binary: exit codes, file outputs, the
//! streaming monitor contract, and config override plumbing.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn vitals() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vitals"))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

const CLEAN_SCENARIO: &str = "\
start.x = 0\nstart.y = 0\ngoal.x = 20\ngoal.y = 0\nseed = 7\nmax_duration = 240\n";

fn simulate_clean(dir: &Path) -> std::path::PathBuf {
    let scenario = write_file(dir, "clean.scn", CLEAN_SCENARIO);
    let out = dir.join("sim");
    let status = vitals()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    out.join("telemetry.jsonl")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().unwrap()
}

#[test]
fn simulate_writes_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate_clean(dir.path());
    assert!(log.exists());
    let trial = fs::read_to_string(dir.path().join("sim/trial.csv")).unwrap();
    assert!(
        trial.starts_with("completed,t_comp,avg_health\ntrue,40,"),
        "{trial}"
    );
}

#[test]
fn simulate_missing_scenario_exits_2() {
    let out = run(vitals().args([
        "simulate",
        "--scenario",
        "/nonexistent.scn",
        "--out",
        "/tmp/x",
    ]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_bad_scenario_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_file(dir.path(), "bad.scn", "start.x = 0\nwheels = 4\n");
    let out = run(vitals()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .args(["--out", "/tmp/x"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wheels"));
}

#[test]
fn replay_writes_three_csvs_and_clean_log_has_no_alerts() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate_clean(dir.path());
    let out_dir = dir.path().join("rep");
    let status = vitals()
        .args(["replay", "--log"])
        .arg(&log)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let alerts = fs::read_to_string(out_dir.join("alerts.csv")).unwrap();
    assert_eq!(alerts, "t_start,t_end,min_health\n");
    let vitals_csv = fs::read_to_string(out_dir.join("vitals.csv")).unwrap();
    assert_eq!(vitals_csv.lines().count(), 41 * 5 + 1);
    assert!(out_dir.join("health.csv").exists());
}

#[test]
fn replay_malformed_log_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let log = write_file(dir.path(), "bad.jsonl", "{\"t\":0.0}\n");
    let out = run(vitals()
        .args(["replay", "--log"])
        .arg(&log)
        .args(["--out", "/tmp/x"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn replay_short_log_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let ranges = serde_json::to_string(&vec![5.0; 9]).unwrap();
    let mut text = String::new();
    for i in 0..4 {
        text.push_str(&format!(
            "{{\"t\":{},\"fx\":0,\"fy\":0,\"fh\":0,\"ox\":0,\"oy\":0,\"oh\":0,\"az\":0,\"goal_x\":5,\"goal_y\":0,\"ranges\":{ranges}}}\n",
            i as f64 * 0.1
        ));
    }
    let log = write_file(dir.path(), "short.jsonl", &text);
    let out = run(vitals()
        .args(["replay", "--log"])
        .arg(&log)
        .args(["--out", "/tmp/x"]));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient duration"));
}

#[test]
fn replay_log_without_accel_reports_four_vitals() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate_clean(dir.path());
    let stripped: String = fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| l.replace("\"az\":0.0,", ""))
        .collect::<Vec<_>>()
        .join("\n");
    let no_az = write_file(dir.path(), "noaz.jsonl", &stripped);
    let out_dir = dir.path().join("rep_noaz");
    assert!(vitals()
        .args(["replay", "--log"])
        .arg(&no_az)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap()
        .success());
    let health = fs::read_to_string(out_dir.join("health.csv")).unwrap();
    // steady state: every tick reports 4 available vitals
    let last = health.lines().last().unwrap();
    assert!(last.ends_with(",4"), "{last}");
    let vitals_csv = fs::read_to_string(out_dir.join("vitals.csv")).unwrap();
    assert!(vitals_csv
        .lines()
        .filter(|l| l.contains(",jerk,"))
        .all(|l| l.ends_with("false")));
}

fn monitor_with_input(input: &str, args: &[&str]) -> Output {
    let mut child = vitals()
        .arg("monitor")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn monitor_emits_one_health_line_per_tick() {
    let dir = tempfile::tempdir().unwrap();
    let log = fs::read_to_string(simulate_clean(dir.path())).unwrap();
    let out = monitor_with_input(&log, &[]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("health ")).count(),
        41
    );
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("alert ")).count(),
        0
    );
}

#[test]
fn monitor_skips_malformed_line_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let log = fs::read_to_string(simulate_clean(dir.path())).unwrap();
    let mut lines: Vec<&str> = log.lines().collect();
    lines.insert(10, "{ not json");
    let out = monitor_with_input(&lines.join("\n"), &[]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("health ")).count(),
        41
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(
        stderr.lines().filter(|l| l.starts_with("warning:")).count(),
        1
    );
    assert!(stderr.contains("line 11"), "{stderr}");
}

#[test]
fn monitor_threshold_override_raises_alert() {
    let dir = tempfile::tempdir().unwrap();
    let log = fs::read_to_string(simulate_clean(dir.path())).unwrap();
    let out = monitor_with_input(&log, &["--threshold", "-0.1"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let alerts: Vec<&str> = stdout.lines().filter(|l| l.starts_with("alert ")).collect();
    assert_eq!(alerts.len(), 1, "{stdout}");
    assert!(alerts[0].contains("t_start=2"), "{alerts:?}");
}

#[test]
fn set_unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate_clean(dir.path());
    let out = run(vitals().args(["replay", "--log"]).arg(&log).args([
        "--out",
        "/tmp/x",
        "--set",
        "goal.zzz=1",
    ]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("goal.zzz"));
}

#[test]
fn experiment_small_matrix_exits_3_but_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("exp");
    let out = run(vitals()
        .args(["experiment", "--levels", "0", "--trials", "2", "--out"])
        .arg(&out_dir));
    assert_eq!(out.status.code(), Some(3));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(!out_dir.join("report.txt").exists());
}

#[test]
fn experiment_report_contains_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("exp");
    let out = run(vitals()
        .args([
            "experiment",
            "--levels",
            "0,3,7",
            "--trials",
            "4",
            "--seed",
            "55",
            "--out",
        ])
        .arg(&out_dir));
    assert!(out.status.success());
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("spearman rho"), "{report}");
    assert!(report.contains("failures per level"), "{report}");
    assert_eq!(String::from_utf8_lossy(&out.stdout), report);
}

#[test]
fn seed_flag_overrides_scenario_seed() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_file(dir.path(), "clean.scn", CLEAN_SCENARIO);
    let run_with = |seed: &str, out: &str| {
        let out_dir = dir.path().join(out);
        assert!(vitals()
            .args(["simulate", "--scenario"])
            .arg(&scenario)
            .args(["--seed", seed, "--out"])
            .arg(&out_dir)
            .status()
            .unwrap()
            .success());
        fs::read(out_dir.join("telemetry.jsonl")).unwrap()
    };
    let a = run_with("1", "a");
    let b = run_with("2", "b");
    let c = run_with("1", "c");
    assert_ne!(a, b);
    assert_eq!(a, c);
}
