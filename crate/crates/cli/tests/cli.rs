use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convex-lines"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_csv_matches_known_small_table() {
    let o = run(&["count", "--n1", "2", "--n2", "2", "--kmax", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    // Lines to (2, 2): the diagonal; two edges in 3 ways; three edges in 1 way.
    assert_eq!(stdout(&o), "n1,n2,k,count\n2,2,1,1\n2,2,2,3\n2,2,3,1\n");
}

#[test]
fn maxvert_json() {
    let o = run(&["maxvert", "--n1", "6", "--n2", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // (1,0) + (2,1) + 2(1,1) + (1,2) + (0,1) reaches (6, 6); six distinct
    // directions already need a coordinate sum of at least 8.
    assert_eq!(v["max_vertices"], 5);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--n1", "x", "--n2", "2", "--kmax", "1"]).status.code(), Some(2));
    assert_eq!(run(&["maxvert", "--n1", "3", "--n2", "3", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(run(&["asymptotics-table", "--ell-grid", "1:0:1"]).status.code(), Some(2));
}

#[test]
fn failed_calibration_exits_1() {
    // Twice the typical vertex number is beyond what the ensemble can reach.
    let o = run(&["calibrate", "--n1", "300", "--n2", "300", "--k", "68", "--exact"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["converged"], false);
    let ok = run(&["calibrate", "--n1", "300", "--n2", "300", "--k", "5", "--exact"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn suite_report_is_deterministic() {
    let a = run(&["suite", "shapes", "--seed", "3"]);
    let b = run(&["suite", "shapes", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    for c in v["checks"].as_array().unwrap() {
        for key in ["check", "target", "observed", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing");
        }
    }
}

#[test]
fn valtr_warns_and_replays() {
    let a = run(&["sample-valtr", "--n", "100", "--k", "5", "--seed", "9", "--samples", "3"]);
    let b = run(&["sample-valtr", "--n", "100", "--k", "5", "--seed", "9", "--samples", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("warning"));
    assert_eq!(stdout(&a).lines().count(), 3);
    let quiet = run(&["sample-valtr", "--n", "1000", "--k", "5"]);
    assert!(quiet.stderr.is_empty());
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = std::env::temp_dir().join(format!("convex-lines-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# test\nseed = 9\nsamples = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_cfg = run(&["sample-valtr", "--n", "1000", "--k", "4", "--config", cfg]);
    let direct = run(&["sample-valtr", "--n", "1000", "--k", "4", "--seed", "9", "--samples", "3"]);
    assert_eq!(from_cfg.stdout, direct.stdout);
    let overridden = run(&["sample-valtr", "--n", "1000", "--k", "4", "--seed", "1", "--config", cfg]);
    let seed1 = run(&["sample-valtr", "--n", "1000", "--k", "4", "--seed", "1", "--samples", "3"]);
    assert_eq!(overridden.stdout, seed1.stdout);
    std::fs::write(dir.join("bad.cfg"), "no equals sign\n").unwrap();
    let bad = run(&["suite", "shapes", "--config", dir.join("bad.cfg").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn svg_and_out_file() {
    let dir = std::env::temp_dir().join(format!("convex-lines-svg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("lines.svg");
    let o = run(&[
        "sample-gibbs", "--beta1", "0.2", "--samples", "2", "--format", "svg", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 3);
}

#[test]
fn gibbs_json_lines_carry_seed_and_params() {
    let o = run(&["sample-gibbs", "--beta1", "0.3", "--samples", "2", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["seed"], 5);
    assert_eq!(lines[1]["seed"], 6);
    assert!(lines[0]["params"].is_object());
}

#[test]
fn asymptotics_table_rows() {
    let o = run(&["asymptotics-table", "--ell-grid", "0.5:1.5:0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 4);
    assert!(s.contains("\n1,0.7493"));
}
