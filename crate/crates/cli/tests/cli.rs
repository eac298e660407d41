use std::process::{Command, Output};

fn paucity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paucity"))
        .args(args)
        .env_remove("PAUCITY_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes() {
    let o = paucity(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 4);
    assert!(!out.contains("FAIL"));
}

#[test]
fn zero_tuple_both_methods() {
    let o = paucity(&["count", "--family", "vino", "--t", "2", "--p", "3", "--h", "0,0,0", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("count=15").count(), 2, "{out}");
}

#[test]
fn structured_tuple_takes_pair_branch() {
    let o = paucity(&[
        "--format", "json", "count", "--family", "vino", "--t", "2", "--p", "10", "--h", "1,3,7", "--method", "both",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["count"], rows[1]["count"]);
    assert_eq!(rows[1]["breakdown"][0]["label"], "pair");
    assert_eq!(rows[1]["h"][2], "7");
}

#[test]
fn negative_h_accepted() {
    let o = paucity(&["count", "--family", "odd", "--k", "2", "--s", "3", "--p", "4", "--h", "-3,-9", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(paucity(&["count", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(paucity(&["frobnicate"]).status.code(), Some(2));
    let wrong_len = paucity(&["count", "--family", "vino", "--t", "2", "--p", "3", "--h", "1,2"]);
    assert_eq!(wrong_len.status.code(), Some(2));
    assert_eq!(paucity(&["upsilon", "--kappa", "1"]).status.code(), Some(2));
}

#[test]
fn budget_exit_three() {
    let o = paucity(&["count", "--family", "vino", "--t", "2", "--p", "100000", "--h", "1,3,7", "--method", "brute"]);
    assert_eq!(o.status.code(), Some(3));
}

fn without_timing(mut v: serde_json::Value) -> serde_json::Value {
    if let Some(m) = v.as_object_mut() {
        m.remove("elapsed_ms");
    }
    v
}

#[test]
fn json_is_reproducible() {
    let args = ["--format", "json", "count", "--family", "quartic", "--t", "2", "--p", "12", "--h", "3,15,63"];
    let a: serde_json::Value = serde_json::from_slice(&paucity(&args).stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&paucity(&args).stdout).unwrap();
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn classify_reports_pair() {
    let o = paucity(&["--format", "json", "classify", "--family", "vino", "--p", "10", "--h", "1,3,7"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "pair");
    assert_eq!(v["a"], 2);
    assert_eq!(v["b"], 1);
    assert_eq!(v["discriminant"], "0");
}

#[test]
fn sweep_writes_csv_and_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let args = ["sweep", "--family", "vino", "--t", "2", "--p", "3", "--hmax", "2", "--out", p];
    let o = paucity(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("family,t_or_s,P,h,method,count,branch,elapsed_ms"));
    // 5^3 tuples, one brute and one fast row each
    assert_eq!(text.lines().count(), 1 + 2 * 125);

    let again = paucity(&args);
    assert_ne!(again.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn bench_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    let o = paucity(&[
        "--format", "json", "bench", "--family", "quartic", "--p-ladder", "4,6", "--samples", "3", "--seed", "9", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3 * 2 * 2);
}

#[test]
fn slope_of_zero_tuple() {
    let o = paucity(&["--format", "json", "slope", "--family", "vino", "--t", "2", "--h", "0,0,0", "--ladder", "8,16,32"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = v["slope"].as_f64().unwrap();
    assert!((s - 2.0).abs() < 0.15, "{s}");
}

#[test]
fn short_ladder_is_usage_error() {
    let o = paucity(&["slope", "--family", "vino", "--t", "2", "--h", "0,0,0", "--ladder", "8,16"]);
    assert_eq!(o.status.code(), Some(2));
}
