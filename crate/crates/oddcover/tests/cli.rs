use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn oddcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddcover")).args(args).env_remove("ODDCOVER_JOBS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap()
}

#[test]
fn profiles_lists_binomial_count() {
    let out = oddcover(&["profiles", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["profiles"].as_array().unwrap().len(), 6);
    assert_eq!(v["profiles"][0]["n"], serde_json::json!([0, 0, 0, 0, 0, 1]));
}

#[test]
fn build_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tuple.json");
    let out = oddcover(&["build", "1", "--profile", "0,0,0,0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let built: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(built["report"]["all_pass"], true);
    assert_eq!(built["report"]["genus"], 1);
    assert_eq!(built["tuple"]["tau"].as_array().unwrap().len(), 2);

    let verified = oddcover(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(verified.status.code(), Some(0));
    assert_eq!(json(&verified)["all_pass"], true);
}

#[test]
fn verify_on_build_output_always_passes() {
    let dir = tempfile::tempdir().unwrap();
    for (g, profile) in [(2, "0,0,1,0,0,0"), (3, "0,1,0,0,1,0,0,0"), (3, "2,0,0,0,0,0,0,0")] {
        let path = dir.path().join(format!("t{g}.json"));
        let out =
            oddcover(&["build", &g.to_string(), "--profile", profile, "--seed", "5", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(oddcover(&["verify", "--in", path.to_str().unwrap()]).status.code(), Some(0));
    }
}

#[test]
fn verify_rejects_bad_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // (1 2 3) twice: gamma at infinity contains a transposition pair.
    std::fs::write(&path, r#"{"g":1,"tau":[{"n":4,"one_line":[2,3,1,4]},{"n":4,"one_line":[2,3,1,4]}]}"#).unwrap();
    let out = oddcover(&["verify", "--in", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("g,profile,three_cycles"));
    assert!(text.lines().nth(1).unwrap().contains("false"));
    assert_eq!(stderr_error(&out)["exit_code"], 1);
}

#[test]
fn invalid_input_exits_two() {
    let out = oddcover(&["build", "2", "--profile", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "invalid_input");
    assert_eq!(oddcover(&["elliptic", "--tau", "0.5,0"]).status.code(), Some(2));
    assert_eq!(oddcover(&["quadric", "2", "--profile", "x"]).status.code(), Some(2));
    assert_eq!(oddcover(&["verify", "--in", "/nonexistent/tuple.json"]).status.code(), Some(2));
    assert_eq!(oddcover(&["census", "1", "--shard", "3/2"]).status.code(), Some(2));
}

#[test]
fn large_census_is_refused() {
    let out = oddcover(&["census", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"], "refused");
}

#[test]
fn census_shards_merge() {
    let whole = json(&oddcover(&["census", "1"]));
    assert_eq!(whole["total_classes"], 4);
    let mut tuples = 0;
    let mut classes = 0;
    for i in 0..4 {
        let part = json(&oddcover(&["census", "1", "--shard", &format!("{i}/4"), "--jobs", "2"]));
        tuples += part["total_tuples"].as_u64().unwrap();
        classes += part["total_classes"].as_u64().unwrap();
    }
    assert_eq!(tuples, whole["total_tuples"].as_u64().unwrap());
    assert_eq!(classes, whole["total_classes"].as_u64().unwrap());
}

#[test]
fn census_infeasible_profile_is_empty() {
    let v = json(&oddcover(&["census", "1", "--profile", "1,0,0,0"]));
    assert_eq!(v["total_tuples"], 0);
    assert_eq!(v["counts"], serde_json::json!([]));
}

#[test]
fn census_resume_checks_task() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cps = cp.to_str().unwrap();
    let first = oddcover(&["census", "1", "--checkpoint", cps]);
    assert_eq!(first.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&cp).unwrap()).unwrap();
    assert_eq!(saved["cursor"], 8);
    assert_eq!(saved["task_hash"].as_str().unwrap().len(), 64);

    let resumed = oddcover(&["census", "1", "--resume", cps]);
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(resumed.stdout, first.stdout);

    let mismatch = oddcover(&["census", "1", "--resume", cps, "--allow-intransitive"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn jobs_from_environment() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_oddcover")).args(["census", "1"]).env("ODDCOVER_JOBS", "3").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_oddcover"))
        .args(["census", "1"])
        .env("ODDCOVER_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn elliptic_square_lattice() {
    let out = oddcover(&["elliptic", "--tau", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tau"], serde_json::json!([0.0, 1.0]));
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 4);
    for s in sols {
        assert!(s["residual"].as_f64().unwrap() < 1e-8);
        assert_eq!(s["a"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn elliptic_accepts_negative_real_part() {
    let out = oddcover(&["elliptic", "--tau", "-0.3,0.9", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("orbit_id,residual,a1_re"));
}

#[test]
fn quadric_reports_rank() {
    let v = json(&oddcover(&["quadric", "3", "--profile", "2,0,0,0,0,0,0,0"]));
    assert_eq!(v["rank"], 7);
    assert_eq!(v["coefficients"][0], serde_json::json!([1, 5]));
}

#[test]
fn identical_config_gives_identical_bytes() {
    for args in [
        &["build", "2", "--profile", "0,1,0,0,0,0", "--seed", "9"][..],
        &["census", "1", "--jobs", "4"][..],
        &["elliptic", "--tau", "0.25,1.1"][..],
        &["profiles", "3", "--format", "csv"][..],
    ] {
        let (a, b) = (oddcover(args), oddcover(args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profiles.csv");
    let out = oddcover(&["profiles", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(Path::new(&path).exists());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "g,profile,parity,h0\n1,0 0 0 0,odd,1\n");
}
