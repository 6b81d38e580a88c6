use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sievelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sievelab")).args(args).current_dir(dir).env_remove("SIEVELAB_WORKERS").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn construct_sieve_verify_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("params.json"), r#"{"n_max": 100000, "y": 42000, "epsilon": "49/100"}"#).unwrap();
    let c = sievelab(&["construct", "--which", "interval-sharp", "--params", "params.json", "--out-dir", "fam"], d);
    assert_eq!(c.status.code(), Some(0));
    let s = sievelab(&["sieve", "--family", "fam/family.json", "--set-out", "a.json"], d);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(report(&s)["result"]["admissible"]["elements"], serde_json::json!([0, 1]));
    let v = sievelab(
        &["verify", "--family", "fam/family.json", "--theorem", "interval", "--predictions", "fam/predictions.json"],
        d,
    );
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    let r = report(&v);
    assert_eq!(r["result"]["verdict"]["conclusion"], "pass");
    assert_eq!(r["result"]["verdict"]["hypotheses_met"], true);
    assert!(r["result"]["predictions"].as_array().unwrap().iter().all(|o| o["holds"] == true));
}

#[test]
fn default_interval_sharp_misses_hypotheses() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(sievelab(&["construct", "--which", "interval-sharp", "--out-dir", "f"], d).status.success());
    let v = sievelab(&["verify", "--family", "f/family.json", "--theorem", "main"], d);
    assert_eq!(v.status.code(), Some(2));
}

#[test]
fn empty_range_family_admits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("f.json"), r#"{"schema":"sievelab/family/v1","n_max":0,"epsilon":"1/4","y_range":[2,2],"constraints":[]}"#)
        .unwrap();
    let out = sievelab(&["sieve", "--family", "f.json", "--mode", "brute"], d);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["admissible"]["elements"], serde_json::json!([0]));
}

#[test]
fn unknown_theorem_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sievelab(&["verify", "--family", "x.json", "--theorem", "riemann"], tmp.path());
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown theorem id") && err.contains("kap-sieve"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_inputs_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("f.json"),
        r#"{"schema":"sievelab/family/v1","n_max":10,"epsilon":"1/4","y_range":[2,9],"constraints":[{"p":4,"parts":[]}]}"#,
    )
    .unwrap();
    let out = sievelab(&["sieve", "--family", "f.json"], d);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraints[0].p"));

    fs::write(d.join("cfg.json"), r#"{"schema":"sievelab/config/v1","command":{"subcommand":"sieve","famly":"f.json"},"seed":1}"#)
        .unwrap();
    let out = sievelab(&["run", "--config", "cfg.json"], d);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("command.famly"), "{err}");
    fs::write(d.join("cfg.json"), r#"{"command":{"subcommand":"analyze","set":"1,2","cover_kmax":"x"}}"#).unwrap();
    let err = String::from_utf8_lossy(&sievelab(&["run", "--config", "cfg.json"], d).stderr).into_owned();
    assert!(err.contains("command.cover_kmax"), "{err}");
}

#[test]
fn reports_replay_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let c = sievelab(&["--seed", "11", "--out", "construct.json", "construct", "--which", "flush", "--out-dir", "fl"], d);
    assert_eq!(c.status.code(), Some(0));
    let first_family = fs::read(d.join("fl/family.json")).unwrap();
    let first_predictions = fs::read(d.join("fl/predictions.json")).unwrap();
    let replay = sievelab(&["run", "--config", "construct.json"], d);
    assert_eq!(replay.status.code(), Some(0));
    let original: Value = serde_json::from_slice(&fs::read(d.join("construct.json")).unwrap()).unwrap();
    assert_eq!(without_timing(report(&replay)), without_timing(original.clone()));
    assert_eq!(fs::read(d.join("fl/family.json")).unwrap(), first_family);
    assert_eq!(fs::read(d.join("fl/predictions.json")).unwrap(), first_predictions);
    assert_eq!(original["config"]["seed"], 11);
    assert_eq!(original["config"]["command"]["resolved"]["n_max"], 400);

    let v = sievelab(
        &["--seed", "3", "--out", "verify.json", "verify", "--family", "fl/family.json", "--theorem", "gcd-lemma", "--set", "0,73,146,219"],
        d,
    );
    let code = v.status.code();
    let replay = sievelab(&["run", "--config", "verify.json"], d);
    assert_eq!(replay.status.code(), code);
    let original: Value = serde_json::from_slice(&fs::read(d.join("verify.json")).unwrap()).unwrap();
    assert_eq!(
        serde_json::to_string(&without_timing(report(&replay))).unwrap(),
        serde_json::to_string(&without_timing(original)).unwrap()
    );
}

#[test]
fn worker_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(sievelab(&["construct", "--which", "half-power", "--out-dir", "h"], d).status.success());
    let one = sievelab(&["--workers", "1", "sieve", "--family", "h/family.json"], d);
    let many = Command::new(env!("CARGO_BIN_EXE_sievelab"))
        .args(["sieve", "--family", "h/family.json"])
        .current_dir(d)
        .env("SIEVELAB_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(report(&many)["config"]["workers"], 4);
    assert_eq!(report(&one)["result"]["admissible"], report(&many)["result"]["admissible"]);
}

#[test]
fn subset_sums_summary_and_measure() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("mu.json"), r#"{"schema":"sievelab/measure/v1","p":5,"weights":["1/2","1/2","0","0","0"]}"#).unwrap();
    let out = sievelab(&["subset-sums", "--set", "1,2", "--p", "5", "--measure", "mu.json", "--scan"], d);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out)["result"].clone();
    assert_eq!(r["weighted_average"], "1");
    assert_eq!(r["min_count"], "0");
    assert_eq!(r["argmin"], 4);
    assert!(r["concentration"]["a"].as_u64().is_some());
    let bad = sievelab(&["subset-sums", "--set", "1,2", "--p", "6"], d);
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn analyze_inline_set() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sievelab(&["analyze", "--set", "0,5,10,21,42,105", "--cover-kmax", "3"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["set"]["size"], 6);
}

#[test]
fn empty_corpus_gives_empty_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sievelab(&["suite", "--corpus", "."], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["fixtures"], 0);
    assert_eq!(r["result"]["rows"], serde_json::json!([]));
}

fn write_fixture(dir: &Path, name: &str, manifest: &str) {
    let d = dir.join(name);
    fs::create_dir_all(&d).unwrap();
    fs::write(d.join("fixture.json"), manifest).unwrap();
}

#[test]
fn suite_reports_falsifying_and_broken_fixtures() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // default parameters: hypotheses unmet, and the fixture says so
    write_fixture(
        d,
        "unmet",
        r#"{"schema":"sievelab/fixture/v1","description":"eps too small","construct":{"which":"interval-sharp"},
            "checks":[{"theorem":"main","expect_exit":2}]}"#,
    );
    write_fixture(d, "broken", r#"{"schema":"sievelab/fixture/v1","description":"x","family":"missing.json","checks":[]}"#);
    let out = sievelab(&["suite", "--corpus", "."], d);
    assert_eq!(out.status.code(), Some(1));
    let rows = report(&out)["result"]["rows"].as_array().unwrap().clone();
    let unmet = rows.iter().find(|r| r["fixture"] == "unmet" && r["check"] == "main").unwrap();
    assert_eq!(unmet["exit_code"], 2);
    assert_eq!(unmet["ok"], true);
    let broken = rows.iter().find(|r| r["fixture"] == "broken").unwrap();
    assert_eq!(broken["ok"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("MISMATCH"));
}

#[test]
fn pinned_ratio_drift_is_caught() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_fixture(
        d,
        "pinned",
        r#"{"schema":"sievelab/fixture/v1","description":"kap-sieve ratio","construct":{"which":"kap-sieve-small-p0"},
            "checks":[{"theorem":"kap-sieve","expect_exit":0,"pinned":{"|A| / ((log N)^(1/2-eps) + p_0^(1/2-eps))":"0.9"}}]}"#,
    );
    let out = sievelab(&["suite", "--corpus", "."], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(sievelab(&["suite", "--corpus", ".", "--pin"], d).status.success());
    let again = sievelab(&["suite", "--corpus", "."], d);
    assert_eq!(again.status.code(), Some(0));
    let manifest = fs::read_to_string(d.join("pinned/fixture.json")).unwrap();
    assert!(manifest.contains("0.851585"), "{manifest}");
}

#[test]
fn shipped_corpus_is_deterministic() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let tmp = tempfile::tempdir().unwrap();
    let a = sievelab(&["--workers", "1", "suite", "--corpus", corpus.to_str().unwrap()], tmp.path());
    let b = sievelab(&["suite", "--corpus", corpus.to_str().unwrap()], tmp.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(report(&a)["result"], report(&b)["result"]);
}
