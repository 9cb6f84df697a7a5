//! The `bifree` binary: exit codes and report formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn bifree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_rp_exit_codes() {
    let two = model("two_schmidt.json");
    let o = bifree(&["check-rp", two.to_str().unwrap(), "--all", "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let bad = model("non_rp.json");
    let o = bifree(&["check-rp", bad.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let comp = &report["result"]["components"][1];
    assert_eq!(comp["psd"], false);
    assert!(comp["witness_value"][0].as_f64().unwrap() < -1e-6);

    let o = bifree(&["check-rp", bad.to_str().unwrap(), "--component", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_and_missing_files_exit_2() {
    let dir = std::env::temp_dir().join(format!("bifree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\"components\": [{\"dim\": 2}]}").unwrap();
    for cmd in ["check-rp", "gram", "verify-theorem"] {
        let o = bifree(&[cmd, broken.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
    }
    let o = bifree(&["check-rp", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let two = model("two_schmidt.json");
    let o = bifree(&["moment", two.to_str().unwrap(), "--word", "9.0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn moment_output() {
    let two = model("two_schmidt.json");
    let o = bifree(&["moment", two.to_str().unwrap(), "--word", ""]);
    assert_eq!(stdout(&o), "1+0i\n");

    let o = bifree(&["moment", two.to_str().unwrap(), "--word", "~0.1 1.0 0.0", "--verify", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["result"]["difference"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["tool"], "bifree");
    assert_eq!(report["options"]["seed"], 42);
}

#[test]
fn centered_generators_give_zero_moment() {
    // generators with vanishing trace against the Schmidt weights are centered
    let dir = std::env::temp_dir().join(format!("bifree-centered-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("centered.json");
    std::fs::write(
        &path,
        r#"{"components": [
            {"dim": 2, "generators": [[[[0,0],[1,0]],[[0.5,0],[0,0]]]], "state": {"schmidt": [1, 1]}},
            {"dim": 2, "generators": [[[[1,0],[0,0]],[[0,0],[-1,0]]]], "state": {"schmidt": [1, 1]}}
        ]}"#,
    )
    .unwrap();
    let o = bifree(&["moment", path.to_str().unwrap(), "--word", "0.0 1.0", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let v = &report["result"]["value"];
    assert!(v[0].as_f64().unwrap().abs() <= 1e-9 && v[1].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn verify_theorem_exit_codes() {
    let two = model("two_schmidt.json");
    let o = bifree(&["verify-theorem", two.to_str().unwrap(), "--max-len", "2", "--trials", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = bifree(&["verify-theorem", two.to_str().unwrap(), "--max-len", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = model("non_rp.json");
    let o = bifree(&["verify-theorem", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gram_and_oracle_compare() {
    let three = model("three_components.json");
    let o = bifree(&["gram", three.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["result"]["basis_size"], 21);
    assert_eq!(report["result"]["matrix"].as_array().unwrap().len(), 21);

    let o = bifree(&["oracle-compare", three.to_str().unwrap(), "--count", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = bifree(&["gram", model("non_rp.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_reports() {
    let three = model("three_components.json");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_bifree"))
            .args(["verify-theorem", three.to_str().unwrap(), "--json", "--trials", "50"])
            .env("BIFREE_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
