use std::path::PathBuf;
use std::process::Command;

fn toolplan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toolplan"))
}

fn dataset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../datasets").join(name)
}

#[test]
fn run_with_flags_writes_outputs() {
    let out = tempfile::tempdir().unwrap();
    let status = toolplan()
        .args(["run", "--dataset"])
        .arg(dataset("daily_life.json"))
        .args(["--seeds", "42,101", "--method", "spiral", "--method", "cot:1", "--budget", "10", "--trace"])
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("spiral") && stdout.contains("cot_1"), "{stdout}");
    let records = std::fs::read_to_string(out.path().join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 2 * 24 * 2);
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["rows"].as_array().unwrap().len(), 2);
    assert!(out.path().join("traces").is_dir());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "dataset": dataset("trap_suite.json"),
            "seeds": [42],
            "methods": ["spiral"],
            "backend": {"kind": "scripted", "planner_error_rate": 0.3},
            "search": {"budget": 20}
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = toolplan()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--method", "mcts:15", "--sample-size", "5", "--workers", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let records = std::fs::read_to_string(out.join("records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 5);
    assert!(records.lines().all(|l| l.contains("\"method\":\"mcts_15\"")));
}

#[test]
fn bad_input_fails_cleanly() {
    let result = toolplan().args(["run"]).output().unwrap();
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("--config or --dataset"));

    let result = toolplan()
        .args(["run", "--dataset"])
        .arg(dataset("daily_life.json"))
        .args(["--method", "beam:3"])
        .output()
        .unwrap();
    assert!(!result.status.success());

    let result = toolplan()
        .args(["run", "--dataset"])
        .arg(dataset("daily_life.json"))
        .args(["--alpha", "1.5"])
        .output()
        .unwrap();
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("alpha"));

    let result = toolplan().args(["run", "--dataset", "/nonexistent.json"]).output().unwrap();
    assert!(!result.status.success());
}
