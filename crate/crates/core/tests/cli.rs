use std::process::Command;

use serde_json::Value;

fn twohol(args: &[&str]) -> (bool, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twohol"))
        .args(args)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        out.status.success(),
        v,
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn validate_builtin() {
    let (ok, v, _) = twohol(&["--task", "validate", "--cm", "cm_s3"]);
    assert!(ok);
    assert_eq!(v, serde_json::json!([]));
}

#[test]
fn enumerate_triangle() {
    let (ok, v, _) = twohol(&[
        "--task",
        "enumerate",
        "--cm",
        "cm_02",
        "--geometry",
        "triangle",
    ]);
    assert!(ok);
    assert_eq!(v["count"], 8);
}

#[test]
fn evaluate_and_partition() {
    let (ok, v, _) = twohol(&["--task", "evaluate", "--geometry", "cup", "--workers", "2"]);
    assert!(ok);
    assert_eq!(v["tgt_edges"], 2);
    let (ok, v, _) = twohol(&[
        "--task",
        "partition",
        "--cm",
        "cm_s3",
        "--geometry",
        "torus_partition",
    ]);
    assert!(ok);
    assert_eq!(v["value"], serde_json::json!([4, 1]));
}

#[test]
fn files_round_trip() {
    let dir = std::env::temp_dir().join(format!("twohol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cm = dir.join("cm.json");
    let fixed = dir.join("fixed.json");
    let moved = dir.join("moved.json");
    std::fs::write(
        &cm,
        r#"{"order":2,"mul":[[0,1],[1,0]],"t":[0],"act":[[0],[0]]}"#,
    )
    .unwrap();
    std::fs::write(&fixed, r#"{"0": 1}"#).unwrap();
    let (ok, v, _) = twohol(&[
        "--task",
        "enumerate",
        "--cm",
        cm.to_str().unwrap(),
        "--geometry",
        "triangle",
        "--fix-boundary",
        fixed.to_str().unwrap(),
    ]);
    assert!(ok);
    assert_eq!(v["count"], 2);
    let (ok, _, _) = twohol(&[
        "--task",
        "move",
        "--geometry",
        "square",
        "--site",
        "sub:0",
        "--out",
        moved.to_str().unwrap(),
    ]);
    assert!(ok);
    let (ok, v, _) = twohol(&[
        "--task",
        "enumerate",
        "--cm",
        "cm_02",
        "--geometry",
        moved.to_str().unwrap(),
    ]);
    assert!(ok);
    assert_eq!(v["count"], 256);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn errors_are_json_records() {
    let (ok, _, err) = twohol(&["--task", "evaluate", "--geometry", "no_such_geometry"]);
    assert!(!ok);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "reference");
    let (ok, _, err) = twohol(&[
        "--task",
        "compose",
        "--geometry",
        "b_times",
        "--geometry",
        "cup",
    ]);
    assert!(!ok);
    assert!(err.contains("composition"));
}

#[test]
fn selftest_single_criterion() {
    let (ok, v, _) = twohol(&["--task", "selftest", "--site", "3"]);
    assert!(ok);
    assert_eq!(v[0]["passed"], true);
}
