//! End-to-end runs of the `combmetric` binary on the files in `data/`.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_combmetric"))
        .args(args)
        .output()
        .expect("spawn combmetric");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

#[test]
fn weight_and_distance() {
    let burst = data("burst2-n4.json");
    let (code, out, _) = run(&["--covering", &burst, "weight", "--vector", "1,0,1,0"]);
    assert_eq!((code, out.trim()), (0, "2"));
    let (code, out, _) = run(&[
        "--covering", &burst, "distance", "--vector", "1,0,0,0", "--vector", "0,0,0,1",
    ]);
    assert_eq!((code, out.trim()), (0, "2"));
    let (code, out, _) = run(&["--q", "3", "--covering", &burst, "weight", "--vector", "2,2,0,0"]);
    assert_eq!((code, out.trim()), (0, "1"));
}

#[test]
fn identity_check_exit_codes() {
    let (code, out, _) = run(&["--covering", &data("block22.json"), "identity-check"]);
    assert_eq!(code, 0);
    assert!(out.contains("admits, k=2"), "{out}");
    let (code, out, _) = run(&["--covering", &data("burst2-n4.json"), "identity-check"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("refuted"), "{out}");
}

#[test]
fn identity_check_witness_has_different_duals() {
    let (code, out, _) = run(&["--covering", &data("burst2-n4.json"), "--json", "identity-check"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let w = &v["witness"];
    assert_ne!(w["first_dual"], w["second_dual"]);
}

#[test]
fn normalize_round_trips() {
    let (code, out, _) = run(&["--covering", &data("overlap-two-components.json"), "normalize", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sets"], serde_json::json!([[1, 2], [2, 3], [4, 5]]));
    assert_eq!(v["dropped"], serde_json::json!([[2]]));

    let path = std::env::temp_dir().join(format!("combmetric-normalized-{}.json", std::process::id()));
    std::fs::write(&path, &out).unwrap();
    let (code, again, _) = run(&["--covering", path.to_str().unwrap(), "normalize", "--json"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    let w: serde_json::Value = serde_json::from_str(&again).unwrap();
    assert_eq!(w["sets"], v["sets"]);
    assert!(w.get("dropped").is_none());
}

#[test]
fn mep_check_exit_codes() {
    let (code, out, _) = run(&["--covering", &data("block22.json"), "mep-check"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["--covering", &data("three-pairs.json"), "--json", "mep-check"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let verdict = &v["verdict"];
    assert_eq!(verdict["satisfies"], false);
    assert_eq!(verdict["witness"]["kind"], "three-components");
    assert_eq!(verdict["witness"]["extension_refuted"], true);
}

#[test]
fn enumerator_and_dual() {
    let cov = data("block22.json");
    let code_file = data("code-f2.json");
    let (code, out, _) = run(&["--covering", &cov, "--code", &code_file, "--json", "enumerator"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!([1, 2, 1]));
    let (code, out, _) = run(&["--covering", &cov, "--code", &code_file, "--json", "dual"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["generators"], serde_json::json!([[1, 1, 0, 0], [0, 0, 1, 1]]));
}

#[test]
fn isometry_group_and_decompose() {
    let cov = data("block22.json");
    let (code, out, _) = run(&["--covering", &cov, "isometry-group"]);
    assert_eq!(code, 0);
    assert!(out.contains("|G| = 8") && out.contains("= 72"), "{out}");

    let dir = std::env::temp_dir();
    let swap = dir.join(format!("combmetric-swap-{}.json", std::process::id()));
    std::fs::write(&swap, r#"{"matrix": [[0,0,1,0],[0,0,1,1],[1,0,0,0],[0,1,0,0]]}"#).unwrap();
    let (code, out, err) = run(&["--covering", &cov, "decompose", "--matrix", swap.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}{err}");

    // Mixing the two blocks is not weight-preserving.
    std::fs::write(&swap, r#"{"matrix": [[1,0,1,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#).unwrap();
    let (code, _, _) = run(&["--covering", &cov, "decompose", "--matrix", swap.to_str().unwrap()]);
    std::fs::remove_file(&swap).ok();
    assert_eq!(code, 1);
}

#[test]
fn check_axioms_passes() {
    let (code, out, _) = run(&["--q", "3", "--covering", &data("burst2-n4.json"), "check-axioms"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn bad_input_exits_2() {
    let (code, _, _) = run(&["weight"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["--covering", "/nonexistent.json", "normalize"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["--q", "4", "--covering", &data("block22.json"), "weight", "--vector", "1,0,0,0"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["--covering", &data("block22.json"), "weight", "--vector", "1,0"]);
    assert_eq!(code, 2);
}
