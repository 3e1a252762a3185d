//! End-to-end runs of the `hvzlab` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hvzlab"));
    c.env_remove("HVZLAB_OUT").env_remove("HVZLAB_THREADS");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn localize_tanh_gives_constant_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config("tanh1d.json");
    let (code, err) = run(&["localize", "--config", cfg.to_str().unwrap(), "--alpha", "1", "--out", out]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("localized.json")).unwrap()).unwrap();
    assert_eq!(v["constant"], 1.0);
}

#[test]
fn hvz_is_deterministic_and_reproducible_from_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let cfg = config("tanh1d.json");
    for d in [&a, &b] {
        let (code, err) = run(&["hvz", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read(&a, "hvz.json"), read(&b, "hvz.json"));
    let resolved = a.join("resolved_config.json");
    let (code, err) = run(&["hvz", "--config", resolved.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(read(&a, "hvz.json"), read(&c, "hvz.json"));
    assert_eq!(read(&a, "resolved_config.json"), read(&c, "resolved_config.json"));
    let csv = String::from_utf8(read(&a, "essential_spectrum.csv")).unwrap();
    assert!(csv.starts_with("a,b\n-1,"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["demo", "--name", "noncommute"])
        .env("HVZLAB_OUT", dir.path())
        .env("HVZLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("noncommute.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema_version": 1, "dim": 2, "potential": {"terms": [{"factors": [{"subspace": [[1, 0, 0]], "radial": {}}]}]}}"#,
    )
    .unwrap();
    let (code, err) = run(&["hvz", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 2);
    assert!(err.contains("potential.terms[0].factors[0].subspace[0]"), "{err}");
    assert_eq!(run(&["verify", "--suite", "nope", "--out", out]).0, 2);
    assert_eq!(run(&["hvz", "--out", out]).0, 2);
    let cfg = config("tanh1d.json");
    assert_eq!(run(&["localize", "--config", cfg.to_str().unwrap(), "--alpha", "1,2", "--out", out]).0, 2);
    assert_eq!(run(&["demo", "--name", "noncommute", "--threads", "0", "--out", out]).0, 2);
}

#[test]
fn verify_writes_machine_readable_results() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["verify", "--suite", "morphism,projection", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["passed"], true);
}
