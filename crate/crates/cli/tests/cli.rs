use std::path::PathBuf;
use std::process::Command;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn exit_code(verb: &str, path: &PathBuf, extra: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_cocycle"))
        .arg(verb)
        .arg("--scenario")
        .arg(path)
        .args(["--format", "records"])
        .args(extra)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn matched_pair_verifies() {
    assert_eq!(exit_code("verify", &scenario("matched.toml"), &["--samples", "30"]), 0);
    assert_eq!(exit_code("verify", &scenario("period2.toml"), &["--samples", "30"]), 0);
}

#[test]
fn perturbed_pair_fails_periodic_data() {
    assert_eq!(exit_code("periodic-data", &scenario("perturbed.toml"), &[]), 1);
}

#[test]
fn hyperbolic_constant_is_not_bunched() {
    assert_eq!(exit_code("bunching", &scenario("not_bunched.toml"), &[]), 1);
}

#[test]
fn bad_scenario_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "schema = \"cocycle-rigidity/scenario/v0\"\nseed = 1\n").unwrap();
    assert_eq!(exit_code("closing", &path, &[]), 2);
}

#[test]
fn out_directory_receives_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let code = exit_code("closing", &scenario("matched.toml"), &["--out", out.to_str().unwrap(), "--samples", "20"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out.join("closing.records")).unwrap();
    assert!(text.starts_with("#verb\tclosing\tseed=42"));
    assert!(text.trim_end().ends_with("#overall\tpass"));
}
