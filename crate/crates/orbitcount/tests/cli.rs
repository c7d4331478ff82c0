use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn orbitcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitcount")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const COUNT: &str = r#"
spec_version = "1"
[model]
kind = "builtin"
name = "heisenberg"
parameter = 1.0
[lambda]
min = 4.5
max = 40.0
count = 6
[monte_carlo]
samples = 20000
seed = 4
"#;

#[test]
fn count_writes_csv_and_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), COUNT);
    let out = dir.path().join("out");
    let o = orbitcount(&["count", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("count.csv")).unwrap();
    assert!(csv.starts_with("lambda,n,n0,n0_stderr,ratio\n"));
    assert_eq!(csv.lines().count(), 7);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("count.json")).unwrap()).unwrap();
    for key in ["fitted_C", "pass", "rows", "provenance"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["provenance"]["seed"], 4);

    let again = dir.path().join("again");
    let o = orbitcount(&["count", "--config", &cfg, "--out", again.to_str().unwrap(), "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(out.join("count.csv")).unwrap(), fs::read(again.join("count.csv")).unwrap());
}

#[test]
fn tight_ceiling_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), COUNT);
    let out = dir.path().join("out");
    let o = orbitcount(&["count", "--config", &cfg, "--out", out.to_str().unwrap(), "--ceiling-c", "1.0"]);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("count.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], false);
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(orbitcount(&["validate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let cfg = write_config(dir.path(), &COUNT.replace("\"1\"", "\"9\""));
    assert_eq!(orbitcount(&["validate", "--config", &cfg]).status.code(), Some(2));

    let degenerate = r#"
spec_version = "1"
[model]
kind = "schrodinger"
dim = 2
potential = [{ exponents = [2, 0], coeff = 1.0 }, { exponents = [1, 1], coeff = 2.0 }, { exponents = [0, 2], coeff = 1.0 }]
"#;
    let cfg = write_config(dir.path(), degenerate);
    let o = orbitcount(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate along direction"));

    assert_eq!(orbitcount(&["count"]).status.code(), Some(2));
}

#[test]
fn validate_reports_the_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &COUNT.replace("heisenberg", "engel"));
    let o = orbitcount(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("dimension 4, step 3"), "{text}");
    assert!(text.trim_end().ends_with("valid"));
}

#[test]
fn volume_and_sobolev_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{COUNT}[sobolev]\norders = [1]\nfunctions = 10\npoints = 200\n");
    let cfg = write_config(dir.path(), &body);
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(orbitcount(&["volume", "--config", &cfg, "--out", out]).status.code(), Some(0));
    assert_eq!(orbitcount(&["sobolev", "--config", &cfg, "--out", out]).status.code(), Some(0));
    let csv = fs::read_to_string(Path::new(out).join("sobolev.csv")).unwrap();
    assert!(csv.starts_with("order,functions,finite,max_ratio"));
}
