use std::process::{Command, Output};

fn steering(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steering")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn catalog_lists_the_builtin_witnesses() {
    let o = steering(&["catalog"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["esi", "pauli", "dodecahedron", "family4"] {
        assert!(s.contains(name), "{name} missing:\n{s}");
    }
}

#[test]
fn csv_header_carries_provenance() {
    let s = stdout(&steering(&["--seed", "9", "lhs", "pauli", "--eps", "0.005"]));
    assert!(s.contains("# seed=9"));
    assert!(s.contains("# method=lemma"));
    assert!(s.contains("1.18949937343"), "{s}");
}

#[test]
fn plateau_closed_form() {
    let o = steering(&["--format", "json", "plateau", "esi"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["rows"].as_array().unwrap().len() > 1);
    assert!(stdout(&o).contains("0.00325960054503"));
}

#[test]
fn no_violation_exits_with_two() {
    assert_eq!(steering(&["plateau", "pauli", "--method", "lemma"]).status.code(), Some(2));
    assert_eq!(steering(&["randomness", "esi", "--value", "1"]).status.code(), Some(2));
}

#[test]
fn bad_input_exits_with_one() {
    let o = steering(&["lhs", "nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(steering(&["lhs", "esi", "--eps", "2"]).status.code(), Some(1));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["--seed", "4", "lhs", "esi", "--eps", "0.004", "--method", "seesaw"];
    let a = steering(&args);
    let b = steering(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["--seed", "4", "plateau", "esi", "--method", "sdp", "--eps-x", "0", "--eps-y", "0"];
    assert_eq!(steering(&args).stdout, steering(&args).stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out.json");
    std::fs::write(&cfg, format!("seed = 11\nformat = \"json\"\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    let o = steering(&["--config", cfg.to_str().unwrap(), "lhs", "esi"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["seed"], "11");

    let o = steering(&["--config", cfg.to_str().unwrap(), "--seed", "12", "lhs", "esi"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["seed"], "12");

    std::fs::write(&cfg, "sede = 3\n").unwrap();
    assert_eq!(steering(&["--config", cfg.to_str().unwrap(), "lhs", "esi"]).status.code(), Some(1));
}

#[test]
fn exported_witness_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let o = steering(&["--out", path.to_str().unwrap(), "export", "dodecahedron"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = steering(&["lhs", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0.523606797"), "{}", stdout(&o));
}

#[test]
fn robustness_reports_eta() {
    let s = stdout(&steering(&["robustness", "esi"]));
    assert!(s.contains("0.333333333"), "{s}");
    let s = stdout(&steering(&["robustness", "family4"]));
    assert!(s.contains("0.24999"), "{s}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(steering(&["robustness", "esi", "--bogus"]).status.code(), Some(1));
    assert_eq!(steering(&["--help"]).status.code(), Some(0));
}
