use std::process::Command;

use gsdesign::cli;
use gsdesign::document::{DesignDocument, SCHEMA};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gsdesign").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn text_report_layout() {
    let (code, out, _) = run(&["double-triangular", "-l", "2", "--sigma", "2", "--performance"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Double triangular test, L = 2\n"));
    assert!(out.contains("Hypotheses: H0: tau = 0 versus H1: tau != 0"));
    assert!(out.contains("Group size: n = 875.5"));
    assert!(out.contains("P(reject H0 | 0) = 0.053"));
    assert!(out.contains("max E(N) = 2716.4, max N = 3501.9"));
}

#[test]
fn every_subcommand_emits_schema_valid_json() {
    let v = validator();
    let cases: &[&[&str]] = &[
        &["haybittle-peto", "-l", "2"],
        &["wang-tsiatis", "--omega", "0", "--performance", "--tau-points", "11"],
        &["inner-wedge", "-l", "2", "--omega", "0.25", "--sigma", "2"],
        &["double-triangular", "--performance", "--tau-points", "5"],
        &["power-family", "--alpha", "0.1", "--beta", "0.1", "--sigma", "1,2", "--ratio", "2", "--omega", "-0.25"],
        &["triangular", "-l", "4", "--delta", "0.3"],
        &["triangular", "-l", "1", "--performance", "--tau-min", "-0.1", "--tau-max", "0.5", "--tau-points", "3"],
    ];
    for args in cases {
        let mut args = args.to_vec();
        args.extend(["--format", "json"]);
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let value: Value = serde_json::from_str(&out).unwrap();
        let errors: Vec<String> = v.iter_errors(&value).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        let doc = DesignDocument::from_json(&out).unwrap();
        assert_eq!(doc.to_json(), out, "{args:?}");
    }
}

#[test]
fn schema_rejects_foreign_documents() {
    let v = validator();
    let (_, out, _) = run(&["triangular", "--format", "json"]);
    let mut value: Value = serde_json::from_str(&out).unwrap();
    value["outputs"]["surprise"] = Value::Bool(true);
    assert!(!v.is_valid(&value));
    let mut value: Value = serde_json::from_str(&out).unwrap();
    value["schema_version"] = Value::from(2);
    assert!(!v.is_valid(&value));
}

#[test]
fn csv_curves() {
    let (code, out, _) = run(&["triangular", "--format", "csv", "--tau-points", "7"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "tau,power,ess");
    assert_eq!(lines.len(), 8);
    for row in &lines[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 3);
    }
}

#[test]
fn validation_errors_name_the_flag() {
    for (args, flag) in [
        (vec!["haybittle-peto", "--alpha", "1.5"], "--alpha"),
        (vec!["wang-tsiatis", "--delta", "-0.2"], "--delta"),
        (vec!["inner-wedge", "--sigma", "1,2,3"], "--sigma"),
        (vec!["power-family", "--sigma", "0"], "--sigma"),
        (vec!["triangular", "--stages", "0"], "--stages"),
        (vec!["haybittle-peto", "--omega", "0.2"], "--omega"),
        (vec!["double-triangular", "--bogus"], "--bogus"),
        (vec!["triangular", "--format", "xml"], "--format"),
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(out.is_empty());
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("double-triangular"));
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
    let (code, _, _) = run(&[]);
    assert_eq!(code, 2);
}

#[test]
fn files_sidecar_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("design.json");
    let svg = dir.path().join("curves.svg");
    let d = design.to_str().unwrap();
    let args = ["power-family", "--omega", "0", "--format", "json", "--out", d, "--svg", svg.to_str().unwrap()];
    let (code, out, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let first = std::fs::read_to_string(&design).unwrap();
    DesignDocument::from_json(&first).unwrap();
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("design.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tool"], "gsdesign");
    assert_eq!(meta["arguments"][0], "power-family");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    // Identical invocations give identical data files.
    assert_eq!(run(&args).0, 0);
    assert_eq!(std::fs::read_to_string(&design).unwrap(), first);

    let (code, out, _) = run(&["curves", "--design", d, "--format", "csv", "--tau-points", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);

    let (code, out, err) = run(&["simulate", "--design", d, "--reps", "20000", "--tau", "0.2", "--seed", "3"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("P(reject)"));
    let (code, json, _) = run(&["simulate", "--design", d, "--reps", "20000", "--seed", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let again = run(&["simulate", "--design", d, "--reps", "20000", "--seed", "3", "--format", "json"]).1;
    assert_eq!(json, again);
    let sim: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(sim["replicates"], 20000);
}

#[test]
fn simulate_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let (code, _, err) = run(&["simulate", "--design", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("--design"));

    let design = dir.path().join("d.json");
    std::fs::write(&design, run(&["triangular", "--format", "json"]).1).unwrap();
    let (code, _, err) = run(&["simulate", "--design", design.to_str().unwrap(), "--reps", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("--reps"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gsdesign");
    let ok = Command::new(bin).args(["wang-tsiatis", "--stages", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("1.9600"), "{text}");
    let bad = Command::new(bin).args(["triangular", "--omega", "0.3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("omega not accepted by triangular"));
}
