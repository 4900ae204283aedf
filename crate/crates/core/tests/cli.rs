use num::One;
use serde_json::Value;

use quickspace::cli::{self, rational_from_json, EXIT_OK, EXIT_USAGE};
use quickspace::prob_core::ExactRational;
use quickspace::quicksort_space::{run_probability, Run, RunTree};

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("quickspace").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

#[test]
fn enumerate_matches_golden() {
    for n in ["0", "2", "3"] {
        let (code, table, _) = run(&["enumerate", "--n", n]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(table, golden(&format!("enumerate_n{n}.txt")));
        let (code, csv, _) = run(&["--format", "csv", "enumerate", "--n", n]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(csv, golden(&format!("enumerate_n{n}.csv")));
    }
}

#[test]
fn table_matches_golden() {
    let (code, csv, _) = run(&["--format", "csv", "table", "--n-max", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv, golden("table_n3.csv"));
}

#[test]
fn json_enumeration_round_trips() {
    for n in 0..=5usize {
        let (code, text, _) = run(&["--format", "json", "enumerate", "--n", &n.to_string()]);
        assert_eq!(code, EXIT_OK);
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["command"], "enumerate");
        let mut total = ExactRational::from_integer(0.into());
        for row in doc["rows"].as_array().unwrap() {
            let tree: Option<RunTree> = serde_json::from_value(row["run"].clone()).unwrap();
            let run = Run::from_tree(tree.as_ref());
            let weight = rational_from_json(&row["weight"]).unwrap();
            assert_eq!(run_probability(&run, n).unwrap(), weight);
            assert_eq!(row["notation"].as_str().unwrap(), run.notation("_"));
            total += weight;
        }
        assert_eq!(total, ExactRational::one());
    }
}

#[test]
fn verify_passes() {
    for suite in ["core-laws", "space", "splitter"] {
        let (code, out, _) = run(&["verify", suite, "--n-max", "5"]);
        assert_eq!(code, EXIT_OK, "{suite}: {out}");
    }
    let (code, text, _) = run(&["--format", "json", "verify", "recurrence", "--n-max", "60"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["command"], "verify");
}

#[test]
fn montecarlo_reports_reference() {
    let (code, text, _) = run(&[
        "--format",
        "json",
        "montecarlo",
        "--n",
        "10",
        "--trials",
        "500",
        "--seed",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let again = run(&[
        "--format",
        "json",
        "montecarlo",
        "--n",
        "10",
        "--trials",
        "500",
        "--seed",
        "3",
    ])
    .1;
    assert_eq!(text, again);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!(doc["report"]["mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "bogus"][..],
        &["montecarlo", "--n", "5", "--trials", "0"],
        &["enumerate", "--n", "13"],
        &["verify", "splitter", "--n-max", "13"],
        &["--cap-perm", "6", "verify", "simulator", "--n-max", "7"],
        &["--cap-enum", "4", "enumerate", "--n", "5"],
        &["--format", "xml", "table", "--n-max", "3"],
        &["frobnicate"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_is_not_an_error() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("enumerate"));
}
