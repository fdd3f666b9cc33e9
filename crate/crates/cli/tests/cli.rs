// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use psadf_cli::{check_with, run, EXIT_ANALYSIS, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use psadf_core::model::{self, Model};
use psadf_core::poly::Polynomial;
use psadf_core::rational::int;
use psadf_core::symbolic::extract_graph;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model_path(name: &str) -> String {
    root().join("models").join(name).to_string_lossy().into_owned()
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn psadf(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("psadf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn pipeline_throughput() {
    let r = psadf(&["throughput", &model_path("dvfs_pipeline.psadf")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("throughput = 1/390000"), "{}", r.out);
    assert!(r.out.contains("critical cycle: t3"), "{}", r.out);
}

#[test]
fn concrete_models_report_their_throughput() {
    let r = psadf(&["throughput", &model_path("five_actor.sdf")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("throughput = 1/32 (0.0312500)"), "{}", r.out);
    let r = psadf(&["throughput", &model_path("five_actor.sadf")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(
        r.out.contains("scenario a:") && r.out.contains("scenario b:"),
        "{}",
        r.out
    );
    assert!(r.out.contains("throughput = 1/41"), "{}", r.out);
}

#[test]
fn extract_prints_both_regions() {
    let r = psadf(&["extract", &model_path("dvfs_pipeline.psadf")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("2 region(s)"), "{}", r.out);
    assert!(r.out.contains("region 1: b+p*q*c >= s*d"), "{}", r.out);
    assert!(r.out.contains("region 2: b+p*q*c <= s*d"), "{}", r.out);
    assert!(r.out.contains("schedule A B^p C^{p*q} D^s E"), "{}", r.out);
}

#[test]
fn shrunk_space_has_one_region() {
    let r = psadf(&["extract", &model_path("dvfs_pipeline_shrunk.psadf")]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("1 region(s)"), "{}", r.out);
    assert!(r.out.contains("a+e+s*d"), "{}", r.out);
}

#[test]
fn evaluate_at_smallest_rates() {
    let r = psadf(&[
        "evaluate",
        &model_path("dvfs_pipeline.psadf"),
        "--point",
        "p=10,q=10,s=100,ci=1",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    // Row t3: C runs p*q = 100 times at c = 4.
    assert!(r.out.contains("t3' = [  450  -inf   400   450  -inf ]"), "{}", r.out);
    assert!(r.out.contains("throughput = 1/400"), "{}", r.out);
    assert!(r.out.contains("in region 1"), "{}", r.out);
    assert!(r.err.is_empty(), "{}", r.err);
}

#[test]
fn evaluate_outside_space_warns_and_continues() {
    let r = psadf(&[
        "evaluate",
        &model_path("dvfs_pipeline.psadf"),
        "--point",
        "p=10,q=10,s=1500,ci=1",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(
        r.err.contains("warning: constraint p + s <= 1400 is violated"),
        "{}",
        r.err
    );
    assert!(r.out.contains("regions: none"), "{}", r.out);
    assert!(r.out.contains("throughput = 1/4500"), "{}", r.out);
}

#[test]
fn evaluate_on_the_tie_lists_both_regions() {
    // b + p*q*c = 20 + 400 = 420 = s*d at s = 140.
    let r = psadf(&[
        "evaluate",
        &model_path("dvfs_pipeline.psadf"),
        "--point",
        "p=10,q=10,s=140,ci=1",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(
        r.out.contains("in region 1") && r.out.contains("in region 2"),
        "{}",
        r.out
    );
}

#[test]
fn check_passes_on_the_pipeline() {
    let r = psadf(&[
        "check",
        &model_path("dvfs_pipeline.psadf"),
        "--samples",
        "10",
        "--seed",
        "7",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    assert!(r.out.contains("10/10 samples passed"), "{}", r.out);
}

#[test]
fn check_with_zero_samples() {
    let r = psadf(&["check", &model_path("dvfs_pipeline.psadf"), "--samples", "0"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("0 samples"), "{}", r.out);
}

#[test]
fn corrupted_matrix_yields_counterexample() {
    let g = match model::parse(&std::fs::read_to_string(model_path("dvfs_pipeline.psadf")).unwrap()).unwrap() {
        Model::Psadf(g) => g,
        _ => unreachable!(),
    };
    let (_, mut ms) = extract_graph(&g).unwrap();
    for m in &mut ms {
        m.entries[0][0] = Some(Polynomial::constant(int(-1)));
    }
    let mut out = Vec::new();
    let code = check_with(&g, &ms, 3, 5, &mut out).unwrap();
    let out = String::from_utf8(out).unwrap();
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("0/3 samples passed"), "{out}");
    assert!(out.contains("counterexample at "), "{out}");
    assert!(out.contains("entry (t1, t1) = -1, simulation gives"), "{out}");
}

#[test]
fn exit_codes_follow_the_error_class() {
    let cases: &[(&[&str], i32, &str)] = &[
        (
            &["throughput", "corpus:syntax_error.sdf"],
            EXIT_INPUT,
            "syntax_error.sdf:5:",
        ),
        (
            &["throughput", "corpus:no_such_file.sdf"],
            EXIT_INPUT,
            "no_such_file.sdf",
        ),
        (
            &["throughput", "corpus:inconsistent.sdf"],
            EXIT_ANALYSIS,
            "not consistent",
        ),
        (&["throughput", "corpus:deadlock.sdf"], EXIT_ANALYSIS, "not live"),
        (&["throughput", "corpus:acyclic.sdf"], EXIT_ANALYSIS, "no cycle"),
        (&["throughput", "corpus:infeasible.psadf"], EXIT_ANALYSIS, "infeasible"),
        (
            &["throughput", "corpus:unsupported.psadf"],
            EXIT_ANALYSIS,
            "unsupported pattern at actor C",
        ),
        (&["extract", "model:five_actor.sdf"], EXIT_ANALYSIS, "not a psadf model"),
        (&["check", "model:five_actor.sadf"], EXIT_ANALYSIS, "not a psadf model"),
        (
            &["evaluate", "model:dvfs_pipeline.psadf", "--point", "p=10,q=10"],
            EXIT_INPUT,
            "unassigned",
        ),
        (
            &["evaluate", "model:dvfs_pipeline.psadf", "--point", "p"],
            EXIT_INPUT,
            "--point",
        ),
        (&["frobnicate"], EXIT_INPUT, "unrecognized subcommand"),
    ];
    for (args, code, needle) in cases {
        let resolved: Vec<String> = args
            .iter()
            .map(|a| {
                if let Some(f) = a.strip_prefix("corpus:") {
                    corpus(f)
                } else if let Some(f) = a.strip_prefix("model:") {
                    model_path(f)
                } else {
                    a.to_string()
                }
            })
            .collect();
        let argv: Vec<&str> = resolved.iter().map(String::as_str).collect();
        let r = psadf(&argv);
        assert_eq!(r.code, *code, "{args:?}: {}", r.err);
        assert!(r.err.contains(needle), "{args:?}: {}", r.err);
    }
}

fn validate(report: &std::path::Path) {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{}: {errors:?}", report.display());
}

#[test]
fn reports_validate_against_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [
        ("throughput", "five_actor.sdf"),
        ("throughput", "five_actor.sadf"),
        ("throughput", "dvfs_pipeline.psadf"),
        ("extract", "dvfs_pipeline.psadf"),
    ] {
        let json = dir.path().join(format!("{cmd}-{file}.json"));
        let r = psadf(&[cmd, &model_path(file), "--json", json.to_str().unwrap()]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        validate(&json);
    }
}

#[test]
fn throughput_report_lists_argmaxes() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("report.txt");
    let json = dir.path().join("report.json");
    let r = psadf(&[
        "throughput",
        &model_path("dvfs_pipeline.psadf"),
        "--report",
        txt.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let text = std::fs::read_to_string(&txt).unwrap();
    assert!(text.contains("(3,3) p*q*c = 390000 at "), "{text}");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["analysis"]["throughput"], "1/390000");
    assert_eq!(doc["analysis"]["lambda"], "390000/1");
}

#[test]
fn schema_rejects_inexact_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let r = psadf(&[
        "throughput",
        &model_path("five_actor.sdf"),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    doc["analysis"]["lambda"] = serde_json::json!(32.0);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap()).unwrap();
    assert!(!jsonschema::validator_for(&schema).unwrap().is_valid(&doc));
}
