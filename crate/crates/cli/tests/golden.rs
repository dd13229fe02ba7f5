//! Regression against the bundled expected reports, plus end-to-end runs of
//! the binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use syncmdp::corpus::{random_corpus, RandomShape};
use syncmdp::Limits;
use syncmdp_cli::report::Status;
use syncmdp_cli::{analyze, regions, verify, AnalyzeOptions, Region, Report, VerifyOptions};

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn expected() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(models().join("expected"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    out
}

/// Rebuilds a report from its file name: `figureN.SET.COMMAND.json`, or
/// `figureN.mec.json`.
fn rebuild(path: &Path) -> Report {
    let stem = path.file_stem().unwrap().to_str().unwrap();
    let parts: Vec<&str> = stem.split('.').collect();
    let model = analyze::load(&models().join(format!("{}.json", parts[0]))).unwrap();
    let limits = Limits::default();
    match parts[1..] {
        [set, "analyze"] => analyze(
            &model,
            set,
            &AnalyzeOptions {
                query: None,
                horizon: None,
                limits,
            },
        ),
        [set, "verify"] => verify(
            &model,
            set,
            &VerifyOptions {
                horizon: None,
                limits,
            },
        ),
        ["mec"] => regions(&model, None, Region::Mec, &limits),
        [set, which] => regions(&model, Some(set), which.parse().unwrap(), &limits),
        _ => panic!("unexpected golden name {stem}"),
    }
    .unwrap()
}

#[test]
fn expected_reports_match() {
    let files = expected();
    assert!(files.len() >= 10);
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let golden = Report::from_json_str(&text).unwrap();
        assert_eq!(
            golden.to_json_string(),
            text,
            "{} round trip",
            path.display()
        );
        assert_eq!(rebuild(&path), golden, "{}", path.display());
        assert_eq!(golden.report_version, 1);
        assert_eq!(golden.failed_checks().count(), 0, "{}", path.display());
    }
}

fn row(r: &Report, mode: &str) -> [Option<bool>; 5] {
    let m = r.matrix.iter().find(|m| m.mode == mode).unwrap();
    [m.sure, m.almost_sure, m.limit_sure, m.positive, m.bounded]
}

#[test]
fn figure_rows() {
    let opts = AnalyzeOptions {
        query: None,
        horizon: None,
        limits: Limits::default(),
    };
    let f2 = analyze(
        &analyze::load(&models().join("figure2.json")).unwrap(),
        "goal",
        &opts,
    )
    .unwrap();
    let (y, n) = (Some(true), Some(false));
    assert_eq!(row(&f2, "eventually"), [n, n, y, y, y]);
    let f1 = analyze(
        &analyze::load(&models().join("figure1.json")).unwrap(),
        "goal",
        &opts,
    )
    .unwrap();
    for mode in ["always", "eventually", "weakly", "strongly"] {
        let r = row(&f1, mode);
        assert_eq!(r[3], y, "{mode}");
        assert_eq!(r[4], Some(mode == "eventually"), "{mode}");
    }
}

#[test]
fn random_models_pass_the_gate_and_witness_checks() {
    let opts = AnalyzeOptions {
        query: None,
        horizon: None,
        limits: Limits::default(),
    };
    for inst in random_corpus(150, 0xC0FFEE, RandomShape::default()) {
        let mut model = inst.model.clone();
        model.targets = vec![("t".into(), inst.target.clone())];
        let r = analyze(&model, "t", &opts).unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        let failed: Vec<_> = r.failed_checks().map(|c| c.name.clone()).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", inst.name);
        let again = Report::from_json_str(&r.to_json_string()).unwrap();
        assert_eq!(again, r);
    }
}

const ABSORBING: &str = r#"{
  "states": ["s"],
  "actions": ["a"],
  "transitions": [{"from": "s", "action": "a", "to": "s", "prob": "1"}],
  "initial": {"s": "1"},
  "targets": {"all": ["s"]}
}"#;

#[test]
fn absorbing_target_is_vacuous() {
    let model = syncmdp::parse_model(ABSORBING).unwrap();
    let r = verify(
        &model,
        "all",
        &VerifyOptions {
            horizon: Some(10),
            limits: Limits::default(),
        },
    )
    .unwrap();
    assert!(r.oracle.iter().all(|c| c.status != Status::Fail));
    assert!(!r.oracle.iter().any(|c| c.name.starts_with("bound")));
}

fn syncmdp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_syncmdp"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn binary_writes_the_expected_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let model = models().join("figure2.json");
    let (code, stdout, _) = syncmdp(&[
        "analyze",
        "--model",
        model.to_str().unwrap(),
        "--target",
        "goal",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("limit-sure"));
    let written = std::fs::read_to_string(&out).unwrap();
    let golden =
        std::fs::read_to_string(models().join("expected/figure2.goal.analyze.json")).unwrap();
    assert_eq!(written, golden);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fig = models().join("figure2.json");
    let fig = fig.to_str().unwrap();

    assert_eq!(syncmdp(&["analyze", "--model", fig]).0, 1);
    assert_eq!(
        syncmdp(&[
            "analyze",
            "--model",
            fig,
            "--target",
            "goal",
            "--query",
            "often:sure"
        ])
        .0,
        1
    );
    assert_eq!(
        syncmdp(&["regions", "--model", fig, "--which", "nowhere"]).0,
        1
    );

    let (code, _, err) = syncmdp(&["analyze", "--model", fig, "--target", "missing"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing"));
    assert_eq!(syncmdp(&["analyze", "--model", fig, "--target", ""]).0, 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, ABSORBING.replace("\"1\"}]", "\"1/2\"}]")).unwrap();
    let (code, _, err) = syncmdp(&[
        "analyze",
        "--model",
        bad.to_str().unwrap(),
        "--target",
        "all",
    ]);
    assert_eq!(code, 2, "{err}");

    let (code, _, err) = syncmdp(&[
        "analyze",
        "--model",
        fig,
        "--target",
        "goal",
        "--max-lasso",
        "2",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("guard tripped"));

    let (code, stdout, _) = syncmdp(&[
        "analyze",
        "--model",
        fig,
        "--target",
        "goal",
        "--query",
        "eventually:limit-sure",
        "--json",
        "-",
    ]);
    assert_eq!(code, 0);
    let r = Report::from_json_str(&stdout).unwrap();
    assert_eq!(r.queries.len(), 1);
    assert!(r.queries[0].answer);
}

#[test]
fn region_examples() {
    let limits = Limits::default();
    let f2 = analyze::load(&models().join("figure2.json")).unwrap();
    let r = regions(&f2, Some("goal"), Region::PreLasso, &limits).unwrap();
    let res = &r.regions.unwrap().result;
    assert_eq!(res["supports"], serde_json::json!([["q2"], ["q1"]]));
    assert_eq!((res["k"].as_u64(), res["r"].as_u64()), (Some(1), Some(1)));
    let f4 = analyze::load(&models().join("figure4.json")).unwrap();
    let r = regions(&f4, None, Region::Mec, &limits).unwrap();
    assert_eq!(
        r.regions.unwrap().result,
        serde_json::json!([["q1", "q2"], ["q3", "q4"]])
    );
    let r = regions(&f4, Some(""), Region::AlmostSure, &limits).unwrap();
    assert_eq!(r.regions.unwrap().result, serde_json::json!([]));
}
