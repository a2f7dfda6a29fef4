use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = fairdiv::cli::run(
        std::iter::once("fairdiv").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    (
        code,
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}")),
    )
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("fairdiv-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn support(report: &Value) -> Vec<(Vec<Value>, String)> {
    report["support"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["allocation"]["owners"].as_array().unwrap().clone(),
                e["probability"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn run_like_on_example1() {
    let (code, report) = json(&["run", "like", "example1"]);
    assert_eq!(code, 0);
    let s = support(&report);
    assert_eq!(s.len(), 4);
    assert!(s.iter().all(|(_, p)| p == "1/4"));
}

#[test]
fn run_osd_on_example1() {
    let (code, report) = json(&["run", "osd", "--sigma", "1,2", "example1"]);
    assert_eq!(code, 0);
    assert_eq!(
        support(&report),
        vec![(vec![Value::from(1), Value::from(1)], "1".to_string())]
    );
}

#[test]
fn run_on_empty_instance() {
    let path = temp_file("empty.txt", "2 0\n");
    let (code, report) = json(&["run", "like", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(support(&report), vec![(vec![], "1".to_string())]);
}

#[test]
fn run_with_bids_file() {
    let bids = temp_file("bids.txt", "2 2\n0 2\n2 1\n");
    let (code, report) = json(&["run", "like", "example1", "--bids", bids.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["assignment"][0], serde_json::json!(["0", "1/2"]));
}

#[test]
fn check_reports() {
    let (code, report) = json(&["check", "efa", "orp", "example1"]);
    assert_eq!((code, report["holds"].as_bool()), (0, Some(true)));

    let (code, report) = json(&["check", "pea", "orp", "example1"]);
    assert_eq!(code, 1);
    let witness = &report["instances"][0]["verdict"]["witness"];
    assert_eq!(witness["kind"], "lottery");
    assert_eq!(witness["objective"], "1");

    let (code, _) = json(&["check", "pep", "pareto-like", "small-suite"]);
    assert_eq!(code, 0);
}

#[test]
fn befp_needs_binary_utilities() {
    let (code, _, err) = run(&["check", "befp", "like", "example1"]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = run(&["check", "befp", "balanced-like", "example2"]);
    assert_eq!(code, 0);
}

#[test]
fn falsify_reports() {
    let (code, report) = json(&["falsify", "sp", "maximum-like", "example1"]);
    assert_eq!(code, 1);
    assert_eq!(report["verdict"], "violation found");
    assert!(report["deviation"]["deviation"]["agent"].is_number());

    let (code, report) = json(&["falsify", "sp", "like", "small-suite"]);
    assert_eq!(
        (code, report["verdict"].as_str()),
        (0, Some("none in grid"))
    );

    let (code, _) = json(&["falsify", "osp", "balanced-like", "small-suite"]);
    assert_eq!(code, 0);

    let (code, _) = json(&[
        "falsify",
        "osp",
        "pareto-like",
        "example1",
        "--grid-extra",
        "1/3,5",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn manifest_targets() {
    let path = temp_file("suite.txt", "# domain n m seed count\nbinary 2 2 3 4\n");
    let (code, report) = json(&["check", "efa", "like", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["instances"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_and_examples() {
    let (code, out, _) = run(&[
        "gen", "borda", "--agents", "3", "--items", "4", "--seed", "5",
    ]);
    assert_eq!(code, 0);
    let body: String = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let inst = fairdiv::instances::parse_instance(&body).unwrap();
    assert!(fairdiv::instances::in_domain(
        fairdiv::instances::Domain::Borda,
        &inst
    ));

    let (code, report) = json(&[
        "gen", "binary", "--agents", "2", "--items", "3", "--count", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report.as_array().unwrap().len(), 3);

    let (code, report) = json(&["examples"]);
    assert_eq!(code, 0);
    assert_eq!(report.as_array().unwrap().len(), 4);
    let (_, out, _) = run(&["examples", "4"]);
    assert!(out.contains("maximum-like"), "{out}");
}

#[test]
fn limits_and_usage() {
    assert_eq!(run(&["run"]).0, 3);
    assert_eq!(run(&["run", "nope", "example1"]).0, 3);
    assert_eq!(run(&["run", "like", "/nonexistent/file"]).0, 3);
    assert_eq!(run(&["check", "nope", "like", "example1"]).0, 3);
    assert_eq!(run(&["--max-items", "1", "run", "like", "example1"]).0, 2);
    assert_eq!(
        run(&["--max-nodes", "3", "check", "pep", "like", "example1"]).0,
        2
    );
}

#[test]
fn pareto_like_prefix_dead_end_is_inconclusive() {
    let path = temp_file("dead.txt", "2 3\n1 3 1\n2 3 1\n");
    let (code, _, err) = run(&["run", "pareto-like-prefix", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(run(&["run", "pareto-like", path.to_str().unwrap()]).0, 0);
}

#[test]
fn binary_honours_environment_bound() {
    let out = Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(["check", "pep", "like", "example1"])
        .env("FAIRDIV_MAX_NODES", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(["run", "orp", "example1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1/2"));
}

#[test]
fn small_table_is_deterministic() {
    let (code, a) = json(&["table", "--trials", "15"]);
    let (_, b) = json(&["table", "--trials", "15"]);
    assert_eq!(a, b);
    assert!(code == 0 || code == 2, "{code}");
    assert_eq!(a["summary"]["mismatches"], 0);
}
