use std::path::Path;
use std::process::{Command, Output};

use ohx_core::format::{parse_any, parse_json, parse_ohx};
use ohx_core::patterns::contains;
use ohx_core::{Mode, Pattern};

fn ohx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ohx")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn without_ms(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0).collect::<Vec<_>>().join("\n") + "\n"
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = std::fs::read_to_string(path).unwrap();
    // golden files keep the header's ms column
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let header = header.rsplit_once(',').unwrap().0;
    std::iter::once(header).chain(lines).collect::<Vec<_>>().join("\n") + "\n"
}

#[test]
fn verify_reports_match_golden_files() {
    let cases: [(&str, &[&str]); 7] = [
        ("closed_form.csv", &["verify", "closed-form", "--max-n", "6", "--max-r", "3"]),
        ("recurrence.csv", &["verify", "recurrence", "--max-n", "6", "--max-r", "3"]),
        ("partite.csv", &["verify", "partite", "--max-total", "5", "--max-r", "3", "--k-max", "2"]),
        ("cyclic.csv", &["verify", "cyclic", "--max-n", "6"]),
        ("constructions.csv", &["verify", "constructions", "--max-n", "6", "--max-r", "3", "--free-max-n", "6"]),
        ("boxes.csv", &["verify", "boxes", "--max-n", "7", "--max-r", "3"]),
        ("splitter.csv", &["verify", "splitter", "--rs", "3", "--count", "2", "--seed", "1"]),
    ];
    for (file, args) in cases {
        let out = ohx(args);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = stdout(&out);
        assert!(csv.lines().next().unwrap().ends_with(",formula,computed,match,ms"));
        assert_eq!(without_ms(&csv), golden(file), "{file}");
    }
}

#[test]
fn closed_form_suite_passes_under_its_alias() {
    let out = ohx(&["verify", "theorem4", "--max-n", "8", "--max-r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(5) == Some("true")));
}

#[test]
fn construct_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.ohx");
    let out = ohx(&[
        "construct",
        "--family",
        "consecutive",
        "--n",
        "5",
        "--r",
        "2",
        "--k",
        "3",
        "-o",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let h = parse_ohx(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(h.edge_count(), 7);

    let out = ohx(&["check", "--host", file.to_str().unwrap(), "--pattern", "cp:2:3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "not found");

    let out = ohx(&["check", "--host", file.to_str().unwrap(), "--pattern", "cp:2:2", "--require-free"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("found:"));
}

#[test]
fn json_outputs_round_trip() {
    let out = ohx(&["construct", "--family", "pow2", "--n", "8", "--r", "3", "--mode", "cyclic", "--json"]);
    let doc = parse_any(&stdout(&out)).unwrap();
    let h = doc.to_hypergraph().unwrap();
    assert_eq!((h.edge_count(), h.mode()), (36, Mode::Cyclic));

    let out = ohx(&["extremal", "--n", "6", "--r", "2", "--pattern", "cp:2:3", "--mode", "cyclic", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], 9);
    assert_eq!(v["proved_optimal"], true);
    let witness = parse_json(&v["witness"].to_string()).unwrap().to_hypergraph().unwrap();
    assert_eq!(witness.edge_count(), 9);
    let p = Pattern::from_name("cp:2:3").unwrap().with_mode(Mode::Cyclic);
    assert!(contains(&witness, &p).unwrap().is_none());

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.ohx");
    std::fs::write(&file, "ohx cyclic 3 7\n0 1 2\n0 1 4\n1 2 5\n2 3 6\n0 4 5\n").unwrap();
    let out = ohx(&["split", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["valid"], true);
    let sub = parse_json(&v["subgraph"].to_string()).unwrap().to_weighted().unwrap();
    assert_eq!(sub.support_size() as u64, v["edges"].as_u64().unwrap());
}

#[test]
fn split_uses_weight_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("h.ohx");
    std::fs::write(&host, "ohx linear 3 6\n0 1 2\n3 4 5\n").unwrap();
    let weights = dir.path().join("w.json");
    std::fs::write(&weights, r#"{"mode":"linear","r":3,"n":6,"edges":[[3,4,5]],"weights":["7/2"]}"#).unwrap();
    let out = ohx(&["split", "--input", host.to_str().unwrap(), "--weights", weights.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["subgraph"]["edges"], serde_json::json!([[3, 4, 5]]));

    std::fs::write(&weights, r#"{"mode":"linear","r":3,"n":6,"edges":[[0,4,5]],"weights":[1]}"#).unwrap();
    let out = ohx(&["split", "--input", host.to_str().unwrap(), "--weights", weights.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn boxes_report_level_counts() {
    let out = ohx(&["boxes", "--n", "9", "--r", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["total_boxes"], 58);
    assert_eq!(v["levels"][1]["boxes"], 57);
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(ohx(&["extremal", "--pattern", "cp:2:2"]).status.code(), Some(2));
    assert_eq!(ohx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ohx(&["check", "--host", "/nonexistent.ohx", "--pattern", "cp:2:2"]).status.code(), Some(2));
    let out = ohx(&["extremal", "--n", "9", "--r", "3", "--pattern", "cp:3:2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ohx");
    std::fs::write(&bad, "ohx linear 2 4\n0 1\n2 1\n").unwrap();
    let out = ohx(&["density", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.ohx") && err.contains("line 3"), "{err}");
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["extremal", "--n", "8", "--r", "2", "--pattern", "cp:2:3", "--mode", "cyclic", "--json"];
    let one = ohx(&[&["--threads", "1"], &args[..]].concat());
    let four = ohx(&[&["--threads", "4"], &args[..]].concat());
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v["nodes_explored"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&one), strip(&four));
}
