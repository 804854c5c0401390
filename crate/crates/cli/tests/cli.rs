use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GOLDEN: &str = include_str!("golden/table_ingested.csv");

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa2"))
        .args(args)
        .env("IWASAWA2_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn envelope(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON envelope")
}

#[test]
fn envelope_has_the_frozen_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["classgroup", "--q", "23"]);
    assert_eq!(out.status.code(), Some(0));
    let e = envelope(&out);
    for key in ["schema", "command", "config", "result", "provenance", "artifacts", "wall_clock_ms"] {
        assert!(e.get(key).is_some(), "missing {key}");
    }
    assert_eq!(e["schema"], 1);
    assert_eq!(e["result"]["h"], 3);
    assert_eq!(e["result"]["prime_above_2_order"], 3);
    assert_eq!(e["config"]["cache_dir"], dir.path().to_str().unwrap());
}

#[test]
fn ingested_table_matches_the_golden_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["table", "--qmax", "500", "--mode", "ingested", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), GOLDEN);
    let csv = dir.path().join("t.csv");
    let out = run(dir.path(), &["table", "--qmax", "500", "--mode", "ingested", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), GOLDEN);
    let e = envelope(&out);
    assert_eq!(e["result"]["rows"].as_array().unwrap().len(), 25);
}

#[test]
fn empty_table_below_seven() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["table", "--qmax", "6", "--mode", "ingested", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "q,hK,hH,ord2_Rp,ord2_index,verdict,provenance");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["classgroup", "--q", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(envelope(&out)["error"]["kind"], "precondition");
    let out = run(dir.path(), &["regulator", "--q", "47"]);
    assert_eq!(out.status.code(), Some(2), "missing unit data");
    let out = run(dir.path(), &["index", "--q", "23", "--rp", "0"]);
    assert_eq!(out.status.code(), Some(4), "negative index is an inconsistency");
    let out = run(dir.path(), &["hcp", "--q", "431", "--bits", "40"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(envelope(&out)["error"]["kind"], "precision");
    let out = run(dir.path(), &["verify", "elliptic", "--suite", "25", "--q", "23"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn warm_cache_is_bit_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |o: &Output| {
        let mut e = envelope(o);
        e.as_object_mut().unwrap().remove("wall_clock_ms");
        e
    };
    let cold = run(dir.path(), &["hcp", "--q", "31"]);
    assert!(dir.path().join("hcp_31.json").exists());
    let warm = run(dir.path(), &["hcp", "--q", "31"]);
    assert_eq!(strip(&cold), strip(&warm));
    let cold = run(dir.path(), &["field", "--q", "23"]);
    let warm = run(dir.path(), &["field", "--q", "23"]);
    assert_eq!(strip(&cold), strip(&warm));
}

#[test]
fn corrupted_cache_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["hcp", "--q", "23"]).status.code(), Some(0));
    let path = dir.path().join("hcp_23.json");
    let text = std::fs::read_to_string(&path).unwrap().replace("3491750", "3491751");
    std::fs::write(&path, text).unwrap();
    let out = run(dir.path(), &["hcp", "--q", "23"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(envelope(&out)["error"]["message"].as_str().unwrap().contains("checksum"));
}

#[test]
fn hcp_small_cases() {
    let dir = tempfile::tempdir().unwrap();
    let e = envelope(&run(dir.path(), &["hcp", "--q", "7"]));
    assert_eq!(e["result"]["coeffs"], serde_json::json!(["3375", "1"]));
    let e = envelope(&run(dir.path(), &["hcp", "--q", "23"]));
    assert_eq!(e["result"]["coeffs"], serde_json::json!(["12771880859375", "-5151296875", "3491750", "1"]));
}

#[test]
fn regulator_q23_reports_ord_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["regulator", "--q", "23", "--prec", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let e = envelope(&out);
    assert_eq!(e["result"]["ord2"], 2);
    assert_eq!(e["result"]["ord2_over_dropped_embedding"], serde_json::json!([2, 2, 2]));
    assert_eq!(e["provenance"]["units"], "paper");
}

#[test]
fn index_breakdown_for_431() {
    let dir = tempfile::tempdir().unwrap();
    let e = envelope(&run(dir.path(), &["index", "--q", "431"]));
    let b = &e["result"]["breakdown"];
    assert_eq!(b["total"], 5);
    assert_eq!(b["ord2_euler_factor"], -21);
    assert_eq!(b["ord2_regulator"], 25);
    assert_eq!(e["result"]["verdict"], "undetermined");
    assert_eq!(e["provenance"]["verdict"], "paper");
    assert_eq!(e["result"]["published"]["agrees"], true);
}

#[test]
fn iwasawa_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["mahler", "gamma", "asymptote"] {
        let out = run(dir.path(), &["verify", "iwasawa", "--suite", suite, "--samples", "20"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert_eq!(envelope(&out)["result"]["passed"], true);
    }
}

#[test]
fn config_file_is_embedded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"complex_bits": 256, "threads": 2}"#).unwrap();
    let e = envelope(&run(dir.path(), &["--config", cfg.to_str().unwrap(), "classgroup", "--q", "7"]));
    assert_eq!(e["config"]["complex_bits"], 256);
    assert_eq!(e["config"]["threads"], 2);
    std::fs::write(&cfg, r#"{"complex_bits": 1}"#).unwrap();
    let out = run(dir.path(), &["--config", cfg.to_str().unwrap(), "classgroup", "--q", "7"]);
    assert_eq!(out.status.code(), Some(2));
}
