//! End-to-end acceptance run against the built binary, one line per criterion.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use iwasawa2::cm::class_group;
use serde_json::Value;

const GOLDEN: &str = include_str!("golden/table_ingested.csv");

const TABLE: [(u64, u64, i64, i64); 25] = [
    (7, 1, 0, 0),
    (23, 3, 2, 0),
    (31, 3, 2, 0),
    (47, 5, 4, 0),
    (71, 7, 6, 0),
    (79, 5, 4, 0),
    (103, 5, 4, 0),
    (127, 5, 4, 0),
    (151, 7, 6, 0),
    (167, 11, 10, 0),
    (191, 13, 12, 0),
    (199, 9, 8, 0),
    (223, 7, 6, 0),
    (239, 15, 14, 0),
    (263, 13, 12, 0),
    (271, 11, 10, 0),
    (311, 19, 18, 0),
    (359, 19, 18, 0),
    (367, 9, 8, 0),
    (383, 17, 16, 0),
    (431, 21, 25, 5),
    (439, 15, 14, 0),
    (463, 7, 6, 0),
    (479, 25, 24, 0),
    (487, 7, 6, 0),
];

const Q23_DIGITS: [u64; 10] = [2, 4, 6, 7, 8, 9, 10, 13, 17, 20];

fn run(cache: &Path, args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa2"))
        .args(args)
        .env("IWASAWA2_CACHE_DIR", cache)
        .output()
        .map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), v))
}

fn run_raw(cache: &Path, args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa2"))
        .args(args)
        .env("IWASAWA2_CACHE_DIR", cache)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn reports(v: &Value) -> Vec<Value> {
    v["result"]["reports"].as_array().cloned().unwrap_or_default()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::INFINITY)
}

fn table_ingested(cache: &Path) -> Check {
    let (code, csv) = run_raw(cache, &["table", "--qmax", "500", "--mode", "ingested", "--format", "csv"])?;
    ensure(code == 0, format!("exit {code}"))?;
    ensure(csv == GOLDEN, "CSV differs from golden")?;
    let (_, v) = run(cache, &["table", "--qmax", "500", "--mode", "ingested"])?;
    let rows = v["result"]["rows"].as_array().cloned().unwrap_or_default();
    ensure(rows.len() == 25, format!("{} rows", rows.len()))?;
    for ((q, hk, rp, idx), r) in TABLE.iter().zip(&rows) {
        let got = (r["q"].as_u64(), r["hK"].as_u64(), r["hH"].as_u64(), r["ord2_Rp"].as_i64(), r["ord2_index"].as_i64());
        ensure(got == (Some(*q), Some(*hk), Some(1), Some(*rp), Some(*idx)), format!("row {q}: {got:?}"))?;
    }
    Ok("25/25 rows exact; q=431 -> 5, others -> 0".into())
}

fn class_numbers(_: &Path) -> Check {
    for (q, hk, _, _) in TABLE {
        let h = class_group(q).map_err(|e| e.to_string())?.h as u64;
        ensure(h == hk, format!("h({q}) = {h}, expected {hk}"))?;
    }
    Ok("25/25 class numbers".into())
}

fn regulator_q23(cache: &Path) -> Check {
    let (code, v) = run(cache, &["regulator", "--q", "23", "--prec", "128"])?;
    ensure(code == 0, format!("exit {code}"))?;
    ensure(v["result"]["ord2"] == 2, format!("ord2 = {}", v["result"]["ord2"]))?;
    let low = |key: &str| -> Vec<u64> {
        v["result"]["digits"][key].as_array().map(|a| a.iter().filter_map(Value::as_u64).filter(|&e| e < 23).collect()).unwrap_or_default()
    };
    let (det, neg) = (low("det"), low("negated_det"));
    let sign = if det == Q23_DIGITS {
        "+"
    } else if neg == Q23_DIGITS {
        "-"
    } else {
        return Err(format!("digits mod 2^23: {det:?} / {neg:?}"));
    };
    Ok(format!("ord2 = 2; digits match mod 2^23 with sign {sign}, last embedding dropped"))
}

fn computed_mode(cache: &Path) -> Check {
    let (code, v) = run(cache, &["table", "--qmax", "31", "--mode", "computed"])?;
    ensure(code == 0, format!("exit {code}"))?;
    let rows = v["result"]["rows"].as_array().cloned().unwrap_or_default();
    let got: Vec<(u64, i64, i64, String)> = rows
        .iter()
        .map(|r| {
            (
                r["q"].as_u64().unwrap_or(0),
                r["ord2_Rp"].as_i64().unwrap_or(-1),
                r["ord2_index"].as_i64().unwrap_or(-1),
                r["verdict"].as_str().unwrap_or("").to_string(),
            )
        })
        .collect();
    let want: Vec<(u64, i64, i64, String)> =
        vec![(7, 0, 0, "X_zero".into()), (23, 2, 0, "X_zero".into()), (31, 2, 0, "X_zero".into())];
    ensure(got == want, format!("{got:?}"))?;
    let computed = v["result"]["computed"].as_array().cloned().unwrap_or_default();
    let c23 = computed.iter().find(|c| c["q"] == 23).ok_or("no computed record for 23")?;
    let k = c23["reference_index"].as_i64().ok_or("no reference index")?;
    ensure(k % 2 == 1, format!("index {k} against published units"))?;
    ensure(rows.iter().all(|r| r["provenance"]["ord2_Rp"] == "computed"), "provenance")?;
    Ok(format!("ord2_Rp 0,2,2; index 0,0,0; X_zero; q=23 searched units have odd index {k}"))
}

fn hcp(cache: &Path) -> Check {
    let coeffs = |v: &Value| v["result"]["coeffs"].clone();
    let (_, v7) = run(cache, &["hcp", "--q", "7"])?;
    ensure(coeffs(&v7) == serde_json::json!(["3375", "1"]), format!("q=7: {}", coeffs(&v7)))?;
    let (_, v23) = run(cache, &["hcp", "--q", "23"])?;
    let want23 = serde_json::json!(["12771880859375", "-5151296875", "3491750", "1"]);
    ensure(coeffs(&v23) == want23, format!("q=23: {}", coeffs(&v23)))?;
    let (_, v31) = run(cache, &["hcp", "--q", "31"])?;
    let bits = v31["result"]["prec_bits"].as_u64().ok_or("no precision")?;
    let doubled = (2 * bits).to_string();
    let (_, w31) = run(cache, &["hcp", "--q", "31", "--bits", &doubled])?;
    ensure(coeffs(&v31) == coeffs(&w31) && coeffs(&v31).is_array(), "q=31 unstable under doubling")?;
    Ok(format!("q=7, q=23 exact; q=31 identical at {bits} and {doubled} bits"))
}

fn splitting(cache: &Path) -> Check {
    let (code, v) = run(cache, &["field", "--q", "23", "--poly=1,-3,5,-5,5,-3,1"])?;
    ensure(code == 0, format!("exit {code}"))?;
    let mut res: Vec<String> = v["result"]["splitting"]["factors"]
        .as_array()
        .map(|a| a.iter().filter_map(|x| x["residue"].as_str().map(String::from)).collect())
        .unwrap_or_default();
    res.sort();
    ensure(res == ["x^3 + x + 1", "x^3 + x^2 + 1"], format!("{res:?}"))?;
    let ld = v["result"]["splitting"]["local_degree"].as_u64();
    let ord = v["result"]["prime_above_2_order"].as_u64();
    ensure(ld == Some(3) && ord == Some(3), format!("local degree {ld:?}, class order {ord:?}"))?;
    Ok("(x^3+x+1)(x^3+x^2+1); local degree 3 = order of the prime above 2".into())
}

fn elliptic(cache: &Path) -> Check {
    let (c25, v25) = run(cache, &["verify", "elliptic", "--suite", "25"])?;
    let (c22, v22) = run(cache, &["verify", "elliptic", "--suite", "22"])?;
    let (c21, v21) = run(cache, &["verify", "elliptic", "--suite", "prop21"])?;
    ensure(v25["config"]["complex_bits"] == 200, "precision is not 200 bits")?;
    let id = reports(&v25);
    ensure(id.len() == 3, format!("{} multipliers", id.len()))?;
    let worst25 = id.iter().map(|r| f(&r["residual"])).fold(0.0, f64::max);
    ensure(id.iter().all(|r| r["parameters"]["points"] == 5), "point count")?;
    ensure(worst25 < 1e-20, format!("identity residual {worst25:e}"))?;
    let dist = reports(&v22).into_iter().find(|r| r["identity"].as_str().map_or(false, |s| s.starts_with("R_lambda(beta z)")));
    let wdist = dist.map(|r| f(&r["residual"])).unwrap_or(f64::INFINITY);
    ensure(wdist < 1e-15, format!("distribution residual {wdist:e}"))?;
    let mut worst_taylor = 0.0f64;
    let mut worst_odd = 0.0f64;
    let mut worst_hecke = 0.0f64;
    let mut hecke_k = Vec::new();
    for r in reports(&v21) {
        let name = r["identity"].as_str().unwrap_or("");
        if name.starts_with("Taylor") {
            for e in r["parameters"]["report"]["relative_errors"].as_array().into_iter().flatten() {
                worst_taylor = worst_taylor.max(f(&e[1]));
            }
        } else if name.starts_with("odd-k") {
            for e in r["parameters"]["report"]["odd_residuals"].as_array().into_iter().flatten() {
                worst_odd = worst_odd.max(f(&e[1]));
            }
        } else if name.starts_with("w_K") {
            worst_hecke = worst_hecke.max(f(&r["residual"]));
            hecke_k.push(r["parameters"]["k"].as_u64().unwrap_or(0));
        }
    }
    ensure(worst_taylor < 1e-15, format!("Taylor relative error {worst_taylor:e}"))?;
    ensure(worst_odd < 1e-15, format!("odd coefficients {worst_odd:e}"))?;
    ensure(hecke_k == [4, 6] && worst_hecke < 1e-25, format!("hecke k={hecke_k:?} {worst_hecke:e}"))?;
    ensure(c25 == 0 && c22 == 0 && c21 == 0, format!("exit codes {c25} {c22} {c21}"))?;
    Ok(format!(
        "identity {worst25:.1e} < 1e-20; Taylor {worst_taylor:.1e}, odd {worst_odd:.1e} < 1e-15; distribution {wdist:.1e} < 1e-15; Hecke {worst_hecke:.1e} < 1e-25"
    ))
}

fn iwasawa(cache: &Path) -> Check {
    let mut notes = Vec::new();
    for suite in ["mahler", "gamma", "sinnott", "asymptote"] {
        let (code, v) = run(cache, &["verify", "iwasawa", "--suite", suite, "--samples", "100"])?;
        ensure(code == 0, format!("{suite}: exit {code}"))?;
        for r in reports(&v) {
            let fails = r["failures"].as_u64().unwrap_or(u64::MAX);
            ensure(fails == 0, format!("{suite}: {} failures", fails))?;
            if suite == "sinnott" {
                ensure(r["samples"] == 100, "sinnott sample count")?;
                notes.push(format!("sinnott 100/100 ({} degenerate redrawn)", r["skipped"]));
            }
            if suite == "gamma" {
                let p = &r["parameters"];
                ensure(p["D"] == 32 && p["N"] == 32, format!("gamma parameters {p}"))?;
            }
            if r["property"].as_str().map_or(false, |s| s.starts_with("mu_lambda")) {
                ensure(r["samples"] == 100, "shift sample count")?;
                notes.push("scalar shift 100/100".into());
            }
        }
    }
    Ok(format!("mahler exact; L(delta_5) = 1 + w to D=32, N=32; {}", notes.join("; ")))
}

fn formal_group(cache: &Path) -> Check {
    let (code, v) = run(cache, &["verify", "elliptic", "--suite", "22"])?;
    ensure(code == 0, format!("exit {code}"))?;
    let checks: Vec<Value> = reports(&v).into_iter().filter(|r| r.get("check").is_some()).collect();
    ensure(checks.len() == 6, format!("{} checks", checks.len()))?;
    for c in &checks {
        ensure(c["passed"] == true, format!("failed: {} {}", c["check"], c["parameters"]))?;
    }
    let law = &checks[0]["parameters"]["degree"];
    let lemma = checks.last().map(|c| c["parameters"]["degree"].clone()).unwrap_or(Value::Null);
    ensure(law == 24 && lemma == 32 && checks[1]["parameters"]["degree"] == 24, "degrees")?;
    Ok("associativity and log intertwining to degree 24; [pi] Frobenius shape; D_rho congruences to degree 32".into())
}

fn lemma26(cache: &Path) -> Check {
    let (code, v) = run(cache, &["verify", "elliptic", "--suite", "lemma26", "--q", "7", "--q", "23", "--q", "31", "--q", "47"])?;
    ensure(code == 0, format!("exit {code}"))?;
    let rs = reports(&v);
    ensure(rs.len() == 4, format!("{} witnesses", rs.len()))?;
    let mut found = Vec::new();
    for r in rs {
        let w = &r["parameters"]["witness"];
        let q = w["q"].as_u64().unwrap_or(0);
        let n = w["norm"].as_u64().unwrap_or(0);
        let coprime = n % 2 == 1 && n % 3 != 0 && n % q != 0;
        ensure(w["lambda_mod8"] == 1 && w["conj_mod8"] == 5 && coprime, format!("q={q}: {w}"))?;
        ensure(w["augmentation"]["holds"] == true, format!("q={q}: parity"))?;
        found.push(format!("q={q}: N={n}"));
    }
    Ok(found.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn(&Path) -> Check); 10] = [
        ("1 table reproduction (ingested)", Duration::from_secs(10), table_ingested),
        ("2 class numbers", Duration::from_secs(1), class_numbers),
        ("3 q=23 regulator", Duration::from_secs(30), regulator_q23),
        ("4 computed mode q=7,23,31", Duration::from_secs(600), computed_mode),
        ("5 Hilbert class polynomials", Duration::from_secs(30), hcp),
        ("6 2-adic splitting", Duration::from_secs(1), splitting),
        ("7 elliptic identity suite", Duration::from_secs(300), elliptic),
        ("8 Iwasawa property suite", Duration::from_secs(120), iwasawa),
        ("9 formal group suite", Duration::from_secs(120), formal_group),
        ("10 multiplier search q=7,23,31,47", Duration::from_secs(30), lemma26),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let cache = match tempfile::tempdir() {
            Ok(d) => d,
            Err(e) => {
                println!("FAIL {name}: no temporary directory: {e}");
                failed += 1;
                continue;
            }
        };
        let start = Instant::now();
        let res = check(cache.path());
        let t = start.elapsed();
        let timing = format!("{:.2} s <= {} s", t.as_secs_f64(), limit.as_secs());
        match res {
            Ok(msg) if t <= limit => println!("PASS {name}: {msg} [{timing}]"),
            Ok(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [too slow: {:.2} s > {} s]", t.as_secs_f64(), limit.as_secs());
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{timing}]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
