use std::path::{Path, PathBuf};

use iwasawa2::cache::{Cache, HcpRecord};
use iwasawa2::cm::{self, class_group, hilbert_class_poly, prime_above_2_form, prime_above_2_order, HilbertClassPoly};
use iwasawa2::elliptic::{self, IdentityReport};
use iwasawa2::formalgroup;
use iwasawa2::iwasawa::suites as iw;
use iwasawa2::nf::{build_h, compare_fields_2adic, parse_zpoly, split_2, NumberField};
use iwasawa2::padic::regulator::{ord2_over_drops, rational_digits};
use iwasawa2::padic::regulator_2adic;
use iwasawa2::pipeline::{self, IndexInput, Mode, PipelineOptions, Source, Table};
use iwasawa2::poly::format_poly;
use iwasawa2::units::{ingest_units, parse_units, search_units, UnitSet, Q23_UNITS};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;

/// What a command produced; `passed = false` maps to the verification-mismatch exit code.
pub struct Outcome {
    pub result: Value,
    pub provenance: Value,
    pub artifacts: Value,
    pub passed: bool,
    /// Raw text to print instead of the JSON envelope.
    pub raw: Option<String>,
}

impl Outcome {
    fn new(result: Value, provenance: Value, artifacts: Value, passed: bool) -> Self {
        Outcome { result, provenance, artifacts, passed, raw: None }
    }
}

fn hcp_artifact(rec: &HcpRecord, cache: &Cache) -> Value {
    json!({ "kind": "hilbert_class_poly", "q": rec.q, "version": rec.version(), "path": cache.dir().join(format!("hcp_{}.json", rec.q)) })
}

fn cached_hcp(cfg: &Config, q: u64) -> Result<(HilbertClassPoly, Value), CliError> {
    cm::check_q(q)?;
    let cache = Cache::new(&cfg.cache_dir);
    let (rec, _) = cache.class_poly(q)?;
    let hcp = rec.hcp().map_err(CliError::Precondition)?;
    Ok((hcp, hcp_artifact(&rec, &cache)))
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

pub fn classgroup(q: u64) -> Result<Outcome, CliError> {
    let cg = class_group(q)?;
    let p2 = prime_above_2_form(q);
    let result = json!({
        "q": q,
        "h": cg.h,
        "forms": cg.forms.iter().map(|f| [f.a.to_string(), f.b.to_string(), f.c.to_string()]).collect::<Vec<_>>(),
        "prime_above_2": [p2.a.to_string(), p2.b.to_string(), p2.c.to_string()],
        "prime_above_2_order": prime_above_2_order(&cg),
    });
    Ok(Outcome::new(result, json!({ "h": "computed" }), json!([]), true))
}

pub fn hcp(cfg: &Config, q: u64, bits: Option<u32>) -> Result<Outcome, CliError> {
    let (hcp, artifacts) = match bits {
        Some(b) => {
            cm::check_q(q)?;
            (hilbert_class_poly(q, b)?, json!([]))
        }
        None => {
            let (h, a) = cached_hcp(cfg, q)?;
            (h, json!([a]))
        }
    };
    let result = json!({
        "q": q,
        "h": hcp.h(),
        "coeffs": strings(&hcp.coeffs),
        "poly": format_poly(&hcp.coeffs, "x"),
        "prec_bits": hcp.prec_bits,
    });
    Ok(Outcome::new(result, json!({ "coeffs": "computed" }), artifacts, true))
}

fn splitting_json(nf: &NumberField, prec: u32) -> Result<(Value, usize), CliError> {
    let sp = split_2(nf, prec)?;
    let factors: Vec<Value> = sp
        .factors
        .iter()
        .map(|f| json!({ "residue": f.residue_str, "degree": f.degree, "above_p": f.above_p }))
        .collect();
    Ok((json!({ "local_degree": sp.f, "factors": factors }), sp.f))
}

pub fn field(cfg: &Config, q: u64, poly: Option<&str>) -> Result<Outcome, CliError> {
    let cg = class_group(q)?;
    let order = prime_above_2_order(&cg);
    let (hcp, art) = cached_hcp(cfg, q)?;
    let built = build_h(&hcp)?;
    let prec = cfg.padic_prec;
    let (nf, source) = match poly {
        Some(text) => {
            let coeffs: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
            let p = parse_zpoly(&coeffs).map_err(CliError::Precondition)?;
            (NumberField::from_external(q, cg.h, p)?, "ingested")
        }
        None => (built.clone(), "computed"),
    };
    let (splitting, f) = splitting_json(&nf, prec)?;
    let mut passed = f == order;
    let mut result = json!({
        "q": q,
        "h": cg.h,
        "degree": nf.degree(),
        "poly": nf.poly_string(),
        "omega": nf.omega().format("x"),
        "splitting": splitting,
        "prime_above_2_order": order,
        "local_degree_matches_class_order": f == order,
    });
    if poly.is_some() {
        let sp = split_2(&nf, prec)?;
        let agree = compare_fields_2adic(&nf, &sp, built.poly(), prec)?;
        passed &= agree.holds(nf.degree());
        result["agreement_with_computed_field"] = json!({ "computed_poly": built.poly_string(), "holds": agree.holds(nf.degree()), "evidence": agree });
    }
    Ok(Outcome::new(result, json!({ "poly": source, "splitting": "computed" }), json!([art]), passed))
}

fn set_bits(x: &BigInt) -> Vec<u64> {
    (0..x.bits()).filter(|&i| x.bit(i)).collect()
}

fn resolve_units(cfg: &Config, q: u64, file: Option<&Path>) -> Result<(NumberField, UnitSet, &'static str, Value), CliError> {
    let path: Option<PathBuf> = file.map(Path::to_path_buf).or_else(|| cfg.units.get(&q).cloned());
    if let Some(p) = path {
        let (nf, set) = ingest_units(&p, None)?;
        if nf.q() != q {
            return Err(CliError::Precondition(format!("{} holds units for q = {}", p.display(), nf.q())));
        }
        return Ok((nf, set, "ingested", json!([{ "kind": "units", "path": p }])));
    }
    if q == 23 {
        let (nf, set) = parse_units(Q23_UNITS, "q23", None)?;
        return Ok((nf, set, "paper", json!([{ "kind": "units", "path": "builtin:units_q23" }])));
    }
    let (hcp, art) = cached_hcp(cfg, q)?;
    if 2 * hcp.h() > 6 {
        return Err(CliError::Precondition(format!(
            "no unit data for q = {q}: supply --units FILE (unit search is limited to degree 6)"
        )));
    }
    let nf = build_h(&hcp)?;
    let set = search_units(&nf, cfg.search_effort)?;
    Ok((nf, set, "computed", json!([art])))
}

pub fn regulator(cfg: &Config, q: u64, units: Option<&Path>, prec: Option<u32>) -> Result<Outcome, CliError> {
    cm::check_q(q)?;
    let prec = prec.unwrap_or(cfg.padic_prec);
    let (nf, set, source, artifacts) = resolve_units(cfg, q, units)?;
    let split = split_2(&nf, prec + 32)?;
    let res = regulator_2adic(&nf, &split, &set.units, prec)?;
    let drops = ord2_over_drops(&res)?;
    let digits = rational_digits(&res.det, prec).map(|d| {
        let m = BigInt::from(1) << prec;
        let neg = (&m - &d) % &m;
        json!({ "bits": prec, "det": set_bits(&d), "negated_det": set_bits(&neg) })
    });
    let result = json!({
        "q": q,
        "ord2": res.ord2,
        "ord2_over_dropped_embedding": drops,
        "summary": res.summary(),
        "digits": digits,
        "units": set.units.iter().map(|u| u.format("x")).collect::<Vec<_>>(),
        "poly": nf.poly_string(),
    });
    Ok(Outcome::new(result, json!({ "units": source, "ord2": "computed" }), artifacts, true))
}

pub struct IndexArgs {
    pub q: u64,
    pub n: u32,
    pub rp: Option<i64>,
    pub hh: u64,
    pub disc_ord: i64,
    pub computed: bool,
}

pub fn index(cfg: &Config, a: &IndexArgs) -> Result<Outcome, CliError> {
    cm::check_q(a.q)?;
    let published = pipeline::published_row(a.q).ok();
    let mut artifacts = json!([]);
    let (rp, source) = match (a.rp, a.computed) {
        (Some(r), _) => (r, Source::Ingested),
        (None, true) => {
            let opts = PipelineOptions { prec: cfg.padic_prec.min(64), search_effort: cfg.search_effort, threads: 1, cache: Some(Cache::new(&cfg.cache_dir)) };
            let c = pipeline::computed_regulator(a.q, &opts)?;
            artifacts = json!([{ "kind": "computed_regulator", "detail": c }]);
            (c.ord2_rp, Source::Computed)
        }
        (None, false) => match published {
            Some(p) => (p.ord2_rp, Source::Paper),
            None => {
                return Err(CliError::Precondition(format!("no ord2_Rp for q = {}: pass --rp or --computed", a.q)));
            }
        },
    };
    let input = IndexInput { q: a.q, hh: a.hh, ord2_rp: rp, n: a.n, ord2_sqrt_disc: a.disc_ord };
    let b = pipeline::index_ord(&input)?;
    let (v, note) = pipeline::verdict(a.hh, b.total);
    let lemma51 = pipeline::lemma51_note(a.q)?;
    let mut passed = true;
    let mut result = json!({ "input": input, "breakdown": b, "ord2_index": b.total, "verdict": v, "note": note, "lemma51": lemma51 });
    if let Some(p) = published {
        if a.n == 0 && a.hh == p.hh && source != Source::Ingested {
            passed = p.ord2_index == b.total && p.ord2_rp == rp;
            result["published"] = json!({ "ord2_Rp": p.ord2_rp, "ord2_index": p.ord2_index, "agrees": passed });
        }
    }
    let verdict_source = if v == pipeline::Verdict::Undetermined { Source::Paper } else { Source::Computed };
    let provenance = json!({ "hH": "ingested", "ord2_Rp": source, "ord2_index": "computed", "verdict": verdict_source });
    Ok(Outcome::new(result, provenance, artifacts, passed))
}

pub fn table(cfg: &Config, q_max: u64, mode: Mode, csv_path: Option<&Path>, csv_stdout: bool) -> Result<Outcome, CliError> {
    let opts = PipelineOptions {
        prec: cfg.padic_prec.min(64),
        search_effort: cfg.search_effort,
        threads: cfg.threads,
        cache: Some(Cache::new(&cfg.cache_dir)),
    };
    let t: Table = pipeline::build_table(q_max, mode, &opts);
    let csv = t.to_csv();
    let mismatches = pipeline::published_mismatches(&t)?;
    let mut artifacts = Vec::new();
    if let Some(p) = csv_path {
        std::fs::write(p, &csv).map_err(|e| CliError::Precondition(format!("{}: {e}", p.display())))?;
        artifacts.push(json!({ "kind": "csv", "path": p }));
    }
    let provenance = json!({ "mode": mode, "rows": t.rows.iter().map(|r| json!({ "q": r.q, "provenance": r.provenance })).collect::<Vec<_>>() });
    let result = json!({
        "q_max": q_max,
        "mode": mode,
        "rows": t.rows,
        "failures": t.failures,
        "computed": t.computed,
        "published_mismatches": mismatches,
        "csv": csv,
    });
    let mut out = Outcome::new(result, provenance, Value::Array(artifacts), mismatches.is_empty());
    if csv_stdout {
        out.raw = Some(csv);
    }
    Ok(out)
}

fn needs_q7(qs: &[u64], suite: &str) -> Result<(), CliError> {
    if qs != [7] {
        return Err(CliError::Precondition(format!("suite {suite} runs on the q = 7 CM lattice only; pass --q 7")));
    }
    Ok(())
}

fn identity_reports(v: Vec<IdentityReport>) -> (Vec<Value>, bool) {
    let ok = v.iter().all(|r| r.passed);
    (v.into_iter().map(|r| serde_json::to_value(r).unwrap_or(Value::Null)).collect(), ok)
}

pub fn verify_elliptic(cfg: &Config, suite: &str, qs: &[u64]) -> Result<Outcome, CliError> {
    let bits = cfg.complex_bits;
    let seed = cfg.seed;
    let mut reports = Vec::new();
    let mut passed = true;
    let mut push = |(r, ok): (Vec<Value>, bool)| {
        reports.extend(r);
        passed &= ok;
    };
    match suite {
        "25" => {
            needs_q7(qs, suite)?;
            push(identity_reports(elliptic::suites::identity25(bits, seed)?));
        }
        "22" => {
            needs_q7(qs, suite)?;
            push(identity_reports(vec![elliptic::suites::distribution(bits, seed)?]));
            let checks = formalgroup::suites::formal_group(24, cfg.series_degree, 64)?;
            let ok = checks.iter().all(|c| c.passed);
            push((checks.into_iter().map(|c| serde_json::to_value(c).unwrap_or(Value::Null)).collect(), ok));
        }
        "prop21" => {
            needs_q7(qs, suite)?;
            push(identity_reports(elliptic::suites::prop21(bits)?));
            push(identity_reports(elliptic::suites::hecke(bits)?));
            push(identity_reports(vec![elliptic::suites::g2_cross_check(bits)?]));
        }
        "lemma26" => {
            for (q, r) in qs.iter().zip(elliptic::suites::lemma26(qs)) {
                match r {
                    Ok(rep) => push(identity_reports(vec![rep])),
                    Err(e) => push((vec![json!({ "q": q, "error": e.to_string() })], false)),
                }
            }
        }
        _ => return Err(CliError::Precondition(format!("unknown elliptic suite {suite}"))),
    }
    let result = json!({ "suite": suite, "q": qs, "reports": reports, "passed": passed });
    Ok(Outcome::new(result, json!({ "residuals": "computed" }), json!([]), passed))
}

pub fn verify_iwasawa(cfg: &Config, suite: &str, samples: usize) -> Result<Outcome, CliError> {
    let seed = cfg.seed;
    let reports = match suite {
        "mahler" => vec![iw::mahler_suite(samples, seed), iw::scalar_shift_suite(samples, seed)],
        "gamma" => vec![iw::gamma_suite(cfg.series_degree, 32)?],
        "sinnott" => vec![iw::sinnott_suite(samples, seed, 6, 24)],
        "asymptote" => vec![iw::asymptote_suite()],
        _ => return Err(CliError::Precondition(format!("unknown iwasawa suite {suite}"))),
    };
    let passed = reports.iter().all(|r| r.passed);
    let result = json!({ "suite": suite, "reports": reports, "passed": passed });
    Ok(Outcome::new(result, json!({ "properties": "computed" }), json!([]), passed))
}
