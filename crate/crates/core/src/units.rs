//! Units of the ring class field: ingestion from data files, a small-height search, and checks.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigcomplex::BigComplex;
use crate::linalg::{self, IMat};
use crate::nf::{self, compare_fields_2adic, parse_rational, split_2, FieldElem, NumberField};
use crate::order::{maximal_order, place_embeddings, reduced_basis, working_precision, OrderError};

#[derive(Debug, Error)]
pub enum UnitError {
    #[error("unit file {path}: {msg}")]
    File { path: String, msg: String },
    #[error("unit {index} has norm {norm}, not +-1")]
    BadNorm { index: usize, norm: BigRational },
    #[error("units are multiplicatively dependent (log determinant {0:e})")]
    Dependent(f64),
    #[error("expected {expected} units, found {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("unit file polynomial does not define the active field")]
    FieldMismatch,
    #[error("unit search is limited to degree 6, field has degree {0}")]
    DegreeTooLarge(usize),
    #[error("search effort {effort} exhausted with {found} independent units of {needed}")]
    EffortExhausted { effort: u32, found: usize, needed: usize },
    #[error("no odd-index certificate with split primes below {0}")]
    NoCertificate(u64),
    #[error(transparent)]
    Field(#[from] nf::NfError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitProvenance {
    Ingested { source: String },
    Searched { effort: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitSet {
    pub units: Vec<FieldElem>,
    pub provenance: UnitProvenance,
}

/// On-disk unit data: `{q, poly, units, source}` with decimal or `a/b` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFile {
    pub q: u64,
    pub poly: Vec<String>,
    pub units: Vec<Vec<String>>,
    pub source: String,
}

impl UnitFile {
    pub fn from_units(nf: &NumberField, set: &UnitSet, source: &str) -> Self {
        UnitFile {
            q: nf.q(),
            poly: nf.poly().iter().map(|c| c.to_string()).collect(),
            units: set.units.iter().map(|u| u.to_strings()).collect(),
            source: source.to_string(),
        }
    }
}

/// Unit file shipped with the crate for `q = 23`.
pub const Q23_UNITS: &str = include_str!("../data/units_q23.json");

fn file_err(path: &str, msg: impl Into<String>) -> UnitError {
    UnitError::File { path: path.to_string(), msg: msg.into() }
}

/// Parse and validate unit data. The file's polynomial defines the returned field; when an active
/// field is given, the two polynomials must agree or be certified equal 2-adically.
pub fn parse_units(
    text: &str,
    label: &str,
    active: Option<&NumberField>,
) -> Result<(NumberField, UnitSet), UnitError> {
    let file: UnitFile = serde_json::from_str(text).map_err(|e| file_err(label, e.to_string()))?;
    let poly = nf::parse_zpoly(&file.poly).map_err(|e| file_err(label, e))?;
    let h = (poly.len() - 1) / 2;
    let field = NumberField::from_external(file.q, h, poly)?;
    if let Some(act) = active {
        if act.q() != file.q || act.degree() != field.degree() {
            return Err(UnitError::FieldMismatch);
        }
        if act.poly() != field.poly() {
            let sp = split_2(act, 64)?;
            let agree = compare_fields_2adic(act, &sp, field.poly(), 64)?;
            if !agree.holds(act.degree()) {
                return Err(UnitError::FieldMismatch);
            }
        }
    }
    let mut units = Vec::new();
    for u in &file.units {
        let coords: Result<Vec<BigRational>, String> = u.iter().map(|s| parse_rational(s)).collect();
        let coords = coords.map_err(|e| file_err(label, e))?;
        units.push(field.from_qpoly(&coords));
    }
    let set = UnitSet { units, provenance: UnitProvenance::Ingested { source: file.source.clone() } };
    validate(&field, &set)?;
    Ok((field, set))
}

pub fn ingest_units(path: &Path, active: Option<&NumberField>) -> Result<(NumberField, UnitSet), UnitError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| file_err(&label, e.to_string()))?;
    parse_units(&text, &label, active)
}

/// Norms are `+-1`, the count is `h - 1` and the logarithmic embedding has full rank.
pub fn validate(nf: &NumberField, set: &UnitSet) -> Result<(), UnitError> {
    let r = nf.h() - 1;
    if set.units.len() != r {
        return Err(UnitError::WrongCount { expected: r, got: set.units.len() });
    }
    for (index, u) in set.units.iter().enumerate() {
        let norm = nf.norm(u);
        if !nf::abs_is_one(&norm) {
            return Err(UnitError::BadNorm { index, norm });
        }
    }
    if r > 0 {
        let reg = complex_regulator(nf, &set.units, 128);
        if !(reg > 1e-20) {
            return Err(UnitError::Dependent(reg));
        }
    }
    Ok(())
}

/// Rows `2 log|sigma_j(u)|` over one embedding per complex place.
pub fn log_embedding(nf: &NumberField, units: &[FieldElem], prec: u32) -> Vec<Vec<f64>> {
    let prec = prec.max(working_precision(nf, units));
    let emb = place_embeddings(nf, units, prec);
    emb.iter().map(|row| row.iter().map(|z| 2.0 * z.abs().ln().to_f64()).collect()).collect()
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Absolute regulator over the first `h - 1` complex places.
pub fn complex_regulator(nf: &NumberField, units: &[FieldElem], prec: u32) -> f64 {
    if units.is_empty() {
        return 1.0;
    }
    let l = log_embedding(nf, units, prec);
    let r = units.len();
    det_f64(l.iter().map(|row| row[..r].to_vec()).collect()).abs()
}

/// Index of the subgroup generated by `sub` inside the one generated by `full`, from regulators.
pub fn regulator_ratio(nf_sub: &NumberField, sub: &[FieldElem], nf_full: &NumberField, full: &[FieldElem]) -> f64 {
    complex_regulator(nf_sub, sub, 256) / complex_regulator(nf_full, full, 256)
}

fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &x)| r.iter().copied().chain([x]).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(piv, c);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for k in c..=n {
                    m[i][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn product_of_powers(nf: &NumberField, units: &[FieldElem], exps: &[BigInt]) -> Result<FieldElem, UnitError> {
    let mut acc = nf.one();
    for (u, e) in units.iter().zip(exps) {
        if e.is_zero() {
            continue;
        }
        let e = e.to_i64().ok_or(UnitError::Dependent(0.0))?;
        acc = nf.mul(&acc, &nf.pow(u, e)?);
    }
    Ok(acc)
}

/// Search for `h - 1` independent units among small combinations of an LLL-reduced integral basis.
/// The result generates the same group as all units found; it is not certified to be fundamental.
pub fn search_units(nf: &NumberField, effort: u32) -> Result<UnitSet, UnitError> {
    let n = nf.degree();
    let r = nf.h() - 1;
    let provenance = UnitProvenance::Searched { effort };
    if r == 0 {
        return Ok(UnitSet { units: vec![], provenance });
    }
    if n > 6 {
        return Err(UnitError::DegreeTooLarge(n));
    }
    let order = reduced_basis(nf, &maximal_order(nf)?);
    let prec = working_precision(nf, order.basis());
    let roots = nf.complex_roots(prec);
    let emb: Vec<Vec<(f64, f64)>> =
        order.basis().iter().map(|b| roots[..nf.h()].iter().map(|rt| nf.embed(b, rt).to_c64()).collect()).collect();
    let b = effort.max(1) as i64;
    let width = (2 * b + 1) as usize;
    let total = width.pow(n as u32);
    let mut found: Vec<(FieldElem, Vec<f64>)> = Vec::new();
    let mut c = vec![0i64; n];
    for idx in 0..total {
        let mut t = idx;
        for x in c.iter_mut() {
            *x = (t % width) as i64 - b;
            t /= width;
        }
        match c.iter().find(|&&x| x != 0) {
            Some(&x) if x > 0 => {}
            _ => continue,
        }
        let mut logs = Vec::with_capacity(nf.h());
        let mut lognorm = 0.0;
        for j in 0..nf.h() {
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..n {
                re += c[i] as f64 * emb[i][j].0;
                im += c[i] as f64 * emb[i][j].1;
            }
            let l = (re * re + im * im).ln();
            logs.push(l);
            lognorm += l;
        }
        if lognorm.abs() > 1e-6 || logs.iter().all(|l| l.abs() < 1e-8) {
            continue;
        }
        let x = order.element(nf, &c.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        if !nf::abs_is_one(&nf.norm(&x)) {
            continue;
        }
        let dup = found.iter().any(|(_, l)| {
            l.iter().zip(&logs).all(|(a, b)| (a - b).abs() < 1e-8) || l.iter().zip(&logs).all(|(a, b)| (a + b).abs() < 1e-8)
        });
        if !dup {
            found.push((x, logs));
        }
    }
    let base = choose_base(&found, r).ok_or(UnitError::EffortExhausted { effort, found: rank_of(&found, r), needed: r })?;
    let mut units: Vec<FieldElem> = base.iter().map(|&i| found[i].0.clone()).collect();
    let mut logs: Vec<Vec<f64>> = base.iter().map(|&i| found[i].1[..r].to_vec()).collect();
    loop {
        let mut coords: Vec<Vec<f64>> = Vec::new();
        let mut bad = false;
        let a_t: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|k| logs[k][i]).collect()).collect();
        for (_, l) in &found {
            let x = solve_f64(&a_t, &l[..r]).ok_or(UnitError::Dependent(0.0))?;
            if x.iter().any(|v| (v - v.round()).abs() > 1e-6) {
                bad = true;
            }
            coords.push(x);
        }
        if !bad {
            break;
        }
        let (new_units, new_logs) = enlarge(nf, &units, &found, &coords, r)?;
        units = new_units;
        logs = new_logs;
    }
    let set = UnitSet { units, provenance };
    validate(nf, &set)?;
    Ok(set)
}

fn rank_of(found: &[(FieldElem, Vec<f64>)], r: usize) -> usize {
    (0..=r).rev().find(|&k| k == 0 || choose_base(found, k).is_some()).unwrap_or(0)
}

/// Indices of `r` found units with the smallest nonzero regulator (exhaustive for `r <= 2`,
/// greedy otherwise).
fn choose_base(found: &[(FieldElem, Vec<f64>)], r: usize) -> Option<Vec<usize>> {
    let m = found.len();
    let det_of = |idx: &[usize]| det_f64(idx.iter().map(|&i| found[i].1[..r].to_vec()).collect()).abs();
    match r {
        1 => (0..m)
            .filter(|&i| found[i].1[0].abs() > 1e-8)
            .min_by(|&a, &b| found[a].1[0].abs().partial_cmp(&found[b].1[0].abs()).unwrap())
            .map(|i| vec![i]),
        2 => {
            let mut best: Option<(f64, Vec<usize>)> = None;
            for i in 0..m {
                for j in i + 1..m {
                    let d = det_of(&[i, j]);
                    if d > 1e-8 && best.as_ref().map_or(true, |(bd, _)| d < *bd - 1e-9) {
                        best = Some((d, vec![i, j]));
                    }
                }
            }
            best.map(|(_, v)| v)
        }
        _ => {
            let mut chosen: Vec<usize> = Vec::new();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                let na: f64 = found[a].1.iter().map(|x| x * x).sum();
                let nb: f64 = found[b].1.iter().map(|x| x * x).sum();
                na.partial_cmp(&nb).unwrap()
            });
            for i in order {
                let mut trial = chosen.clone();
                trial.push(i);
                let k = trial.len();
                let sub: Vec<Vec<f64>> = trial.iter().map(|&t| found[t].1[..k].to_vec()).collect();
                if det_f64(sub).abs() > 1e-8 {
                    chosen = trial;
                }
                if chosen.len() == r {
                    return Some(chosen);
                }
            }
            None
        }
    }
}

/// Replace the base by a basis of the group generated by the base and all found units, using a
/// Hermite normal form on the rational coordinates and exact products.
fn enlarge(
    nf: &NumberField,
    base: &[FieldElem],
    found: &[(FieldElem, Vec<f64>)],
    coords: &[Vec<f64>],
    r: usize,
) -> Result<(Vec<FieldElem>, Vec<Vec<f64>>), UnitError> {
    let mut den = 1i64;
    for x in coords {
        for v in x {
            let d = (1..=720).find(|d| ((v * *d as f64) - (v * *d as f64).round()).abs() < 1e-6).ok_or(UnitError::Dependent(0.0))?;
            den = num_integer::lcm(den, d);
        }
    }
    let mut gens: Vec<FieldElem> = base.to_vec();
    gens.extend(found.iter().map(|(u, _)| u.clone()));
    let mut rows: IMat = (0..r).map(|i| (0..r).map(|k| BigInt::from(if i == k { den } else { 0 })).collect()).collect();
    for x in coords {
        rows.push(x.iter().map(|v| BigInt::from((v * den as f64).round() as i64)).collect());
    }
    let (h, u) = linalg::hnf_with_transform(&rows);
    let mut units = Vec::with_capacity(r);
    for i in 0..r {
        debug_assert!(h[i].iter().any(|x| !x.is_zero()));
        units.push(product_of_powers(nf, &gens, &u[i])?);
    }
    let logs = log_embedding(nf, &units, 128).into_iter().map(|l| l[..r].to_vec()).collect();
    Ok((units, logs))
}

/// Nearest integer to a regulator ratio and whether it is odd.
pub fn odd_index(ratio: f64) -> Option<(i64, bool)> {
    let k = ratio.round();
    if (ratio - k).abs() > 1e-6 || k < 1.0 {
        return None;
    }
    let k = k as i64;
    Some((k, k % 2 == 1))
}

/// A degree-one prime `(ell, root)` and the characters of `-1, eps_1, ..., eps_r` there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPrimeCharacter {
    pub ell: u64,
    pub root: u64,
    pub nonresidue: Vec<bool>,
}

/// Certificate that `<-1, units>` has odd index in the full unit group.
///
/// Every nontrivial class of `V/V^2` is a non-residue at one of the listed primes, so
/// no element of `V \ V^2` is a square in the field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OddIndexCertificate {
    pub characters: Vec<SplitPrimeCharacter>,
    pub classes_checked: usize,
}

fn mod_u64(r: &BigRational, ell: u64) -> Option<u64> {
    let m = BigInt::from(ell);
    let den = r.denom().mod_floor(&m).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = r.numer().mod_floor(&m).to_u64()?;
    Some(num * pow_mod(den, ell - 2, ell) % ell)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn eval_mod(c: &[u64], x: u64, ell: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &a| (acc * x + a) % ell)
}

pub fn certify_odd_index(nf: &NumberField, units: &[FieldElem], ell_max: u64) -> Result<OddIndexCertificate, UnitError> {
    let rank = units.len() + 1;
    let disc = nf.discriminant();
    let mut basis: Vec<(u64, usize)> = Vec::new();
    let mut characters = Vec::new();
    for ell in (3..ell_max).filter(|&l| crate::cm::is_prime(l)) {
        if basis.len() == rank {
            break;
        }
        if (&disc % BigInt::from(ell)).is_zero() {
            continue;
        }
        let f: Option<Vec<u64>> = nf.poly().iter().map(|c| mod_u64(&BigRational::from_integer(c.clone()), ell)).collect();
        let coords: Option<Vec<Vec<u64>>> =
            units.iter().map(|u| u.coords().iter().map(|c| mod_u64(c, ell)).collect()).collect();
        let (Some(f), Some(coords)) = (f, coords) else { continue };
        let half = (ell - 1) / 2;
        for root in (0..ell).filter(|&x| eval_mod(&f, x, ell) == 0) {
            let mut chi = vec![half % 2 == 1];
            let mut ok = true;
            for c in &coords {
                let v = eval_mod(c, root, ell);
                if v == 0 {
                    ok = false;
                    break;
                }
                chi.push(pow_mod(v, half, ell) != 1);
            }
            if !ok {
                continue;
            }
            let mut bits: u64 = chi.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1u64 << i).sum();
            for &(b, lead) in &basis {
                if bits >> lead & 1 == 1 {
                    bits ^= b;
                }
            }
            if bits != 0 {
                basis.push((bits, 63 - bits.leading_zeros() as usize));
                characters.push(SplitPrimeCharacter { ell, root, nonresidue: chi });
            }
        }
    }
    if basis.len() < rank {
        return Err(UnitError::NoCertificate(ell_max));
    }
    Ok(OddIndexCertificate { characters, classes_checked: (1usize << rank) - 1 })
}

pub fn embed_all(nf: &NumberField, x: &FieldElem, prec: u32) -> Vec<BigComplex> {
    nf.complex_roots(prec).iter().map(|r| nf.embed(x, r)).collect()
}

pub fn max_abs_coord(x: &FieldElem) -> BigRational {
    x.coords().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::hilbert_class_poly_default;
    use crate::nf::build_h;

    #[test]
    fn shipped_q23_units_are_accepted() {
        let (nf, set) = parse_units(Q23_UNITS, "q23", None).unwrap();
        assert_eq!(nf.degree(), 6);
        assert_eq!(set.units.len(), 2);
        let file = UnitFile::from_units(&nf, &set, "published");
        let text = serde_json::to_string(&file).unwrap();
        let (_, again) = parse_units(&text, "roundtrip", None).unwrap();
        assert_eq!(again.units, set.units);
    }

    #[test]
    fn tampered_unit_is_rejected() {
        let mut file: UnitFile = serde_json::from_str(Q23_UNITS).unwrap();
        file.units[0][0] = "2".into();
        let err = parse_units(&serde_json::to_string(&file).unwrap(), "bad", None).unwrap_err();
        assert!(matches!(err, UnitError::BadNorm { index: 0, .. }), "{err}");
    }

    #[test]
    fn dependent_units_are_rejected() {
        let mut file: UnitFile = serde_json::from_str(Q23_UNITS).unwrap();
        file.units[1] = file.units[0].clone();
        let err = parse_units(&serde_json::to_string(&file).unwrap(), "dep", None).unwrap_err();
        assert!(matches!(err, UnitError::Dependent(_)), "{err}");
    }

    #[test]
    fn q7_has_no_units() {
        let nf = build_h(&hilbert_class_poly_default(7).unwrap()).unwrap();
        assert!(search_units(&nf, 1).unwrap().units.is_empty());
    }

    #[test]
    fn q23_search_matches_published_units_up_to_odd_index() {
        let nf = build_h(&hilbert_class_poly_default(23).unwrap()).unwrap();
        let found = search_units(&nf, 2).unwrap();
        let (pnf, reference) = parse_units(Q23_UNITS, "q23", None).unwrap();
        let ratio = regulator_ratio(&nf, &found.units, &pnf, &reference.units);
        let (k, odd) = odd_index(ratio).unwrap();
        assert!(odd, "index {k}");
        let cert = certify_odd_index(&nf, &found.units, 10_000).unwrap();
        assert_eq!(cert.characters.len(), 3);
        assert_eq!(cert.classes_checked, 7);
    }

    #[test]
    fn squares_have_no_odd_index_certificate() {
        let (nf, reference) = parse_units(Q23_UNITS, "q23", None).unwrap();
        let sq = nf.mul(&reference.units[0], &reference.units[0]);
        let err = certify_odd_index(&nf, &[sq, reference.units[1].clone()], 2_000).unwrap_err();
        assert!(matches!(err, UnitError::NoCertificate(2_000)));
    }
}
