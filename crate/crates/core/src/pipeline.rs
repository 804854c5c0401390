//! The index formula for `[M(H):H_inf]`, the table over `q < 500`, and the resulting verdict on `X(H_inf)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cache::{Cache, CacheError};
use crate::cm::{self, class_group, hilbert_class_poly_default, prime_above_2_order, CmError, HilbertClassPoly};
use crate::nf::{build_h, split_2, NfError};
use crate::padic::{regulator_2adic, RegulatorError};
use crate::units::{certify_odd_index, odd_index, parse_units, regulator_ratio, search_units, UnitError, Q23_UNITS};

pub const PUBLISHED_TABLE: &str = include_str!("../data/published_table.csv");

pub const CSV_HEADER: &str = "q,hK,hH,ord2_Rp,ord2_index,verdict,provenance";

/// Primes for which the full computation (class polynomial through regulator) runs at desk scale.
pub const COMPUTED_PRIMES: [u64; 3] = [7, 23, 31];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("residue degree {f} does not divide {h}")]
    ResidueDegree { h: usize, f: usize },
    #[error("index formula gives ord_2 = {0} < 0; the inputs are inconsistent")]
    NegativeIndex(i64),
    #[error("h(H) must be positive, got {0}")]
    BadClassNumber(u64),
    #[error("q = {0}: 2 does not split in K")]
    NotSplit(u64),
    #[error("h(K) = {0} is even")]
    EvenClassNumber(usize),
    #[error("no unit data for q = {q}: {reason}")]
    MissingUnits { q: u64, reason: String },
    #[error("searched units for q = {q} do not have odd index ({index} against the reference)")]
    EvenIndex { q: u64, index: i64 },
    #[error("no published row for q = {0}")]
    NoPublishedRow(u64),
    #[error("published table is malformed: {0}")]
    Table(String),
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Field(#[from] NfError),
    #[error(transparent)]
    Units(#[from] UnitError),
    #[error(transparent)]
    Regulator(#[from] RegulatorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    Ingested,
    Paper,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Computed => "computed",
            Source::Ingested => "ingested",
            Source::Paper => "paper",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "X_zero")]
    XZero,
    #[serde(rename = "X_nonzero_infinite")]
    XNonzeroInfinite,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::XZero => "X_zero",
            Verdict::XNonzeroInfinite => "X_nonzero_infinite",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowProvenance {
    #[serde(rename = "hK")]
    pub hk: Source,
    #[serde(rename = "hH")]
    pub hh: Source,
    #[serde(rename = "ord2_Rp")]
    pub ord2_rp: Source,
    pub ord2_index: Source,
    pub verdict: Source,
}

impl fmt::Display for RowProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hK:{}|hH:{}|ord2_Rp:{}|ord2_index:{}|verdict:{}",
            self.hk, self.hh, self.ord2_rp, self.ord2_index, self.verdict
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub q: u64,
    #[serde(rename = "hK")]
    pub hk: usize,
    #[serde(rename = "hH")]
    pub hh: u64,
    #[serde(rename = "ord2_Rp")]
    pub ord2_rp: i64,
    pub ord2_index: i64,
    pub verdict: Verdict,
    pub provenance: RowProvenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TableRow {
    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{},{},{}", self.q, self.hk, self.hh, self.ord2_rp, self.ord2_index, self.verdict, self.provenance)
    }
}

/// One line of the published table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PublishedRow {
    pub q: u64,
    pub hk: usize,
    pub hh: u64,
    pub ord2_rp: i64,
    pub ord2_index: i64,
}

pub fn published_table() -> Result<Vec<PublishedRow>, PipelineError> {
    let mut out = Vec::new();
    for line in PUBLISHED_TABLE.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let f: Vec<i64> = line
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| PipelineError::Table(format!("{line}: {e}"))))
            .collect::<Result<_, _>>()?;
        if f.len() != 5 {
            return Err(PipelineError::Table(line.to_string()));
        }
        out.push(PublishedRow { q: f[0] as u64, hk: f[1] as usize, hh: f[2] as u64, ord2_rp: f[3], ord2_index: f[4] });
    }
    Ok(out)
}

pub fn published_row(q: u64) -> Result<PublishedRow, PipelineError> {
    published_table()?.into_iter().find(|r| r.q == q).ok_or(PipelineError::NoPublishedRow(q))
}

/// `ord_2 prod_{P | p} (1 - N(P)^-1)` over the `h/f` primes of degree `f` above `p`.
pub fn euler_factor_ord(h: usize, f: usize) -> Result<i64, PipelineError> {
    if f == 0 || h % f != 0 {
        return Err(PipelineError::ResidueDegree { h, f });
    }
    Ok((h / f) as i64 * -(f as i64))
}

fn ord2_u64(n: u64) -> i64 {
    n.trailing_zeros() as i64
}

/// Inputs to the index formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexInput {
    pub q: u64,
    #[serde(rename = "hH")]
    pub hh: u64,
    #[serde(rename = "ord2_Rp")]
    pub ord2_rp: i64,
    pub n: u32,
    /// `ord_2` of a square root of the relative discriminant at `p`; zero when `n = 0`.
    pub ord2_sqrt_disc: i64,
}

/// Each additive contribution to `ord_2 [M(H_n):H_inf]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexBreakdown {
    pub q: u64,
    pub h: usize,
    pub residue_degree: usize,
    pub ord2_class_number: i64,
    pub ord2_regulator: i64,
    pub ord2_roots_of_unity: i64,
    pub ord2_sqrt_discriminant: i64,
    pub ord2_euler_factor: i64,
    pub n: i64,
    pub constant: i64,
    pub total: i64,
}

pub fn index_ord(input: &IndexInput) -> Result<IndexBreakdown, PipelineError> {
    if input.hh == 0 {
        return Err(PipelineError::BadClassNumber(0));
    }
    let cg = class_group(input.q)?;
    let f = prime_above_2_order(&cg);
    let euler = euler_factor_ord(cg.h, f)?;
    let sqrt_disc = if input.n == 0 { 0 } else { input.ord2_sqrt_disc };
    let parts = [ord2_u64(input.hh), input.ord2_rp, -1, -sqrt_disc, euler, input.n as i64, 2];
    let total: i64 = parts.iter().sum();
    if total < 0 {
        return Err(PipelineError::NegativeIndex(total));
    }
    Ok(IndexBreakdown {
        q: input.q,
        h: cg.h,
        residue_degree: f,
        ord2_class_number: parts[0],
        ord2_regulator: parts[1],
        ord2_roots_of_unity: parts[2],
        ord2_sqrt_discriminant: parts[3],
        ord2_euler_factor: parts[4],
        n: parts[5],
        constant: parts[6],
        total,
    })
}

pub const UNDETERMINED_NOTE: &str = "X(H_inf) != 0 not concluded; M(H) != H_inf";

/// The verdict and, when undetermined, the accompanying note.
pub fn verdict(hh: u64, ord2_index: i64) -> (Verdict, Option<String>) {
    if ord2_index == 0 {
        (Verdict::XZero, None)
    } else if hh % 2 == 0 {
        (Verdict::XNonzeroInfinite, None)
    } else {
        (Verdict::Undetermined, Some(UNDETERMINED_NOTE.to_string()))
    }
}

/// Applicability record for the vanishing of `X(K_inf)`: 2 splits in `K` and `h(K)` is odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma51Note {
    pub q: u64,
    pub two_splits: bool,
    pub h: usize,
    pub applicable: bool,
    pub conclusion: String,
}

pub fn lemma51_note(q: u64) -> Result<Lemma51Note, PipelineError> {
    if q % 8 != 7 || !cm::is_prime(q) {
        return Err(PipelineError::NotSplit(q));
    }
    let h = class_group(q)?.h;
    if h % 2 == 0 {
        return Err(PipelineError::EvenClassNumber(h));
    }
    Ok(Lemma51Note { q, two_splits: true, h, applicable: true, conclusion: "X(K_inf) = 0".into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ingested,
    Computed,
    Hybrid,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ingested" => Ok(Mode::Ingested),
            "computed" => Ok(Mode::Computed),
            "hybrid" => Ok(Mode::Hybrid),
            _ => Err(format!("unknown mode {s}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    /// 2-adic working precision for the regulator.
    pub prec: u32,
    pub search_effort: u32,
    pub threads: usize,
    pub cache: Option<Cache>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { prec: 64, search_effort: 2, threads: 4, cache: None }
    }
}

/// What the computed path did for one prime.
#[derive(Clone, Debug, Serialize)]
pub struct ComputedRegulator {
    pub q: u64,
    pub h: usize,
    pub hcp_degree: usize,
    pub hcp_cached: bool,
    pub field_poly: String,
    pub units: Vec<String>,
    pub odd_index_primes: Vec<u64>,
    pub reference_index: Option<i64>,
    pub ord2_rp: i64,
    pub prec: u32,
}

fn class_poly(q: u64, opts: &PipelineOptions) -> Result<(HilbertClassPoly, bool), PipelineError> {
    match &opts.cache {
        Some(c) => {
            let (rec, hit) = c.class_poly(q)?;
            let hcp = rec.hcp().map_err(|e| CacheError::Malformed(c.dir().to_path_buf(), e))?;
            Ok((hcp, hit))
        }
        None => Ok((hilbert_class_poly_default(q)?, false)),
    }
}

/// Class polynomial, field, searched units with an odd-index certificate, and `ord_2 R_p`.
pub fn computed_regulator(q: u64, opts: &PipelineOptions) -> Result<ComputedRegulator, PipelineError> {
    cm::check_q(q)?;
    let h = class_group(q)?.h;
    if 2 * h > 6 {
        return Err(PipelineError::MissingUnits { q, reason: format!("unit search is limited to degree 6, H has degree {}", 2 * h) });
    }
    let (hcp, hcp_cached) = class_poly(q, opts)?;
    let nf = build_h(&hcp)?;
    let split = split_2(&nf, opts.prec)?;
    let found = search_units(&nf, opts.search_effort)?;
    let cert = certify_odd_index(&nf, &found.units, 100_000)?;
    let reference_index = if q == 23 {
        let (pnf, reference) = parse_units(Q23_UNITS, "q23", None)?;
        let ratio = regulator_ratio(&nf, &found.units, &pnf, &reference.units);
        let (k, odd) = odd_index(ratio).ok_or(PipelineError::EvenIndex { q, index: 0 })?;
        if !odd {
            return Err(PipelineError::EvenIndex { q, index: k });
        }
        Some(k)
    } else {
        None
    };
    let ord2_rp = if found.units.is_empty() {
        0
    } else {
        regulator_2adic(&nf, &split, &found.units, opts.prec)?.ord2 as i64
    };
    Ok(ComputedRegulator {
        q,
        h,
        hcp_degree: hcp.h(),
        hcp_cached,
        field_poly: nf.poly_string(),
        units: found.units.iter().map(|u| u.format("x")).collect(),
        odd_index_primes: cert.characters.iter().map(|c| c.ell).collect(),
        reference_index,
        ord2_rp,
        prec: opts.prec,
    })
}

fn row_from(q: u64, hh: u64, ord2_rp: i64, rp_source: Source) -> Result<TableRow, PipelineError> {
    let h = class_group(q)?.h;
    if h % 2 == 0 {
        return Err(PipelineError::EvenClassNumber(h));
    }
    let b = index_ord(&IndexInput { q, hh, ord2_rp, n: 0, ord2_sqrt_disc: 0 })?;
    let (v, note) = verdict(hh, b.total);
    let verdict_source = if v == Verdict::Undetermined { Source::Paper } else { Source::Computed };
    Ok(TableRow {
        q,
        hk: h,
        hh,
        ord2_rp,
        ord2_index: b.total,
        verdict: v,
        provenance: RowProvenance {
            hk: Source::Computed,
            hh: Source::Ingested,
            ord2_rp: rp_source,
            ord2_index: Source::Computed,
            verdict: verdict_source,
        },
        note,
    })
}

/// A row that could not be produced, kept alongside the successful ones.
#[derive(Clone, Debug, Serialize)]
pub struct RowFailure {
    pub q: u64,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub q_max: u64,
    pub mode: Mode,
    pub rows: Vec<TableRow>,
    pub failures: Vec<RowFailure>,
    pub computed: Vec<ComputedRegulator>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }
}

enum RowOutcome {
    Row(TableRow, Option<ComputedRegulator>),
    Failed(RowFailure),
}

fn build_row(q: u64, mode: Mode, opts: &PipelineOptions) -> Result<(TableRow, Option<ComputedRegulator>), PipelineError> {
    let compute = match mode {
        Mode::Ingested => false,
        Mode::Computed => true,
        Mode::Hybrid => COMPUTED_PRIMES.contains(&q),
    };
    let hh = 1;
    if compute {
        let c = computed_regulator(q, opts)?;
        Ok((row_from(q, hh, c.ord2_rp, Source::Computed)?, Some(c)))
    } else {
        let p = published_row(q)?;
        Ok((row_from(q, hh, p.ord2_rp, Source::Paper)?, None))
    }
}

/// All primes `q = 7 mod 8` up to `q_max`, in order. Rows are independent; a failing row is
/// recorded in `failures` and the rest of the table is still produced.
pub fn build_table(q_max: u64, mode: Mode, opts: &PipelineOptions) -> Table {
    let qs = cm::admissible_primes(q_max);
    let width = opts.threads.max(1);
    let mut outcomes: Vec<Option<RowOutcome>> = (0..qs.len()).map(|_| None).collect();
    for (chunk_q, chunk_out) in qs.chunks(width).zip(outcomes.chunks_mut(width)) {
        std::thread::scope(|s| {
            for (&q, slot) in chunk_q.iter().zip(chunk_out.iter_mut()) {
                s.spawn(move || {
                    *slot = Some(match build_row(q, mode, opts) {
                        Ok((row, c)) => RowOutcome::Row(row, c),
                        Err(e) => RowOutcome::Failed(RowFailure { q, error: e.to_string() }),
                    });
                });
            }
        });
    }
    let mut table = Table { q_max, mode, rows: Vec::new(), failures: Vec::new(), computed: Vec::new() };
    for o in outcomes.into_iter().flatten() {
        match o {
            RowOutcome::Row(r, c) => {
                table.rows.push(r);
                table.computed.extend(c);
            }
            RowOutcome::Failed(f) => table.failures.push(f),
        }
    }
    table
}

/// Rows of `table` that differ from the published ones in `q, hK, hH, ord2_Rp, ord2_index`.
pub fn published_mismatches(table: &Table) -> Result<Vec<u64>, PipelineError> {
    let published = published_table()?;
    let mut bad = Vec::new();
    for r in &table.rows {
        let ok = published
            .iter()
            .find(|p| p.q == r.q)
            .map_or(false, |p| p.hk == r.hk && p.hh == r.hh && p.ord2_rp == r.ord2_rp && p.ord2_index == r.ord2_index);
        if !ok {
            bad.push(r.q);
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(q: u64, rp: i64) -> i64 {
        index_ord(&IndexInput { q, hh: 1, ord2_rp: rp, n: 0, ord2_sqrt_disc: 0 }).unwrap().total
    }

    #[test]
    fn euler_factor_examples() {
        assert_eq!(euler_factor_ord(1, 1).unwrap(), -1);
        assert_eq!(euler_factor_ord(3, 3).unwrap(), -3);
        assert!(matches!(euler_factor_ord(3, 2), Err(PipelineError::ResidueDegree { h: 3, f: 2 })));
    }

    #[test]
    fn euler_factor_matches_direct_product() {
        for f in [1usize, 3, 7, 21] {
            let p = EulerProduct::new(21, f);
            assert_eq!(euler_factor_ord(21, f).unwrap(), p.ord2());
        }
    }

    struct EulerProduct {
        num: num_bigint::BigInt,
        den: num_bigint::BigInt,
    }

    impl EulerProduct {
        fn new(h: usize, f: usize) -> Self {
            let two_f = num_bigint::BigInt::from(1) << f;
            let mut num = num_bigint::BigInt::from(1);
            let mut den = num_bigint::BigInt::from(1);
            for _ in 0..h / f {
                num *= &two_f - 1;
                den *= &two_f;
            }
            EulerProduct { num, den }
        }

        fn ord2(&self) -> i64 {
            let v = |x: &num_bigint::BigInt| x.trailing_zeros().unwrap_or(0) as i64;
            v(&self.num) - v(&self.den)
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(idx(23, 2), 0);
        assert_eq!(idx(431, 25), 5);
        assert_eq!(idx(7, 0), 0);
        let b = index_ord(&IndexInput { q: 431, hh: 1, ord2_rp: 25, n: 0, ord2_sqrt_disc: 0 }).unwrap();
        assert_eq!((b.h, b.ord2_euler_factor, b.ord2_roots_of_unity, b.constant), (21, -21, -1, 2));
        assert!(matches!(
            index_ord(&IndexInput { q: 23, hh: 1, ord2_rp: 0, n: 0, ord2_sqrt_disc: 0 }),
            Err(PipelineError::NegativeIndex(-2))
        ));
        assert_eq!(index_ord(&IndexInput { q: 23, hh: 1, ord2_rp: 2, n: 3, ord2_sqrt_disc: 1 }).unwrap().total, 2);
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(1, 0).0, Verdict::XZero);
        let (v, note) = verdict(1, 5);
        assert_eq!(v, Verdict::Undetermined);
        assert_eq!(note.as_deref(), Some(UNDETERMINED_NOTE));
        assert_eq!(verdict(2, 3).0, Verdict::XNonzeroInfinite);
    }

    #[test]
    fn lemma51_applicability() {
        assert!(lemma51_note(7).unwrap().applicable);
        assert_eq!(lemma51_note(23).unwrap().h, 3);
        assert!(matches!(lemma51_note(2), Err(PipelineError::NotSplit(2))));
    }

    #[test]
    fn published_rows_satisfy_the_index_identity() {
        let rows = published_table().unwrap();
        assert_eq!(rows.len(), 25);
        for r in &rows {
            assert_eq!(r.ord2_index, r.ord2_rp - r.hk as i64 + 1, "q = {}", r.q);
        }
        let deviating: Vec<u64> = rows.iter().filter(|r| r.ord2_rp != r.hk as i64 - 1).map(|r| r.q).collect();
        assert_eq!(deviating, vec![431]);
    }

    #[test]
    fn ingested_table_reproduces_the_published_rows() {
        let t = build_table(500, Mode::Ingested, &PipelineOptions::default());
        assert!(t.failures.is_empty(), "{:?}", t.failures);
        assert_eq!(t.rows.len(), 25);
        assert!(published_mismatches(&t).unwrap().is_empty());
        let r431 = t.rows.iter().find(|r| r.q == 431).unwrap();
        assert_eq!((r431.ord2_index, r431.verdict, r431.provenance.verdict), (5, Verdict::Undetermined, Source::Paper));
        assert!(t.rows.iter().filter(|r| r.q != 431).all(|r| r.verdict == Verdict::XZero));
        assert!(t.to_csv().starts_with(CSV_HEADER));
    }

    #[test]
    fn small_bounds() {
        assert!(build_table(6, Mode::Ingested, &PipelineOptions::default()).rows.is_empty());
        let t = build_table(7, Mode::Computed, &PipelineOptions::default());
        assert_eq!(t.rows.len(), 1);
        assert_eq!((t.rows[0].ord2_rp, t.rows[0].ord2_index), (0, 0));
    }

    #[test]
    fn computed_rows_beyond_desk_scale_fail_in_isolation() {
        let t = build_table(47, Mode::Computed, &PipelineOptions { search_effort: 1, ..Default::default() });
        assert_eq!(t.failures.len(), 1);
        assert_eq!(t.failures[0].q, 47);
        assert_eq!(t.rows.iter().map(|r| r.q).collect::<Vec<_>>(), vec![7, 23, 31]);
        assert_eq!(t.rows.iter().map(|r| (r.ord2_rp, r.ord2_index)).collect::<Vec<_>>(), vec![(0, 0), (2, 0), (2, 0)]);
        assert!(t.rows.iter().all(|r| r.verdict == Verdict::XZero && r.provenance.ord2_rp == Source::Computed));
        assert!(published_mismatches(&t).unwrap().is_empty());
        assert_eq!(t.computed[1].reference_index.map(|k| k % 2), Some(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn euler_factor_is_independent_of_residue_degree(h in 1usize..60) {
            for f in (1..=h).filter(|f| h % f == 0) {
                prop_assert_eq!(euler_factor_ord(h, f).unwrap(), -(h as i64));
            }
        }

        #[test]
        fn index_shifts_with_regulator(rp in 2i64..40, n in 0u32..5) {
            let a = index_ord(&IndexInput { q: 23, hh: 1, ord2_rp: rp, n, ord2_sqrt_disc: 0 }).unwrap().total;
            let b = index_ord(&IndexInput { q: 23, hh: 1, ord2_rp: rp + 1, n, ord2_sqrt_disc: 0 }).unwrap().total;
            prop_assert_eq!(b, a + 1);
        }
    }
}
