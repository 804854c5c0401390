//! The 2-adic regulator of a unit system, over the embeddings above the prime `p` of `K`.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use super::local::{hensel_roots, Local2, LocalError};
use super::q2::Q2;
use crate::nf::{FieldElem, NfError, NumberField, TwoAdicSplitting};

#[derive(Debug, Error)]
pub enum RegulatorError {
    #[error("expected {expected} units, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("found {got} embeddings above p, expected {expected}")]
    MissingEmbeddings { expected: usize, got: usize },
    #[error("determinant vanishes to precision 2^{0}; increase the precision")]
    Precision(u32),
    #[error("unit {0} is not a unit at an embedding above p")]
    NotAUnit(usize),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Field(#[from] NfError),
}

/// A root of a `p`-block factor in the completion attached to the first such factor.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub factor: usize,
    pub root: usize,
    pub image: Local2,
}

impl Embedding {
    pub fn label(&self) -> String {
        format!("g{}.{}", self.factor, self.root)
    }
}

#[derive(Clone, Debug)]
pub struct RegulatorResult {
    /// Rows are units, columns the embeddings in `labels` order (all `h` of them).
    pub log_matrix: Vec<Vec<Local2>>,
    pub det: Local2,
    pub ord2: u32,
    pub dropped: usize,
    pub labels: Vec<String>,
    pub prec: u32,
}

/// Serializable digest of a regulator computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegulatorSummary {
    pub ord2: u32,
    pub det_mod: String,
    pub det_prec: u32,
    pub dropped: String,
    pub labels: Vec<String>,
}

impl RegulatorResult {
    pub fn summary(&self) -> RegulatorSummary {
        RegulatorSummary {
            ord2: self.ord2,
            det_mod: self.det.coords()[0].to_string(),
            det_prec: self.det.prec(),
            dropped: self.labels.get(self.dropped).cloned().unwrap_or_default(),
            labels: self.labels.clone(),
        }
    }

    /// The determinant as a 2-adic number, when it lies in `Z_2`.
    pub fn det_q2(&self) -> Option<Q2> {
        self.det.is_rational().then(|| Q2::from_int(&self.det.coords()[0], self.det.prec() as i64))
    }
}

/// The `h` embeddings of the field above `p`, each factor's roots listed in residue order.
pub fn p_embeddings(nf: &NumberField, split: &TwoAdicSplitting, prec: u32) -> Result<Vec<Embedding>, RegulatorError> {
    let ring = split.p_ring(prec + 80)?;
    let mut out = Vec::new();
    for (factor, g) in split.p_block().into_iter().enumerate() {
        for (root, image) in hensel_roots(&g.lift, &ring, prec)?.into_iter().enumerate() {
            out.push(Embedding { factor, root, image });
        }
    }
    if out.len() != nf.h() {
        return Err(RegulatorError::MissingEmbeddings { expected: nf.h(), got: out.len() });
    }
    Ok(out)
}

/// `log_2` of every unit at every embedding.
pub fn log_matrix(units: &[FieldElem], embs: &[Embedding]) -> Result<Vec<Vec<Local2>>, RegulatorError> {
    units
        .iter()
        .enumerate()
        .map(|(i, u)| {
            embs.iter()
                .map(|e| {
                    let x = Local2::eval_qpoly(u.coords(), &e.image)?;
                    x.log().map_err(|_| RegulatorError::NotAUnit(i))
                })
                .collect()
        })
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<Local2>]) -> Option<Local2> {
    let n = m.len();
    match n {
        0 => None,
        1 => Some(m[0][0].clone()),
        _ => {
            let mut acc: Option<Local2> = None;
            for c in 0..n {
                let minor: Vec<Vec<Local2>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect()).collect();
                let term = m[0][c].mul(&det(&minor)?);
                acc = Some(match acc {
                    None => term,
                    Some(a) if c % 2 == 0 => a.add(&term),
                    Some(a) => a.sub(&term),
                });
            }
            acc
        }
    }
}

/// Determinant of the square matrix formed by the columns in `order` with `dropped` removed.
pub fn regulator_from_logs(
    logs: &[Vec<Local2>],
    labels: &[String],
    order: &[usize],
    dropped: usize,
    prec: u32,
    one: &Local2,
) -> Result<RegulatorResult, RegulatorError> {
    let cols: Vec<usize> = order.iter().copied().filter(|&c| c != dropped).collect();
    let sq: Vec<Vec<Local2>> = logs.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
    let d = det(&sq).unwrap_or_else(|| one.clone());
    let ord2 = d.valuation().ok_or(RegulatorError::Precision(d.prec()))?;
    Ok(RegulatorResult {
        log_matrix: logs.to_vec(),
        det: d,
        ord2,
        dropped,
        labels: order.iter().map(|&c| labels[c].clone()).collect(),
        prec,
    })
}

/// Regulator with the natural embedding order, dropping the last embedding.
pub fn regulator_2adic(
    nf: &NumberField,
    split: &TwoAdicSplitting,
    units: &[FieldElem],
    prec: u32,
) -> Result<RegulatorResult, RegulatorError> {
    let r = nf.h() - 1;
    if units.len() != r {
        return Err(RegulatorError::WrongCount { expected: r, got: units.len() });
    }
    let embs = p_embeddings(nf, split, prec)?;
    let labels: Vec<String> = embs.iter().map(Embedding::label).collect();
    let logs = log_matrix(units, &embs)?;
    let order: Vec<usize> = (0..embs.len()).collect();
    let one = Local2::one(embs[0].image.ring()).at_prec(prec);
    regulator_from_logs(&logs, &labels, &order, embs.len() - 1, prec, &one)
}

/// `ord_2` of the determinant for every choice of dropped embedding, in natural order.
pub fn ord2_over_drops(res: &RegulatorResult) -> Result<Vec<u32>, RegulatorError> {
    let h = res.labels.len();
    let order: Vec<usize> = (0..h).collect();
    let one = res.det.ring().clone();
    let one = Local2::one(&one).at_prec(res.prec);
    (0..h)
        .map(|d| regulator_from_logs(&res.log_matrix, &res.labels, &order, d, res.prec, &one).map(|x| x.ord2))
        .collect()
}

/// Residue of `x` modulo `2^bits` as a nonnegative integer, for elements of `Z_2`.
pub fn rational_digits(x: &Local2, bits: u32) -> Option<BigInt> {
    if !x.is_rational() || x.prec() < bits {
        return None;
    }
    let m = BigInt::from(1) << bits;
    Some(((x.coords()[0].clone() % &m) + &m) % &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nf::split_2;
    use crate::units::{parse_units, Q23_UNITS};

    fn published_value() -> BigInt {
        [2u32, 4, 6, 7, 8, 9, 10, 13, 17, 20].iter().map(|&e| BigInt::from(1) << e).sum()
    }

    #[test]
    fn q23_published_units_have_ord_two_and_published_digits() {
        let (nf, set) = parse_units(Q23_UNITS, "q23", None).unwrap();
        let split = split_2(&nf, 160).unwrap();
        let res = regulator_2adic(&nf, &split, &set.units, 128).unwrap();
        assert_eq!(res.ord2, 2);
        for row in &res.log_matrix {
            let s = row.iter().skip(1).fold(row[0].clone(), |a, b| a.add(b));
            assert!(s.is_zero(), "row sum {s:?}");
        }
        assert_eq!(ord2_over_drops(&res).unwrap(), vec![2, 2, 2]);
        let m = BigInt::from(1) << 23u32;
        let v = published_value();
        let d = rational_digits(&res.det, 23).unwrap();
        assert!(d == v || d == (&m - &v) % &m, "det mod 2^23 = {d}");
    }

    #[test]
    fn empty_regulator_for_class_number_one() {
        let nf = crate::nf::build_h(&crate::cm::hilbert_class_poly_default(7).unwrap()).unwrap();
        let split = split_2(&nf, 64).unwrap();
        let res = regulator_2adic(&nf, &split, &[], 64).unwrap();
        assert_eq!(res.ord2, 0);
        assert!(res.det.sub(&Local2::one(res.det.ring()).at_prec(64)).is_zero());
    }
}
