//! LLL reduction driven by a positive definite Gram matrix in multiprecision floating point.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rug::Float;

use crate::bigcomplex::integer_to_bigint;
use crate::linalg::IMat;

fn gram_of(g: &[Vec<Float>], u: &IMat, prec: u32) -> Vec<Vec<Float>> {
    let n = u.len();
    let uf: Vec<Vec<Float>> =
        u.iter().map(|r| r.iter().map(|x| Float::with_val(prec, crate::bigcomplex::bigint_to_integer(x))).collect()).collect();
    let mut tmp = vec![vec![Float::new(prec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Float::new(prec);
            for k in 0..n {
                if uf[i][k].is_zero() {
                    continue;
                }
                s += Float::with_val(prec, &uf[i][k] * &g[k][j]);
            }
            tmp[i][j] = s;
        }
    }
    let mut out = vec![vec![Float::new(prec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Float::new(prec);
            for k in 0..n {
                if uf[j][k].is_zero() {
                    continue;
                }
                s += Float::with_val(prec, &tmp[i][k] * &uf[j][k]);
            }
            out[i][j] = s;
        }
    }
    out
}

fn gram_schmidt(g: &[Vec<Float>], prec: u32) -> (Vec<Vec<Float>>, Vec<Float>) {
    let n = g.len();
    let mut mu = vec![vec![Float::new(prec); n]; n];
    let mut bstar = vec![Float::new(prec); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= Float::with_val(prec, &mu[j][k] * &mu[i][k]) * &bstar[k];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            s -= Float::with_val(prec, &mu[i][k] * &mu[i][k]) * &bstar[k];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

/// Unimodular `u` such that the rows of `u` applied to the basis with Gram matrix `g`
/// form an LLL-reduced basis (parameter `delta`). `None` when the precision of `g` is too low
/// for the reduction to terminate.
pub fn lll_gram(g: &[Vec<Float>], delta: f64) -> Option<IMat> {
    let n = g.len();
    let prec = g[0][0].prec();
    let mut u: IMat = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    if n <= 1 {
        return Some(u);
    }
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 50_000 {
            return None;
        }
        let cur = gram_of(g, &u, prec);
        let (mu, bstar) = gram_schmidt(&cur, prec);
        let q = mu[k][k - 1].clone().round();
        if !q.is_zero() {
            let qi = integer_to_bigint(&q.to_integer().unwrap());
            let row = u[k - 1].clone();
            for (a, b) in u[k].iter_mut().zip(row) {
                *a -= &qi * b;
            }
            continue;
        }
        let lhs = bstar[k].clone();
        let mu2 = Float::with_val(prec, &mu[k][k - 1] * &mu[k][k - 1]);
        let rhs = Float::with_val(prec, delta - mu2) * &bstar[k - 1];
        if lhs < rhs {
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            for j in (0..k - 1).rev() {
                let cur = gram_of(g, &u, prec);
                let (mu, _) = gram_schmidt(&cur, prec);
                let q = mu[k][j].clone().round();
                if !q.is_zero() {
                    let qi = integer_to_bigint(&q.to_integer().unwrap());
                    let row = u[j].clone();
                    for (a, b) in u[k].iter_mut().zip(row) {
                        *a -= &qi * b;
                    }
                }
            }
            k += 1;
        }
    }
    Some(u)
}

/// Squared lengths of the rows of `u` under `g`.
pub fn row_norms(g: &[Vec<Float>], u: &IMat) -> Vec<Float> {
    let prec = g[0][0].prec();
    let cur = gram_of(g, u, prec);
    (0..u.len()).map(|i| cur[i][i].clone()).collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_lattice() {
        let prec = 128;
        let b = [[1.0f64, 0.0, 0.0], [1000.0, 1.0, 0.0], [3127.0, 17.0, 1.0]];
        let g: Vec<Vec<Float>> = (0..3)
            .map(|i| (0..3).map(|j| Float::with_val(prec, (0..3).map(|k| b[i][k] * b[j][k]).sum::<f64>())).collect())
            .collect();
        let u = lll_gram(&g, 0.99).unwrap();
        let norms = row_norms(&g, &u);
        for x in norms {
            assert!(x.to_f64() < 2.5);
        }
        let det = crate::linalg::det_q(&crate::linalg::to_qmat(&u));
        assert!(num_traits::Signed::abs(&det).is_one());
    }
}
