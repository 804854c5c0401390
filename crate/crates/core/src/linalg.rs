//! Exact integer and rational matrix routines: Hermite normal form, kernels mod p, solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;

/// Row-style Hermite normal form of the lattice spanned by `rows`, together with a unimodular
/// transform `u` such that `u * rows` equals the returned matrix padded with zero rows.
/// The nonzero rows are returned first, in echelon form with positive pivots reduced above.
pub fn hnf_with_transform(rows: &IMat) -> (IMat, IMat) {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a = rows.clone();
    let mut u: IMat = (0..m).map(|i| (0..m).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let piv = match piv {
                Some(p) => p,
                None => break,
            };
            a.swap(r, piv);
            u.swap(r, piv);
            let mut done = true;
            for i in r + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for k in 0..n {
                    let t = &q * &a[r][k];
                    a[i][k] -= t;
                }
                for k in 0..m {
                    let t = &q * &u[r][k];
                    u[i][k] -= t;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for k in 0..n {
                    a[r][k] = -a[r][k].clone();
                }
                for k in 0..m {
                    u[r][k] = -u[r][k].clone();
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                if q.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = &q * &a[r][k];
                    a[i][k] -= t;
                }
                for k in 0..m {
                    let t = &q * &u[r][k];
                    u[i][k] -= t;
                }
            }
            r += 1;
        }
    }
    (a, u)
}

/// Nonzero rows of the Hermite normal form.
pub fn hnf(rows: &IMat) -> IMat {
    let (a, _) = hnf_with_transform(rows);
    a.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Basis of the right kernel `{x : a x = 0}` over the field with `p` elements.
pub fn kernel_mod_p(a: &IMat, ncols: usize, p: &BigInt) -> IMat {
    let mut m: IMat = a.iter().map(|r| r.iter().map(|x| x.mod_floor(p)).collect()).collect();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let piv = (r..rows).find(|&i| !m[i][c].is_zero());
        let piv = match piv {
            Some(x) => x,
            None => continue,
        };
        m.swap(r, piv);
        let inv = m[r][c].modpow(&(p - 2u32), p);
        for k in 0..ncols {
            m[r][k] = (&m[r][k] * &inv).mod_floor(p);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..ncols {
                    let t = &f * &m[r][k];
                    m[i][k] = (&m[i][k] - t).mod_floor(p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigInt::zero(); ncols];
            v[fc] = BigInt::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (-&m[i][fc]).mod_floor(p);
            }
            v
        })
        .collect()
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn inverse_q(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, piv);
        let inv = BigRational::one() / &m[c][c];
        for k in 0..2 * n {
            m[c][k] = &m[c][k] * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..2 * n {
                    let t = &f * &m[c][k];
                    m[i][k] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det_q(a: &QMat) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let piv = match (c..n).find(|&i| !m[i][c].is_zero()) {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if piv != c {
            m.swap(c, piv);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[i][k] -= t;
            }
        }
    }
    det
}

/// Row vector times matrix.
pub fn vec_mul_q(v: &[BigRational], a: &QMat) -> Vec<BigRational> {
    let n = a[0].len();
    (0..n).map(|j| v.iter().zip(a).map(|(x, row)| x * &row[j]).sum()).collect()
}

pub fn to_qmat(a: &IMat) -> QMat {
    a.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imat(a: &[&[i64]]) -> IMat {
        a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = imat(&[&[4, 6, 2], &[2, 3, 5], &[6, 10, 7], &[0, 0, 4]]);
        let (h, u) = hnf_with_transform(&a);
        for i in 0..a.len() {
            for j in 0..3 {
                let s: BigInt = (0..a.len()).map(|k| &u[i][k] * &a[k][j]).sum();
                assert_eq!(s, h[i][j]);
            }
        }
        let det_u = det_q(&to_qmat(&u));
        assert!(det_u.abs().is_one());
        let nz = hnf(&a);
        assert_eq!(nz.len(), 3);
        assert_eq!(nz[0][0], BigInt::from(2));
    }

    #[test]
    fn kernel_mod_small_prime() {
        let a = imat(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel_mod_p(&a, 3, &BigInt::from(7));
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = (0..3).map(|j| &a[0][j] * &v[j]).sum();
            assert!((s % BigInt::from(7)).is_zero());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = to_qmat(&imat(&[&[2, 1], &[7, 4]]));
        let b = inverse_q(&a).unwrap();
        assert_eq!(vec_mul_q(&[BigRational::one(), BigRational::zero()], &b).len(), 2);
        assert_eq!(det_q(&b), BigRational::one());
    }
}
