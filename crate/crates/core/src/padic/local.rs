//! Unramified extensions of the 2-adic integers, presented as `Z_2[x]/(P(x))` for a monic
//! lift `P` of an irreducible polynomial over the field with two elements.

use std::cmp::min;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::q2::{inv_odd_mod, pow2, v2};
use crate::poly::{Gf2Poly, ZPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("modulus is not irreducible mod 2")]
    ReducibleModulus,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("no simple root mod 2 to lift")]
    NoSimpleRoot,
    #[error("rational with even denominator has no image in the 2-adic integers")]
    EvenDenominator,
    #[error("residue field of degree {0} is too large for root enumeration")]
    ResidueFieldTooLarge(usize),
}

/// The ring `Z_2[beta]/(P)` together with its working precision cap.
#[derive(Debug)]
pub struct Local2Ring {
    modulus: ZPoly,
    residue: Gf2Poly,
    f: usize,
    cap: u32,
    frob_beta: Vec<BigInt>,
}

/// Element `sum c_i beta^i + O(2^prec)`.
#[derive(Clone)]
pub struct Local2 {
    ring: Arc<Local2Ring>,
    coords: Vec<BigInt>,
    prec: u32,
}

impl fmt::Debug for Local2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Local2({:?} + O(2^{}))", self.coords, self.prec)
    }
}

impl Local2Ring {
    /// `modulus` must be monic with irreducible reduction mod 2.
    pub fn new(modulus: &[BigInt], cap: u32) -> Result<Arc<Local2Ring>, LocalError> {
        let residue = Gf2Poly::from_zpoly(modulus);
        let f = modulus.len() - 1;
        if residue.degree() != Some(f) || residue.factor_squarefree_checked().map_or(true, |v| v.len() != 1) {
            return Err(LocalError::ReducibleModulus);
        }
        let m = pow2(cap as i64);
        let modulus: ZPoly = modulus.iter().map(|c| c.mod_floor(&m)).collect();
        let mut ring = Local2Ring { modulus, residue, f, cap, frob_beta: Vec::new() };
        ring.frob_beta = vec![BigInt::zero(); f];
        let ring = Arc::new(ring);
        let fb = {
            let beta = Local2::beta(&ring);
            let seed = beta.mul(&beta);
            hensel_root_from(&ring.modulus, &seed, cap)?.coords
        };
        let mut ring = Arc::try_unwrap(ring).expect("ring has a single owner during construction");
        ring.frob_beta = fb;
        Ok(Arc::new(ring))
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn modulus(&self) -> &ZPoly {
        &self.modulus
    }

    pub fn residue_modulus(&self) -> Gf2Poly {
        self.residue
    }
}

impl Gf2Poly {
    fn factor_squarefree_checked(self) -> Option<Vec<Gf2Poly>> {
        if self.is_squarefree() {
            Some(self.factor_squarefree())
        } else {
            None
        }
    }
}

impl Local2 {
    fn reduce(ring: &Arc<Local2Ring>, mut c: Vec<BigInt>, prec: u32) -> Local2 {
        let prec = min(prec, ring.cap);
        let m = pow2(prec as i64);
        let f = ring.f;
        let lead = c.len();
        if lead > f {
            for d in (f..lead).rev() {
                let top = std::mem::take(&mut c[d]);
                if top.is_zero() {
                    continue;
                }
                for i in 0..f {
                    let t = &top * &ring.modulus[i];
                    c[d - f + i] -= t;
                }
            }
            c.truncate(f);
        }
        c.resize(f, BigInt::zero());
        for x in c.iter_mut() {
            *x = x.mod_floor(&m);
        }
        Local2 { ring: ring.clone(), coords: c, prec }
    }

    pub fn new(ring: &Arc<Local2Ring>, coords: Vec<BigInt>, prec: u32) -> Local2 {
        Local2::reduce(ring, coords, prec)
    }

    pub fn zero(ring: &Arc<Local2Ring>) -> Local2 {
        Local2::reduce(ring, vec![], ring.cap)
    }

    pub fn from_int(ring: &Arc<Local2Ring>, n: &BigInt) -> Local2 {
        Local2::reduce(ring, vec![n.clone()], ring.cap)
    }

    pub fn one(ring: &Arc<Local2Ring>) -> Local2 {
        Local2::from_int(ring, &BigInt::one())
    }

    pub fn beta(ring: &Arc<Local2Ring>) -> Local2 {
        if ring.f == 1 {
            return Local2::reduce(ring, vec![-ring.modulus[0].clone()], ring.cap);
        }
        Local2::reduce(ring, vec![BigInt::zero(), BigInt::one()], ring.cap)
    }

    pub fn from_rational(ring: &Arc<Local2Ring>, r: &BigRational) -> Result<Local2, LocalError> {
        if r.denom().is_even() {
            return Err(LocalError::EvenDenominator);
        }
        let inv = inv_odd_mod(r.denom(), ring.cap as i64);
        Ok(Local2::from_int(ring, &(r.numer() * inv)))
    }

    pub fn ring(&self) -> &Arc<Local2Ring> {
        &self.ring
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Reinterpret the stored representative at a different precision (a lift when raising).
    pub fn at_prec(&self, prec: u32) -> Local2 {
        Local2::reduce(&self.ring, self.coords.clone(), prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Valuation, `None` if zero at the carried precision.
    pub fn valuation(&self) -> Option<u32> {
        self.coords.iter().filter_map(v2).min().map(|v| v as u32)
    }

    fn val_lb(&self) -> u32 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn residue(&self) -> Gf2Poly {
        Gf2Poly::from_zpoly(&self.coords)
    }

    pub fn from_residue(ring: &Arc<Local2Ring>, r: Gf2Poly) -> Local2 {
        Local2::reduce(ring, r.to_zpoly(), ring.cap)
    }

    pub fn add(&self, o: &Local2) -> Local2 {
        let c = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        Local2::reduce(&self.ring, c, min(self.prec, o.prec))
    }

    pub fn sub(&self, o: &Local2) -> Local2 {
        let c = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        Local2::reduce(&self.ring, c, min(self.prec, o.prec))
    }

    pub fn neg(&self) -> Local2 {
        let c = self.coords.iter().map(|a| -a).collect();
        Local2::reduce(&self.ring, c, self.prec)
    }

    pub fn mul(&self, o: &Local2) -> Local2 {
        let f = self.ring.f;
        let mut c = vec![BigInt::zero(); 2 * f];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        let prec = min(self.prec + o.val_lb(), o.prec + self.val_lb());
        Local2::reduce(&self.ring, c, prec)
    }

    pub fn mul_int(&self, n: &BigInt) -> Local2 {
        let extra = v2(n).unwrap_or(0) as u32;
        let c = self.coords.iter().map(|a| a * n).collect();
        Local2::reduce(&self.ring, c, self.prec + extra)
    }

    pub fn pow(&self, e: &BigInt) -> Local2 {
        let mut acc = Local2::one(&self.ring).at_prec(self.prec);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = acc.mul(&acc);
            if e.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// Divide by `2^k`, which must divide every coordinate.
    pub fn div_pow2(&self, k: u32) -> Local2 {
        assert!(self.val_lb() >= k, "division by 2^{k} of an element of valuation {}", self.val_lb());
        let c = self.coords.iter().map(|a| a >> (k as usize)).collect();
        Local2::reduce(&self.ring, c, self.prec - k)
    }

    pub fn inv(&self) -> Result<Local2, LocalError> {
        if !self.is_unit() {
            return Err(LocalError::NotAUnit);
        }
        let (s, _, g) = Gf2Poly::ext_gcd(self.residue(), self.ring.residue);
        debug_assert_eq!(g, Gf2Poly::one());
        let mut x = Local2::from_residue(&self.ring, s).at_prec(1);
        let two = Local2::from_int(&self.ring, &BigInt::from(2));
        let mut p = 1u32;
        while p < self.prec {
            p = min(2 * p, self.prec);
            let xl = x.at_prec(p);
            let ax = self.at_prec(p).mul(&xl);
            x = xl.mul(&two.sub(&ax)).at_prec(p);
        }
        Ok(x.at_prec(self.prec))
    }

    pub fn frobenius(&self) -> Local2 {
        let fb = Local2::reduce(&self.ring, self.ring.frob_beta.clone(), self.ring.cap);
        let mut acc = Local2::zero(&self.ring);
        for c in self.coords.iter().rev() {
            acc = acc.mul(&fb).add(&Local2::from_int(&self.ring, c));
        }
        acc.at_prec(self.prec)
    }

    pub fn eval_zpoly(p: &[BigInt], x: &Local2) -> Local2 {
        let mut acc = Local2::zero(&x.ring).at_prec(x.prec);
        for c in p.iter().rev() {
            acc = acc.mul(x).add(&Local2::from_int(&x.ring, c));
        }
        acc
    }

    pub fn eval_qpoly(p: &[BigRational], x: &Local2) -> Result<Local2, LocalError> {
        let mut acc = Local2::zero(&x.ring).at_prec(x.prec);
        for c in p.iter().rev() {
            acc = acc.mul(x).add(&Local2::from_rational(&x.ring, c)?);
        }
        Ok(acc)
    }

    /// Coordinates `1..f` vanish, so the element lies in `Z_2`.
    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(|c| c.is_zero())
    }

    /// 2-adic logarithm of a unit; the result is known to one bit less than the input.
    pub fn log(&self) -> Result<Local2, LocalError> {
        if !self.is_unit() {
            return Err(LocalError::NotAUnit);
        }
        let out_prec = self.prec - 1;
        let guard = 2 * (32 - self.prec.leading_zeros()) + 6;
        let wp = self.prec + guard;
        let ring = &self.ring;
        if wp > ring.cap {
            return log_with_cap(self, out_prec);
        }
        let m = (BigInt::one() << ring.f) - 1u32;
        let v = self.at_prec(wp).pow(&m);
        let w = v.mul(&v);
        let t = w.sub(&Local2::one(ring)).at_prec(wp);
        debug_assert!(t.val_lb() >= 2);
        let vt = t.val_lb() as u64;
        let mut sum = Local2::zero(ring).at_prec(wp);
        let mut tp = t.clone();
        let mut n: u64 = 1;
        while n * vt - (63 - n.leading_zeros() as u64) < wp as u64 {
            let k = n.trailing_zeros();
            let odd = BigInt::from(n >> k);
            let term = tp.div_pow2(k).mul_int(&inv_odd_mod(&odd, wp as i64));
            sum = if n % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
            tp = tp.mul(&t).at_prec(wp);
            n += 1;
        }
        let inv_m = inv_odd_mod(&m, wp as i64);
        let res = sum.mul_int(&inv_m).at_prec(wp).div_pow2(1);
        Ok(res.at_prec(out_prec))
    }
}

fn log_with_cap(x: &Local2, out_prec: u32) -> Result<Local2, LocalError> {
    let bigger = Local2Ring::new(&x.ring.modulus, x.prec + 2 * 32 + 8)?;
    let y = Local2::reduce(&bigger, x.coords.clone(), x.prec);
    let l = y.log()?;
    Ok(Local2::reduce(&x.ring, l.coords, out_prec))
}

/// Newton iteration for a simple root of `p` congruent to `seed` mod 2.
pub fn hensel_root_from(p: &[BigInt], seed: &Local2, prec: u32) -> Result<Local2, LocalError> {
    let ring = seed.ring.clone();
    let dp = crate::poly::derivative_z(p);
    let mut x = Local2::from_residue(&ring, seed.residue()).at_prec(1);
    if !Local2::eval_zpoly(p, &x).at_prec(1).is_zero() {
        return Err(LocalError::NoSimpleRoot);
    }
    if !Local2::eval_zpoly(&dp, &x).at_prec(1).is_unit() {
        return Err(LocalError::NoSimpleRoot);
    }
    let mut cur = 1u32;
    while cur < prec {
        cur = min(2 * cur, prec);
        let xl = x.at_prec(cur);
        let fx = Local2::eval_zpoly(p, &xl);
        let dfx = Local2::eval_zpoly(&dp, &xl).inv()?;
        x = xl.sub(&fx.mul(&dfx)).at_prec(cur);
    }
    Ok(x)
}

/// All roots in the ring of a polynomial whose reduction has only simple roots there.
pub fn hensel_roots(p: &[BigInt], ring: &Arc<Local2Ring>, prec: u32) -> Result<Vec<Local2>, LocalError> {
    let f = ring.f;
    if f > 20 {
        return Err(LocalError::ResidueFieldTooLarge(f));
    }
    let pres = Gf2Poly::from_zpoly(p);
    let mut out = Vec::new();
    for bits in 0u128..(1u128 << f) {
        let r = Gf2Poly(bits);
        let val = eval_gf2(pres, r, ring.residue);
        if val.is_zero() {
            let seed = Local2::from_residue(ring, r);
            out.push(hensel_root_from(p, &seed, prec)?);
        }
    }
    Ok(out)
}

fn eval_gf2(p: Gf2Poly, x: Gf2Poly, m: Gf2Poly) -> Gf2Poly {
    let mut acc = Gf2Poly(0);
    let d = match p.degree() {
        Some(d) => d,
        None => return acc,
    };
    for i in (0..=d).rev() {
        acc = acc.mulmod(x, m).add(Gf2Poly(((p.0 >> i) & 1) as u128));
    }
    acc.rem(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::q2::Q2;
    use crate::poly::zpoly;

    #[test]
    fn inverse_and_frobenius() {
        let ring = Local2Ring::new(&zpoly(&[1, 1, 0, 1]), 60).unwrap();
        let b = Local2::beta(&ring);
        let x = b.add(&Local2::one(&ring));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).sub(&Local2::one(&ring)).is_zero());
        let fb = b.frobenius();
        assert!(Local2::eval_zpoly(ring.modulus(), &fb).is_zero());
        let mut z = b.clone();
        for _ in 0..3 {
            z = z.frobenius();
        }
        assert!(z.sub(&b).is_zero());
        assert!(fb.sub(&b.mul(&b)).valuation().unwrap() >= 1);
    }

    #[test]
    fn roots_of_modulus_form_frobenius_orbit() {
        let ring = Local2Ring::new(&zpoly(&[1, 1, 0, 1]), 40).unwrap();
        let roots = hensel_roots(ring.modulus(), &ring, 40).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(Local2::eval_zpoly(ring.modulus(), r).is_zero());
        }
    }

    #[test]
    fn log_of_rational_unit_matches_series_in_q2() {
        let ring = Local2Ring::new(&zpoly(&[0, 1]), 80).unwrap();
        let five = Local2::from_int(&ring, &BigInt::from(5)).at_prec(40);
        let l = five.log().unwrap();
        assert_eq!(l.prec(), 39);
        let direct = crate::padic::q2::log_q2(&Q2::from_i64(5, 40));
        let diff = &Q2::from_int(&l.coords()[0], 39) - &direct;
        assert!(diff.is_zero(), "{diff:?}");
    }

    #[test]
    fn log_is_additive() {
        let ring = Local2Ring::new(&zpoly(&[1, 1, 1]), 120).unwrap();
        let b = Local2::beta(&ring);
        let x = b.add(&Local2::from_int(&ring, &BigInt::from(2))).at_prec(50);
        let y = b.mul(&b).add(&Local2::from_int(&ring, &BigInt::from(4))).at_prec(50);
        let lhs = x.mul(&y).log().unwrap();
        let rhs = x.log().unwrap().add(&y.log().unwrap());
        assert!(lhs.sub(&rhs).is_zero());
        assert!(!x.log().unwrap().is_zero());
    }

    #[test]
    fn log_kills_roots_of_unity() {
        let ring = Local2Ring::new(&zpoly(&[1, 1, 1]), 80).unwrap();
        let b = Local2::beta(&ring).at_prec(40);
        assert!(b.log().unwrap().is_zero());
        let m1 = Local2::from_int(&ring, &BigInt::from(-1)).at_prec(40);
        assert!(m1.log().unwrap().is_zero());
    }
}
