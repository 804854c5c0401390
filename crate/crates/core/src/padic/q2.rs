//! Elements of the 2-adic numbers carried with an explicit absolute precision.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `unit * 2^val + O(2^prec)`, with `unit` odd and reduced modulo `2^(prec - val)`.
/// The zero element at precision `prec` is stored with `unit = 0` and `val = prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct Q2 {
    unit: BigInt,
    val: i64,
    prec: i64,
}

pub fn pow2(e: i64) -> BigInt {
    assert!(e >= 0, "negative power of two");
    BigInt::one() << (e as usize)
}

pub fn v2(n: &BigInt) -> Option<i64> {
    n.trailing_zeros().map(|t| t as i64)
}

/// Inverse of an odd integer modulo `2^e`.
pub fn inv_odd_mod(a: &BigInt, e: i64) -> BigInt {
    let m = pow2(e);
    let a = a.mod_floor(&m);
    let g = a.extended_gcd(&m);
    assert!(g.gcd.is_one(), "inverse of an even number mod a power of two");
    g.x.mod_floor(&m)
}

impl fmt::Debug for Q2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_zero() {
            write!(f, "O(2^{})", self.prec)
        } else {
            write!(f, "{}*2^{} + O(2^{})", self.unit, self.val, self.prec)
        }
    }
}

impl Q2 {
    fn normalize(num: BigInt, exp: i64, prec: i64) -> Q2 {
        if prec <= exp || num.is_zero() {
            return Q2::zero(prec);
        }
        let t = v2(&num).unwrap();
        let val = exp + t;
        if val >= prec {
            return Q2::zero(prec);
        }
        let unit = (num >> (t as usize)).mod_floor(&pow2(prec - val));
        Q2 { unit, val, prec }
    }

    pub fn zero(prec: i64) -> Q2 {
        Q2 { unit: BigInt::zero(), val: prec, prec }
    }

    pub fn one(prec: i64) -> Q2 {
        Q2::from_int(&BigInt::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: i64) -> Q2 {
        Q2::normalize(n.clone(), 0, prec)
    }

    pub fn from_i64(n: i64, prec: i64) -> Q2 {
        Q2::from_int(&BigInt::from(n), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: i64) -> Q2 {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Q2::zero(prec);
        }
        let vn = v2(num).unwrap();
        let vd = v2(den).unwrap();
        let val = vn - vd;
        if val >= prec {
            return Q2::zero(prec);
        }
        let rel = prec - val;
        let un = num >> (vn as usize);
        let ud = den >> (vd as usize);
        let unit = (un * inv_odd_mod(&ud, rel)).mod_floor(&pow2(rel));
        Q2 { unit, val, prec }
    }

    pub fn from_rational(r: &BigRational, prec: i64) -> Q2 {
        Q2::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Exact valuation, or `None` when the value is zero at the carried precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound for the valuation (equal to it when nonzero).
    pub fn val_lb(&self) -> i64 {
        self.val
    }

    pub fn unit_part(&self) -> &BigInt {
        &self.unit
    }

    pub fn with_prec(&self, p: i64) -> Q2 {
        let p = min(p, self.prec);
        if self.is_zero() {
            return Q2::zero(p);
        }
        Q2::normalize(self.unit.clone(), self.val, p)
    }

    /// Multiply by `2^k` (`k` may be negative); precision moves with the value.
    pub fn shift(&self, k: i64) -> Q2 {
        Q2 { unit: self.unit.clone(), val: self.val + k, prec: self.prec + k }
    }

    pub fn inv(&self) -> Q2 {
        assert!(!self.is_zero(), "inverse of a 2-adic zero");
        let rel = self.prec - self.val;
        Q2 { unit: inv_odd_mod(&self.unit, rel), val: -self.val, prec: self.prec - 2 * self.val }
    }

    pub fn div(&self, o: &Q2) -> Q2 {
        self * &o.inv()
    }

    /// Integer representative modulo `2^e`, requiring a nonnegative valuation and `e <= prec`.
    pub fn to_int_mod(&self, e: i64) -> BigInt {
        assert!(e <= self.prec, "requested {e} digits but only {} known", self.prec);
        if self.is_zero() {
            return BigInt::zero();
        }
        assert!(self.val >= 0, "element is not 2-integral");
        if self.val >= e {
            return BigInt::zero();
        }
        ((&self.unit << (self.val as usize)) as BigInt).mod_floor(&pow2(e))
    }

    /// Rational value of the stored representative.
    pub fn to_rational(&self) -> BigRational {
        if self.val >= 0 {
            BigRational::from_integer(&self.unit << (self.val as usize))
        } else {
            BigRational::new(self.unit.clone(), pow2(-self.val))
        }
    }

    /// Whether the difference with `o` is zero at the smaller of the two precisions.
    pub fn agrees(&self, o: &Q2) -> bool {
        (self - o).is_zero()
    }

    pub fn pow(&self, e: u64) -> Q2 {
        let mut acc = Q2::one(max(self.prec, 1));
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// Same representative, declared known to precision `p` (a lift when `p` exceeds `prec`).
    pub fn lift_prec(&self, p: i64) -> Q2 {
        if self.is_zero() {
            return Q2::zero(p);
        }
        Q2::normalize(self.unit.clone(), self.val, p)
    }

    /// Binary digits (positions of set bits) of the canonical representative in `[0, 2^prec)`.
    pub fn digits(&self) -> Vec<i64> {
        if self.is_zero() {
            return Vec::new();
        }
        let rel = self.prec - self.val;
        (0..rel).filter(|&i| self.unit.bit(i as u64)).map(|i| i + self.val).collect()
    }

    pub fn to_f64_lossy(&self) -> f64 {
        let r = self.to_rational();
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative_rep(&self) -> bool {
        self.unit.is_negative()
    }
}

impl Add for &Q2 {
    type Output = Q2;
    fn add(self, o: &Q2) -> Q2 {
        let p = min(self.prec, o.prec);
        let e = min(min(self.val, o.val), p);
        let mut num = BigInt::zero();
        if !self.is_zero() {
            num += &self.unit << ((self.val - e) as usize);
        }
        if !o.is_zero() {
            num += &o.unit << ((o.val - e) as usize);
        }
        Q2::normalize(num, e, p)
    }
}

impl Sub for &Q2 {
    type Output = Q2;
    fn sub(self, o: &Q2) -> Q2 {
        self + &(-o)
    }
}

impl Neg for &Q2 {
    type Output = Q2;
    fn neg(self) -> Q2 {
        if self.is_zero() {
            return self.clone();
        }
        Q2::normalize(-self.unit.clone(), self.val, self.prec)
    }
}

impl Mul for &Q2 {
    type Output = Q2;
    fn mul(self, o: &Q2) -> Q2 {
        let p = min(self.prec + o.val, o.prec + self.val);
        Q2::normalize(&self.unit * &o.unit, self.val + o.val, p)
    }
}

impl Add for Q2 {
    type Output = Q2;
    fn add(self, o: Q2) -> Q2 {
        &self + &o
    }
}

impl Sub for Q2 {
    type Output = Q2;
    fn sub(self, o: Q2) -> Q2 {
        &self - &o
    }
}

impl Mul for Q2 {
    type Output = Q2;
    fn mul(self, o: Q2) -> Q2 {
        &self * &o
    }
}

impl Neg for Q2 {
    type Output = Q2;
    fn neg(self) -> Q2 {
        -&self
    }
}

/// 2-adic logarithm of a unit of `Z_2`; one bit of precision is lost.
pub fn log_q2(u: &Q2) -> Q2 {
    assert_eq!(u.valuation(), Some(0), "logarithm of a non-unit");
    let p = u.prec();
    let wp = p + 2 * (64 - (p as u64).leading_zeros() as i64) + 6;
    let u = u.lift_prec(wp);
    let t = &(&u * &u) - &Q2::one(wp);
    let vt = t.val_lb();
    let mut sum = Q2::zero(wp);
    let mut tp = t.clone();
    let mut n: i64 = 1;
    while n * vt - (63 - n.leading_zeros() as i64) < wp {
        let term = tp.div(&Q2::from_i64(n, wp + 64));
        sum = if n % 2 == 1 { &sum + &term } else { &sum - &term };
        tp = &tp * &t;
        n += 1;
    }
    sum.shift(-1).with_prec(p - 1)
}

/// The square root `s` of `-q` in `Z_2` with `s = 3 mod 4`, so that `(1 + s)/2` lies in the prime
/// above 2 singled out by that choice. Requires `q = 7 mod 8`.
pub fn sqrt_neg_q(q: u64, prec: i64) -> Option<Q2> {
    if q % 8 != 7 {
        return None;
    }
    let target = -BigInt::from(q);
    let mut s = BigInt::one();
    for k in 3..=prec + 1 {
        let m = pow2(k + 1);
        if (&s * &s - &target).mod_floor(&m) != BigInt::zero() {
            s += pow2(k - 1);
        }
    }
    let m = pow2(prec + 2);
    if s.mod_floor(&BigInt::from(4)) == BigInt::one() {
        s = (-s).mod_floor(&m);
    }
    Some(Q2::from_int(&s, prec))
}

/// Element of the 2-adic Gaussian integers ring extension `Q2(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q2i {
    pub re: Q2,
    pub im: Q2,
}

impl Q2i {
    pub fn new(re: Q2, im: Q2) -> Self {
        Q2i { re, im }
    }

    pub fn real(re: Q2) -> Self {
        let p = re.prec();
        Q2i { re, im: Q2::zero(p) }
    }

    /// `i^k`
    pub fn i_pow(k: i64, prec: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Q2i::new(Q2::one(prec), Q2::zero(prec)),
            1 => Q2i::new(Q2::zero(prec), Q2::one(prec)),
            2 => Q2i::new(Q2::from_i64(-1, prec), Q2::zero(prec)),
            _ => Q2i::new(Q2::zero(prec), Q2::from_i64(-1, prec)),
        }
    }

    pub fn prec(&self) -> i64 {
        min(self.re.prec(), self.im.prec())
    }

    pub fn add(&self, o: &Q2i) -> Q2i {
        Q2i { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Q2i) -> Q2i {
        Q2i { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Q2i) -> Q2i {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        Q2i { re, im }
    }

    pub fn neg(&self) -> Q2i {
        Q2i { re: -&self.re, im: -&self.im }
    }

    pub fn scale(&self, s: &Q2) -> Q2i {
        Q2i { re: &self.re * s, im: &self.im * s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_roots_of_minus_q() {
        for q in [7u64, 23, 31, 47, 431] {
            let s = sqrt_neg_q(q, 64).unwrap();
            assert!((&s * &s).agrees(&Q2::from_i64(-(q as i64), 64)));
            assert_eq!(s.to_int_mod(2), BigInt::from(3));
        }
        assert!(sqrt_neg_q(3, 10).is_none());
    }

    #[test]
    fn basic_arithmetic() {
        let a = Q2::from_i64(12, 20);
        assert_eq!(a.valuation(), Some(2));
        let b = Q2::from_ratio(&BigInt::from(1), &BigInt::from(3), 20);
        let c = &b * &Q2::from_i64(3, 20);
        assert!(c.agrees(&Q2::one(20)));
        let half = Q2::from_ratio(&BigInt::from(1), &BigInt::from(2), 20);
        assert_eq!(half.valuation(), Some(-1));
        assert_eq!(half.prec(), 20);
        let d = &half * &Q2::from_i64(2, 20);
        assert!(d.agrees(&Q2::one(19)));
    }

    #[test]
    fn precision_tracking_on_division() {
        let x = Q2::from_i64(4, 10);
        let y = x.inv();
        assert_eq!(y.valuation(), Some(-2));
        assert_eq!(y.prec(), 6);
    }

    #[test]
    fn digits_of_negative() {
        let x = Q2::from_i64(-1, 5);
        assert_eq!(x.digits(), vec![0, 1, 2, 3, 4]);
    }

    proptest! {
        #[test]
        fn ring_laws(a in -1000i64..1000, b in -1000i64..1000, c in 1i64..1000) {
            let p = 40;
            let (x, y, z) = (Q2::from_i64(a, p), Q2::from_i64(b, p), Q2::from_i64(c, p));
            prop_assert!((&(&x + &y) * &z).agrees(&(&(&x * &z) + &(&y * &z))));
            let r = Q2::from_ratio(&BigInt::from(a), &BigInt::from(c), p);
            prop_assert!((&r * &z).agrees(&x));
        }
    }
}
