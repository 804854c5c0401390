//! Arbitrary-precision complex numbers on top of MPFR floats.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

/// A complex number whose parts carry the same working precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(0.0, 1.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        BigComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex { re, im: Float::new(prec) }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, n), im: Float::new(prec) }
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, bigint_to_integer(n)), im: Float::new(prec) }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        let mut re = Float::with_val(prec, bigint_to_integer(num));
        re /= Float::with_val(prec, bigint_to_integer(den));
        BigComplex { re, im: Float::new(prec) }
    }

    /// `sqrt(-n)` for a positive integer `n`.
    pub fn sqrt_neg(n: u64, prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Float::with_val(prec, n).sqrt() }
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    /// `2*pi*i`
    pub fn two_pi_i(prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Self::pi(prec) * 2u32 }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec().max(s.prec());
        BigComplex { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        BigComplex { re: self.re.clone() * s, im: self.im.clone() * s }
    }

    pub fn div_i64(&self, s: i64) -> Self {
        BigComplex { re: self.re.clone() / s, im: self.im.clone() / s }
    }

    pub fn mul_i(&self) -> Self {
        BigComplex { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        BigComplex { re: Float::with_val(n.prec(), &self.re / &n), im: -Float::with_val(n.prec(), &self.im / &n) }
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.recip()
    }

    pub fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow_u(e as u64)
        } else {
            self.pow_u(e.unsigned_abs()).recip()
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let r = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        BigComplex { re: Float::with_val(p, &r * &c), im: Float::with_val(p, &r * &s) }
    }

    /// Principal branch of the logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex { re: Float::with_val(p, self.abs().ln()), im: self.arg() }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec();
        let r = self.abs();
        let mut re = Float::with_val(p, &r + &self.re);
        re /= 2u32;
        let re = re.sqrt();
        let mut im = Float::with_val(p, &r - &self.re);
        im /= 2u32;
        let mut im = im.sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        BigComplex { re, im }
    }

    /// Principal n-th root.
    pub fn root(&self, n: u32) -> Self {
        let p = self.prec();
        let l = self.ln();
        BigComplex { re: Float::with_val(p, &l.re / n), im: Float::with_val(p, &l.im / n) }.exp()
    }

    /// Distance to the nearest Gaussian integer in the real part and the absolute imaginary part.
    pub fn rounding_gap(&self) -> f64 {
        let r = self.re.clone().round();
        let g = Float::with_val(self.prec(), &self.re - &r).abs();
        g.to_f64().max(self.im.clone().abs().to_f64())
    }

    /// Nearest integer to the real part.
    pub fn round_re(&self) -> BigInt {
        let r = self.re.clone().round();
        let i = r.to_integer().unwrap_or_default();
        integer_to_bigint(&i)
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// log2 of the absolute value, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let a = self.abs();
        a.log2().to_f64()
    }

    pub fn powf(&self, e: &Float) -> Self {
        let l = self.ln();
        l.scale(e).exp()
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        BigComplex { re: ac - bd, im: ad + bc }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Add for BigComplex {
    type Output = BigComplex;
    fn add(self, o: BigComplex) -> BigComplex {
        &self + &o
    }
}

impl Sub for BigComplex {
    type Output = BigComplex;
    fn sub(self, o: BigComplex) -> BigComplex {
        &self - &o
    }
}

impl Mul for BigComplex {
    type Output = BigComplex;
    fn mul(self, o: BigComplex) -> BigComplex {
        &self * &o
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

pub fn bigint_to_integer(n: &BigInt) -> Integer {
    let (sign, bytes) = n.to_bytes_le();
    let mut i = Integer::from_digits(&bytes, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        i = -i;
    }
    i
}

pub fn integer_to_bigint(n: &Integer) -> BigInt {
    let mut bytes = vec![0u8; n.significant_digits::<u8>()];
    n.write_digits(&mut bytes, rug::integer::Order::Lsf);
    let mag = BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes);
    if n.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`, accepted only when it
/// agrees with `x` to within `2^-(prec/2)` relative to its size.
pub fn recognize_rational(x: &Float, max_den: u64) -> Option<BigRational> {
    let prec = x.prec();
    let exact = x.to_rational()?;
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut r = exact.clone();
    let mut best: Option<(Integer, Integer)> = None;
    for _ in 0..400 {
        let a = r.clone().floor().numer().clone();
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > max_den {
            break;
        }
        best = Some((h2.clone(), k2.clone()));
        let frac = r.clone() - rug::Rational::from(a);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if frac == 0 {
            break;
        }
        r = frac.recip();
    }
    let (h, k) = best?;
    let cand = rug::Rational::from((h.clone(), k.clone()));
    let diff = rug::Rational::from(&exact - &cand);
    let err = Float::with_val(prec, &diff).abs();
    let scale = Float::with_val(prec, exact.clone().abs()).max(&Float::with_val(prec, 1));
    let tol = Float::with_val(prec, 2).pow(-((prec / 2) as i32)) * scale;
    if err > tol {
        return None;
    }
    Some(BigRational::new(integer_to_bigint(&h), integer_to_bigint(&k)))
}

/// `10^(-digits)` as a float, used for tolerance comparisons.
pub fn ten_pow_neg(digits: i32, prec: u32) -> Float {
    Float::with_val(prec, 10).pow(-digits)
}

/// Simultaneous roots of a complex polynomial (coefficients ascending, leading coefficient nonzero)
/// by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].clone();
    let monic: Vec<BigComplex> = coeffs.iter().map(|c| c.div(&lead).with_prec(prec)).collect();
    let eval = |z: &BigComplex| -> (BigComplex, BigComplex) {
        let mut p = BigComplex::zero(prec);
        let mut dp = BigComplex::zero(prec);
        for c in monic.iter().rev() {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + c;
        }
        (p, dp)
    };
    let mut radius = 0f64;
    for k in 1..=n {
        radius = radius.max(monic[n - k].abs_f64().powf(1.0 / k as f64));
    }
    let radius = 2.0 * radius.max(0.5);
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            BigComplex::from_f64(radius * ang.cos(), radius * ang.sin(), prec)
        })
        .collect();
    let tol = -(prec as f64) + 8.0;
    for _ in 0..(prec as usize + 500) {
        let mut done = true;
        let mut next = z.clone();
        for i in 0..n {
            let (p, dp) = eval(&z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p.div(&dp);
            let mut s = BigComplex::zero(prec);
            for j in 0..n {
                if i != j {
                    s = &s + &(&z[i] - &z[j]).recip();
                }
            }
            let denom = &BigComplex::one(prec) - &(&ratio * &s);
            let step = ratio.div(&denom);
            let scale = z[i].abs_f64().max(1.0).log2();
            if step.log2_abs() > tol + scale {
                done = false;
            }
            next[i] = &z[i] - &step;
        }
        z = next;
        if done {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let z = BigComplex::from_f64(0.3, -1.7, 200);
        let w = z.exp().ln();
        assert!((&w - &z).abs_f64() < 1e-55);
    }

    #[test]
    fn sqrt_squares_back() {
        let z = BigComplex::from_f64(-2.0, 0.5, 200);
        let s = z.sqrt();
        assert!((&s.square() - &z).abs_f64() < 1e-55);
        assert!(s.re.to_f64() >= 0.0);
    }

    #[test]
    fn bigint_conversion_roundtrip() {
        let n: BigInt = "-123456789012345678901234567890".parse().unwrap();
        assert_eq!(integer_to_bigint(&bigint_to_integer(&n)), n);
    }

    #[test]
    fn roots_of_cubic() {
        let p = 128;
        let c: Vec<BigComplex> = [-6i64, 11, -6, 1].iter().map(|&v| BigComplex::from_int(v, p)).collect();
        let mut r: Vec<f64> = poly_roots(&c, p).iter().map(|z| z.re.to_f64()).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, e) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-30);
        }
    }
}
