//! Class groups of imaginary quadratic fields of prime discriminant, the modular j-function
//! and Hilbert class polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigcomplex::BigComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmError {
    #[error("q = {0} is not a prime congruent to 7 mod 8")]
    BadDiscriminant(u64),
    #[error("forms have different discriminants ({0} vs {1})")]
    DiscriminantMismatch(BigInt, BigInt),
    #[error("class number {0} is even")]
    EvenClassNumber(usize),
    #[error("Im(tau) is not positive")]
    NotInUpperHalfPlane,
    #[error("tau too close to the real axis for {0} bits")]
    TauTooLow(u32),
    #[error("insufficient precision at {prec_bits} bits: worst rounding gap {gap}")]
    InsufficientPrecision { prec_bits: u32, gap: f64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_q(q: u64) -> Result<(), CmError> {
    if q % 8 == 7 && is_prime(q) {
        Ok(())
    } else {
        Err(CmError::BadDiscriminant(q))
    }
}

/// Primes up to `bound` congruent to 7 mod 8.
pub fn admissible_primes(bound: u64) -> Vec<u64> {
    (7..=bound).filter(|&q| check_q(q).is_ok()).collect()
}

/// Positive definite binary quadratic form `ax^2 + bxy + cy^2`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn identity(q: u64) -> Self {
        QuadForm::new(1, 1, ((q + 1) / 4) as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        if ab > self.a || self.a > self.c {
            return false;
        }
        if (ab == self.a || self.a == self.c) && self.b.is_negative() {
            return false;
        }
        true
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    /// Bring `b` into `(-a, a]` keeping the discriminant.
    fn normalize(&self) -> Self {
        let two_a = BigInt::from(2) * &self.a;
        let r = (&self.a - &self.b).div_floor(&two_a);
        let b = &self.b + &r * &two_a;
        let d = self.discriminant();
        let c = (&b * &b - d) / (BigInt::from(4) * &self.a);
        QuadForm { a: self.a.clone(), b, c }
    }

    pub fn reduce(&self) -> Self {
        let mut f = self.normalize();
        while f.a > f.c {
            f = QuadForm { a: f.c.clone(), b: -f.b.clone(), c: f.a.clone() }.normalize();
        }
        if f.a == f.c && f.b.is_negative() {
            f.b = -f.b;
        }
        f
    }

    pub fn inverse(&self) -> Self {
        QuadForm { a: self.a.clone(), b: -self.b.clone(), c: self.c.clone() }.reduce()
    }

    /// `tau = (-b + sqrt(-q)) / (2a)`
    pub fn tau(&self, q: u64, prec: u32) -> BigComplex {
        let two_a = BigInt::from(2) * &self.a;
        let re = BigComplex::from_ratio(&-self.b.clone(), &two_a, prec);
        let im = BigComplex::sqrt_neg(q, prec).div_i64(two_a.to_i64().expect("small form"));
        &re + &im
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Gauss composition via the united-form formula, followed by reduction.
pub fn compose(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm, CmError> {
    let d = f1.discriminant();
    let d2 = f2.discriminant();
    if d != d2 {
        return Err(CmError::DiscriminantMismatch(d, d2));
    }
    let (a1, b1) = (&f1.a, &f1.b);
    let (a2, b2) = (&f2.a, &f2.b);
    let half_sum: BigInt = (b1 + b2) / 2;
    let (g, x, y) = ext_gcd(a1, a2);
    let (e, u, v) = ext_gcd(&g, &half_sum);
    let p = &u * &x;
    let r = &u * &y;
    let a3 = (a1 * a2) / (&e * &e);
    let num: BigInt = &p * a1 * b2 + &r * a2 * b1 + &v * (b1 * b2 + &d) / 2;
    let two_a3 = BigInt::from(2) * &a3;
    let b3: BigInt = num / &e;
    let b3 = b3.mod_floor(&two_a3);
    let c3 = (&b3 * &b3 - &d) / (BigInt::from(4) * &a3);
    Ok(QuadForm { a: a3, b: b3, c: c3 }.reduce())
}

pub fn power(f: &QuadForm, q: u64, mut n: u64) -> QuadForm {
    let mut acc = QuadForm::identity(q);
    let mut base = f.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = compose(&acc, &base).expect("same discriminant");
        }
        base = compose(&base, &base).expect("same discriminant");
        n >>= 1;
    }
    acc
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassGroup {
    pub q: u64,
    pub forms: Vec<QuadForm>,
    pub h: usize,
}

impl ClassGroup {
    pub fn order_of(&self, f: &QuadForm) -> usize {
        let id = QuadForm::identity(self.q);
        let mut acc = f.reduce();
        let mut k = 1;
        while acc != id {
            acc = compose(&acc, f).expect("same discriminant");
            k += 1;
            assert!(k <= self.h, "element order exceeds class number");
        }
        k
    }
}

/// All reduced primitive forms of discriminant `-q`, ordered by `(a, b)`.
pub fn class_group(q: u64) -> Result<ClassGroup, CmError> {
    check_q(q)?;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= q as i64 {
        for b in -a + 1..=a {
            let num = b * b + q as i64;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                forms.push(f);
            }
        }
        a += 1;
    }
    let h = forms.len();
    if h % 2 == 0 {
        return Err(CmError::EvenClassNumber(h));
    }
    Ok(ClassGroup { q, forms, h })
}

/// The reduced form representing the prime above 2 corresponding to `(2, 1, (q+1)/8)`.
pub fn prime_above_2_form(q: u64) -> QuadForm {
    QuadForm::new(2, 1, ((q + 1) / 8) as i64).reduce()
}

/// Order of the class of a prime above 2; equals the residue degree of primes above 2 in H.
pub fn prime_above_2_order(cg: &ClassGroup) -> usize {
    cg.order_of(&prime_above_2_form(cg.q))
}

fn reduce_tau(tau: &BigComplex) -> BigComplex {
    let prec = tau.prec();
    let mut t = tau.clone();
    for _ in 0..10_000 {
        let shift = t.re.clone().round();
        t.re -= &shift;
        if t.norm_sqr() < 1u32 {
            t = (-&t.recip()).with_prec(prec);
        } else {
            break;
        }
    }
    t
}

/// Modular invariant `j = E4^3 / Delta` with `Delta` from the eta product.
pub fn j_tau(tau: &BigComplex, prec_bits: u32) -> Result<BigComplex, CmError> {
    if !tau.im.is_sign_positive() || tau.im.is_zero() {
        return Err(CmError::NotInUpperHalfPlane);
    }
    if tau.im.to_f64() < (-(prec_bits as f64) / 4.0).exp2() {
        return Err(CmError::TauTooLow(prec_bits));
    }
    let guard = 32 + (tau.im.to_f64().max(1.0) * 9.07).ceil() as u32;
    let wp = prec_bits + guard;
    let t = reduce_tau(&tau.with_prec(wp + 64)).with_prec(wp);
    let nome = (&BigComplex::two_pi_i(wp) * &t).exp();
    let log_abs_q = nome.log2_abs();
    let terms = ((wp as f64 + 16.0) / -log_abs_q).ceil() as usize + 2;

    let mut e4_sum = BigComplex::zero(wp);
    let mut qn = BigComplex::one(wp);
    for n in 1..=terms {
        qn = &qn * &nome;
        let s3: u64 = (1..=n as u64).filter(|d| n as u64 % d == 0).map(|d| d * d * d).sum();
        e4_sum = &e4_sum + &qn.scale(&Float::with_val(wp, s3));
    }
    let e4 = &BigComplex::one(wp) + &e4_sum.scale_i64(240);

    // Euler's pentagonal series for prod (1 - q^n).
    let mut eta = BigComplex::one(wp);
    let mut k = 1i64;
    loop {
        let e1 = (k * (3 * k - 1) / 2) as u64;
        if e1 as f64 * -log_abs_q > wp as f64 + 16.0 {
            break;
        }
        let e2 = (k * (3 * k + 1) / 2) as u64;
        let term = &nome.pow_u(e1) + &nome.pow_u(e2);
        eta = if k % 2 == 1 { &eta - &term } else { &eta + &term };
        k += 1;
    }
    let delta = &nome * &eta.pow_u(24);
    let j = e4.pow_u(3).div(&delta);
    Ok(j.with_prec(prec_bits.max(64) + guard))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HilbertClassPoly {
    pub q: u64,
    pub coeffs: Vec<BigInt>,
    pub prec_bits: u32,
}

impl HilbertClassPoly {
    pub fn h(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Working precision for the class polynomial: `ceil(pi sqrt(q) sum 1/a / ln 2) + 64`.
pub fn hcp_precision_bound(cg: &ClassGroup) -> u32 {
    let s: f64 = cg.forms.iter().map(|f| 1.0 / f.a.to_f64().unwrap()).sum();
    (std::f64::consts::PI * (cg.q as f64).sqrt() * s / std::f64::consts::LN_2).ceil() as u32 + 64
}

/// The CM values `j(tau_Q)` for all reduced forms.
pub fn cm_values(cg: &ClassGroup, prec_bits: u32) -> Result<Vec<BigComplex>, CmError> {
    cg.forms.iter().map(|f| j_tau(&f.tau(cg.q, prec_bits + 32), prec_bits)).collect()
}

pub fn hilbert_class_poly(q: u64, prec_bits: u32) -> Result<HilbertClassPoly, CmError> {
    let cg = class_group(q)?;
    let roots = cm_values(&cg, prec_bits)?;
    let wp = roots[0].prec();
    let mut p = vec![BigComplex::one(wp)];
    for r in &roots {
        let mut next = vec![BigComplex::zero(wp); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        p = next;
    }
    let mut gap = 0f64;
    let mut coeffs = Vec::with_capacity(p.len());
    for c in &p {
        gap = gap.max(c.rounding_gap());
        coeffs.push(c.round_re());
    }
    if !(gap < 0.25) {
        return Err(CmError::InsufficientPrecision { prec_bits, gap });
    }
    Ok(HilbertClassPoly { q, coeffs, prec_bits })
}

/// Class polynomial at the default precision bound.
pub fn hilbert_class_poly_default(q: u64) -> Result<HilbertClassPoly, CmError> {
    let cg = class_group(q)?;
    hilbert_class_poly(q, hcp_precision_bound(&cg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn small_class_groups() {
        let cg = class_group(7).unwrap();
        assert_eq!(cg.forms, vec![f(1, 1, 2)]);
        let cg = class_group(23).unwrap();
        let got: HashSet<_> = cg.forms.iter().cloned().collect();
        let want: HashSet<_> = [f(1, 1, 6), f(2, 1, 3), f(2, -1, 3)].into_iter().collect();
        assert_eq!(got, want);
        assert_eq!(class_group(431).unwrap().h, 21);
    }

    #[test]
    fn rejects_bad_q() {
        assert!(class_group(15).is_err());
        assert!(class_group(13).is_err());
        assert!(class_group(2).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(compose(&f(1, 1, 6), &f(2, 1, 3)).unwrap(), f(2, 1, 3));
        assert_eq!(compose(&f(2, 1, 3), &f(2, -1, 3)).unwrap(), f(1, 1, 6));
        assert_eq!(compose(&f(2, 1, 3), &f(2, 1, 3)).unwrap(), f(2, -1, 3));
        assert!(compose(&f(1, 1, 6), &f(1, 1, 2)).is_err());
    }

    #[test]
    fn prime_above_two_orders() {
        assert_eq!(prime_above_2_order(&class_group(7).unwrap()), 1);
        assert_eq!(prime_above_2_order(&class_group(23).unwrap()), 3);
        assert_eq!(prime_above_2_order(&class_group(47).unwrap()), 5);
    }

    #[test]
    fn two_forms_with_a_two_are_inverse() {
        for q in admissible_primes(500).into_iter().filter(|&q| q > 7) {
            let cg = class_group(q).unwrap();
            let twos: Vec<_> = cg.forms.iter().filter(|g| g.a == BigInt::from(2)).collect();
            assert_eq!(twos.len(), 2, "q={q}");
            assert_eq!(compose(twos[0], twos[1]).unwrap(), QuadForm::identity(q));
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for q in admissible_primes(500) {
            let cg = class_group(q).unwrap();
            if cg.h > 21 {
                continue;
            }
            let id = QuadForm::identity(q);
            let set: HashSet<_> = cg.forms.iter().cloned().collect();
            for x in &cg.forms {
                assert_eq!(compose(x, &id).unwrap(), *x);
                assert_eq!(compose(x, &x.inverse()).unwrap(), id);
                assert_eq!(cg.h % cg.order_of(x), 0);
                for y in &cg.forms {
                    let xy = compose(x, y).unwrap();
                    assert!(set.contains(&xy));
                    assert_eq!(xy, compose(y, x).unwrap());
                    for z in cg.forms.iter().take(4) {
                        let l = compose(&xy, z).unwrap();
                        let r = compose(x, &compose(y, z).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn classical_j_values() {
        let p = 200;
        let i = BigComplex::i(p);
        let j = j_tau(&i, p).unwrap();
        assert!((&j - &BigComplex::from_int(1728, j.prec())).abs_f64() < 1e-50);
        let rho = &BigComplex::from_f64(0.5, 0.0, p) + &BigComplex::sqrt_neg(3, p).div_i64(2);
        assert!(j_tau(&rho, p).unwrap().abs_f64() < 1e-50);
        let t7 = &BigComplex::from_f64(0.5, 0.0, p) + &BigComplex::sqrt_neg(7, p).div_i64(2);
        let j7 = j_tau(&t7, p).unwrap();
        assert_eq!(j7.round_re(), BigInt::from(-3375));
        assert!(j7.rounding_gap() < 1e-40);
    }

    #[test]
    fn j_is_modular_invariant() {
        let p = 160;
        let tau = BigComplex::from_f64(0.1, 1.3, p);
        let shifted = &tau + &BigComplex::one(p);
        let inv = -&tau.recip();
        let a = j_tau(&tau, p).unwrap();
        assert!((&a - &j_tau(&shifted, p).unwrap()).abs_f64() < 1e-35);
        assert!((&a - &j_tau(&inv, p).unwrap()).abs_f64() < 1e-35);
    }

    #[test]
    fn j_rejects_lower_half_plane() {
        assert_eq!(j_tau(&BigComplex::from_f64(0.0, -1.0, 64), 64), Err(CmError::NotInUpperHalfPlane));
        assert_eq!(j_tau(&BigComplex::from_f64(0.0, 1e-30, 64), 64), Err(CmError::TauTooLow(64)));
    }

    #[test]
    fn class_polynomials() {
        let h7 = hilbert_class_poly_default(7).unwrap();
        assert_eq!(h7.coeffs, vec![BigInt::from(3375), BigInt::one()]);
        let h23 = hilbert_class_poly_default(23).unwrap();
        let want: Vec<BigInt> = ["12771880859375", "-5151296875", "3491750", "1"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(h23.coeffs, want);
    }

    #[test]
    fn class_polynomial_stable_under_doubling() {
        let cg = class_group(31).unwrap();
        let b = hcp_precision_bound(&cg);
        let a = hilbert_class_poly(31, b).unwrap();
        let c = hilbert_class_poly(31, 2 * b).unwrap();
        assert_eq!(a.coeffs, c.coeffs);
        assert_eq!(a.h(), 3);
    }

    #[test]
    fn insufficient_precision_reported() {
        match hilbert_class_poly(71, 20) {
            Err(CmError::InsufficientPrecision { gap, .. }) => assert!(gap >= 0.25),
            Ok(_) => panic!("20 bits cannot pin a degree-7 class polynomial"),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}
