//! Measures on the 2-adic integers through their Mahler series, the operators on them used by the
//! Gamma-transform, and mu/lambda invariants of truncated power series.

use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::padic::q2::{log_q2, pow2, v2};
use crate::padic::{Q2, Q2i};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IwasawaError {
    #[error("inner series must have a constant term of positive valuation")]
    Composition,
    #[error("coefficient {index} has an imaginary part {value} beyond the tracked precision")]
    NotReal { index: usize, value: String },
    #[error("interpolation residual at s = {s}: agreement only to 2^{agree} of 2^{needed}")]
    Interpolation { s: u64, agree: i64, needed: i64 },
    #[error("generator {0} is not congruent to 5 mod 8")]
    BadGenerator(i64),
    #[error("series has {have} coefficients, {need} are needed")]
    TooShort { have: usize, need: usize },
    #[error("mu is not certified at the working precision")]
    Uncertified,
    #[error("no constant c fits the given orders")]
    NoConsistentConstant,
    #[error("at least {0} values are required")]
    TooFewValues(usize),
    #[error("denominator is not a unit at w = 0")]
    EvenDenominator,
}

/// Coefficient rings for truncated series: the 2-adic numbers and their Gaussian extension.
pub trait Coef: Clone + fmt::Debug {
    fn zero(prec: i64) -> Self;
    fn from_q2(x: &Q2) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn prec(&self) -> i64;
    /// Lower bound for the 2-adic valuation.
    fn val_lb(&self) -> i64;
    /// Lower bound for twice the 2-adic valuation.
    fn val_halves_lb(&self) -> i64;
    fn is_zero(&self) -> bool;
    fn with_prec(&self, p: i64) -> Self;
    /// Multiply by `2^k`.
    fn shift(&self, k: i64) -> Self;
}

impl Coef for Q2 {
    fn zero(prec: i64) -> Self {
        Q2::zero(prec)
    }
    fn from_q2(x: &Q2) -> Self {
        x.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn prec(&self) -> i64 {
        Q2::prec(self)
    }
    fn val_lb(&self) -> i64 {
        Q2::val_lb(self)
    }
    fn val_halves_lb(&self) -> i64 {
        2 * Q2::val_lb(self)
    }
    fn is_zero(&self) -> bool {
        Q2::is_zero(self)
    }
    fn with_prec(&self, p: i64) -> Self {
        Q2::with_prec(self, p)
    }
    fn shift(&self, k: i64) -> Self {
        Q2::shift(self, k)
    }
}

impl Coef for Q2i {
    fn zero(prec: i64) -> Self {
        Q2i::new(Q2::zero(prec), Q2::zero(prec))
    }
    fn from_q2(x: &Q2) -> Self {
        Q2i::real(x.clone())
    }
    fn add(&self, o: &Self) -> Self {
        Q2i::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Q2i::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Q2i::mul(self, o)
    }
    fn neg(&self) -> Self {
        Q2i::neg(self)
    }
    fn prec(&self) -> i64 {
        Q2i::prec(self)
    }
    fn val_lb(&self) -> i64 {
        min(self.re.val_lb(), self.im.val_lb())
    }
    fn val_halves_lb(&self) -> i64 {
        match (self.re.valuation(), self.im.valuation()) {
            (Some(a), Some(b)) if a == b => 2 * a + 1,
            _ => 2 * Coef::val_lb(self),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn with_prec(&self, p: i64) -> Self {
        Q2i::new(self.re.with_prec(p), self.im.with_prec(p))
    }
    fn shift(&self, k: i64) -> Self {
        Q2i::new(self.re.shift(k), self.im.shift(k))
    }
}

/// `c_0 + c_1 w + ... + c_D w^D + O(w^(D+1))`; when `tail_zero` is set the omitted
/// coefficients are known to vanish.
#[derive(Clone, Debug)]
pub struct Series<C> {
    coeffs: Vec<C>,
    tail_zero: bool,
}

pub type Series2 = Series<Q2>;

impl<C: Coef> Series<C> {
    pub fn new(coeffs: Vec<C>, tail_zero: bool) -> Self {
        assert!(!coeffs.is_empty(), "series needs a degree cap");
        Series { coeffs, tail_zero }
    }

    /// Polynomial padded with exact zeros up to degree `d`.
    pub fn from_poly(mut coeffs: Vec<C>, d: usize, prec: i64) -> Self {
        assert!(coeffs.len() <= d + 1, "polynomial exceeds the degree cap");
        coeffs.resize(d + 1, C::zero(prec));
        Series { coeffs, tail_zero: true }
    }

    pub fn constant(c: C, d: usize) -> Self {
        let p = c.prec();
        Series::from_poly(vec![c], d, p)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail_zero(&self) -> bool {
        self.tail_zero
    }

    pub fn prec(&self) -> i64 {
        self.coeffs.iter().map(Coef::prec).min().unwrap()
    }

    /// Index of the last coefficient that is nonzero at its precision.
    pub fn poly_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn min_val(&self) -> i64 {
        self.coeffs.iter().map(Coef::val_lb).min().unwrap()
    }

    pub fn truncate(&self, d: usize) -> Self {
        let d = min(d, self.cap());
        let tail_zero = self.tail_zero && self.poly_degree().map_or(true, |k| k <= d);
        Series { coeffs: self.coeffs[..=d].to_vec(), tail_zero }
    }

    pub fn with_prec(&self, p: i64) -> Self {
        Series { coeffs: self.coeffs.iter().map(|c| c.with_prec(p)).collect(), tail_zero: self.tail_zero }
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let d = min(self.cap(), o.cap());
        let coeffs = (0..=d).map(|k| f(&self.coeffs[k], &o.coeffs[k])).collect();
        let both = self.tail_zero && o.tail_zero;
        let fits = |s: &Self| s.poly_degree().map_or(true, |k| k <= d);
        Series { coeffs, tail_zero: both && fits(self) && fits(o) }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(Coef::neg).collect(), tail_zero: self.tail_zero }
    }

    pub fn scale(&self, c: &C) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(), tail_zero: self.tail_zero }
    }

    pub fn shift(&self, k: i64) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x.shift(k)).collect(), tail_zero: self.tail_zero }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = min(self.cap(), o.cap());
        let da = self.poly_degree();
        let db = o.poly_degree();
        let mut coeffs = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut acc: Option<C> = None;
            for i in 0..=k {
                let t = self.coeffs[i].mul(&o.coeffs[k - i]);
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.add(&t),
                });
            }
            coeffs.push(acc.unwrap());
        }
        let fits = match (da, db) {
            (Some(a), Some(b)) => a + b <= d,
            _ => true,
        };
        Series { coeffs, tail_zero: self.tail_zero && o.tail_zero && fits }
    }

    /// `self(g(w))`. The constant term of `g` must have positive valuation; when `self` is not a
    /// polynomial, coefficient `k` is capped by the valuation of the omitted terms.
    pub fn compose(&self, g: &Self) -> Result<Self, IwasawaError> {
        let g0 = &g.coeffs[0];
        let c_half = if g0.is_zero() { i64::MAX } else { g0.val_halves_lb() };
        if c_half <= 0 {
            return Err(IwasawaError::Composition);
        }
        let d = min(self.cap(), g.cap());
        let g = g.truncate(d);
        let n = self.coeffs.len();
        let mut acc = Series::constant(self.coeffs[n - 1].clone(), d);
        for i in (0..n - 1).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[i]);
            acc.tail_zero = false;
        }
        let exact_tail = self.tail_zero;
        let poly = self.tail_zero && g.tail_zero;
        let deg_ok = match (self.poly_degree(), g.poly_degree()) {
            (Some(a), Some(b)) => a * b <= d,
            _ => true,
        };
        acc.tail_zero = poly && deg_ok;
        if !exact_tail && c_half != i64::MAX {
            let base = min(0, self.min_val());
            let len = n as i64;
            for (k, c) in acc.coeffs.iter_mut().enumerate() {
                let cap = (len - k as i64) * c_half / 2 + base;
                *c = c.with_prec(cap);
            }
        }
        Ok(acc)
    }

    pub fn mu_lambda(&self) -> MuLambda {
        mu_lambda_of(&self.coeffs)
    }
}

impl Series<Q2> {
    pub fn to_gaussian(&self) -> Series<Q2i> {
        Series { coeffs: self.coeffs.iter().map(Q2i::from_q2).collect(), tail_zero: self.tail_zero }
    }

    /// `(1 + w)^a` truncated at degree `d`, for any integer `a`.
    pub fn dirac(a: i64, d: usize, prec: i64) -> Self {
        let coeffs: Vec<Q2> = binomials(a, d).iter().map(|b| Q2::from_int(b, prec)).collect();
        Series { coeffs, tail_zero: a >= 0 && (a as usize) <= d }
    }

    /// Agreement of all coefficients at the smaller precision.
    pub fn agrees(&self, o: &Self) -> bool {
        let d = min(self.cap(), o.cap());
        (0..=d).all(|k| self.coeffs[k].agrees(&o.coeffs[k]))
    }

    /// Agreement of all coefficients modulo `2^p`.
    pub fn agrees_to(&self, o: &Self, p: i64) -> bool {
        let d = min(self.cap(), o.cap());
        (0..=d).all(|k| (&self.coeffs[k] - &o.coeffs[k]).with_prec(p).is_zero() && self.coeffs[k].prec() >= p && o.coeffs[k].prec() >= p)
    }

    pub fn eval(&self, x: &Q2) -> Q2 {
        let mut acc = self.coeffs[self.cap()].clone();
        for c in self.coeffs[..self.cap()].iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| format!("{:?}", c)).collect()
    }
}

impl Series<Q2i> {
    /// The real part, requiring the imaginary parts to vanish at their precision.
    pub fn into_real(self) -> Result<Series<Q2>, IwasawaError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (index, c) in self.coeffs.into_iter().enumerate() {
            if !c.im.is_zero() {
                return Err(IwasawaError::NotReal { index, value: format!("{:?}", c.im) });
            }
            let p = min(c.re.prec(), c.im.prec());
            out.push(c.re.with_prec(p));
        }
        Ok(Series { coeffs: out, tail_zero: self.tail_zero })
    }
}

fn binomials(a: i64, d: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(d + 1);
    let mut b = BigInt::one();
    for n in 0..=d {
        out.push(b.clone());
        b = b * BigInt::from(a - n as i64) / BigInt::from(n as i64 + 1);
    }
    out
}

/// Finite measure `sum w_a delta_a` on the 2-adic integers.
#[derive(Clone, Debug, Default)]
pub struct DiracComb {
    pub atoms: Vec<(i64, BigInt)>,
}

impl DiracComb {
    pub fn new(atoms: Vec<(i64, i64)>) -> Self {
        DiracComb { atoms: atoms.into_iter().map(|(a, w)| (a, BigInt::from(w))).collect() }
    }

    /// Integrals of `binom(x, n)` for `n <= d`.
    pub fn binomial_moments(&self, d: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); d + 1];
        for (a, w) in &self.atoms {
            for (n, b) in binomials(*a, d).into_iter().enumerate() {
                out[n] += w * b;
            }
        }
        out
    }

    pub fn series(&self, d: usize, prec: i64) -> Series2 {
        mahler(&self.binomial_moments(d).iter().map(|b| Q2::from_int(b, prec)).collect::<Vec<_>>())
            .with_tail(self.atoms.iter().all(|(a, _)| *a >= 0 && (*a as usize) <= d))
    }
}

impl Series2 {
    fn with_tail(mut self, tail_zero: bool) -> Self {
        self.tail_zero = tail_zero;
        self
    }
}

/// Mahler series from the binomial moments of a measure.
pub fn mahler(moments: &[Q2]) -> Series2 {
    Series { coeffs: moments.to_vec(), tail_zero: false }
}

/// Binomial moments back from the Mahler series.
pub fn inverse_mahler(f: &Series2) -> Vec<Q2> {
    f.coeffs.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuLambda {
    pub mu: i64,
    pub lambda: usize,
    pub certified: bool,
}

/// Below this many known digits mu/lambda values are never certified.
pub const MIN_CERTIFIED_PREC: i64 = 16;

fn mu_lambda_of<C: Coef>(cs: &[C]) -> MuLambda {
    let nonzero: Vec<(usize, i64)> = cs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.val_lb())).collect();
    let Some(&mu) = nonzero.iter().map(|(_, v)| v).min() else {
        let p = cs.iter().map(Coef::prec).min().unwrap_or(0);
        return MuLambda { mu: p, lambda: 0, certified: false };
    };
    let lambda = nonzero.iter().find(|(_, v)| *v == mu).unwrap().0;
    let mut certified = true;
    for (i, c) in cs.iter().enumerate() {
        if c.is_zero() {
            let need = if i < lambda { mu + 1 } else { mu };
            if c.prec() < need {
                certified = false;
            }
        }
        if i <= lambda && c.prec() < MIN_CERTIFIED_PREC {
            certified = false;
        }
    }
    MuLambda { mu, lambda, certified }
}

/// `F(w) - (1/2)(F(w) + F(-(1+w) - 1))`: the measure restricted to the 2-adic units.
pub fn restrict_units(f: &Series2) -> Result<Series2, IwasawaError> {
    let d = f.cap();
    let g = Series::from_poly(vec![Q2::from_i64(-2, f.prec()), Q2::from_i64(-1, f.prec())], d, f.prec());
    let fm = f.compose(&g)?;
    Ok(f.sub(&fm).shift(-1))
}

/// `F((1+w)^(-1) - 1)`: the pushforward under `x -> -x`.
pub fn involution(f: &Series2) -> Result<Series2, IwasawaError> {
    let d = f.cap();
    let p = f.prec();
    let coeffs: Vec<Q2> = (0..=d).map(|k| if k == 0 { Q2::zero(p) } else { Q2::from_i64(if k % 2 == 1 { -1 } else { 1 }, p) }).collect();
    f.compose(&Series::new(coeffs, false))
}

/// The measure restricted to `a + 4 Z_2`, through `(1/4) sum_i zeta_4^(-a i) F(zeta_4^i (1+w) - 1)`.
pub fn restrict_class(f: &Series2, a: i64) -> Result<Series2, IwasawaError> {
    let d = f.cap();
    let p = f.prec();
    let fg = f.to_gaussian();
    let mut acc: Option<Series<Q2i>> = None;
    for i in 0..4i64 {
        let z = Q2i::i_pow(i, p);
        let c0 = z.sub(&Q2i::i_pow(0, p));
        let g = Series::from_poly(vec![c0, z], d, p);
        let term = if i == 0 { fg.clone() } else { fg.compose(&g)? };
        let term = term.scale(&Q2i::i_pow(-a * i, p));
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    acc.unwrap().shift(-2).into_real()
}

/// `omega^(-1) * F` for `F` supported on units: the class of 1 minus the class of 3 mod 4.
pub fn teichmueller_twist(f: &Series2) -> Result<Series2, IwasawaError> {
    Ok(restrict_class(f, 1)?.sub(&restrict_class(f, 3)?))
}

/// Ordered set partitions: `k! S(s, k)` for `s, k <= n`.
fn surjections(n: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::zero(); n + 1]; n + 1];
    t[0][0] = BigInt::one();
    for s in 1..=n {
        for k in 1..=s {
            t[s][k] = BigInt::from(k) * (&t[s - 1][k] + &t[s - 1][k - 1]);
        }
    }
    t
}

/// `int x^s dm` from the Mahler coefficients of `m`.
fn power_moment(f: &Series2, s: usize, surj: &[Vec<BigInt>]) -> Q2 {
    let top = min(s, f.cap());
    let mut acc = Q2::zero(f.prec());
    for k in 0..=top {
        if surj[s][k].is_zero() {
            continue;
        }
        acc = &acc + &(&f.coeffs[k] * &Q2::from_int(&surj[s][k], f.coeffs[k].prec() + 64));
    }
    acc
}

/// Settings and output of a Gamma-transform.
#[derive(Clone, Debug)]
pub struct GammaTransform {
    pub series: Series2,
    pub generator: i64,
    pub differences: usize,
    pub certified_at: Vec<u64>,
}

/// `L(F)` with `L(F)(u^s - 1) = int <x>^s dm_F` for `F` supported on the units. The twist by
/// `omega^(-1)` is computed with [`teichmueller_twist`].
pub fn gamma_transform(f: &Series2, u: i64, d: usize) -> Result<GammaTransform, IwasawaError> {
    let tw = teichmueller_twist(f)?;
    gamma_transform_parts(f, &tw, u, d)
}

/// As [`gamma_transform`], with the twisted measure supplied by the caller.
pub fn gamma_transform_parts(f: &Series2, twisted: &Series2, u: i64, d: usize) -> Result<GammaTransform, IwasawaError> {
    if u.rem_euclid(8) != 5 {
        return Err(IwasawaError::BadGenerator(u));
    }
    let cert = max(d / 2, 1);
    let p_in = min(f.prec(), twisted.prec());
    let mu0 = min(0, min(f.min_val(), twisted.min_val()));
    let mut m = max(d, ((p_in - 8).max(0) / 2) as usize);
    for s in [f, twisted] {
        if !s.tail_zero() {
            let avail = s.cap();
            if avail < d + cert {
                return Err(IwasawaError::TooShort { have: avail + 1, need: d + cert + 1 });
            }
            m = min(m, avail - cert);
        }
    }
    let top = m + cert;
    let surj = surjections(top);
    let moments: Vec<Q2> =
        (0..=top).map(|s| power_moment(if s % 2 == 0 { f } else { twisted }, s, &surj)).collect();
    let mut diffs = moments[..=m].to_vec();
    let mut a = Vec::with_capacity(m + 1);
    for k in 0..=m {
        a.push(diffs[0].clone());
        for j in 0..m - k {
            diffs[j] = &diffs[j + 1] - &diffs[j];
        }
    }
    let wp = p_in + 4 * m as i64 + 64;
    let log_u = log_q2(&Q2::from_i64(u, wp + 1));
    let inv_log = log_u.inv();
    let mut ell = vec![Q2::zero(wp); d + 1];
    for j in 1..=d {
        let c = Q2::from_ratio(&BigInt::from(if j % 2 == 1 { 1 } else { -1 }), &BigInt::from(j), wp);
        ell[j] = &c * &inv_log;
    }
    let ell = Series::from_poly(ell, d, wp);
    let mut binom_k = Series::constant(Q2::one(wp), d);
    let mut out = vec![Q2::zero(wp); d + 1];
    for (k, ak) in a.iter().enumerate() {
        if k > 0 {
            let shift = Series::constant(Q2::from_i64(-(k as i64 - 1), wp), d);
            let inv_k = Q2::from_ratio(&BigInt::one(), &BigInt::from(k), wp);
            binom_k = binom_k.mul(&ell.add(&shift)).scale(&inv_k);
        }
        for n in 0..=d {
            out[n] = &out[n] + &(ak * &binom_k.coeffs[n]);
        }
    }
    for (n, c) in out.iter_mut().enumerate() {
        *c = c.with_prec(m as i64 + 2 - 2 * n as i64 + mu0);
    }
    let series = Series::new(out, false);
    let mut certified_at = Vec::new();
    for s in m + 1..=top {
        let x = &Q2::from_i64(u, wp).pow(s as u64) - &Q2::one(wp);
        let val = series.eval(&x);
        let needed = min(min(val.prec(), moments[s].prec()), 2 * (d as i64 + 1) + mu0);
        let diff = (&val - &moments[s]).with_prec(needed);
        if !diff.is_zero() {
            return Err(IwasawaError::Interpolation { s: s as u64, agree: diff.val_lb(), needed });
        }
        certified_at.push(s as u64);
    }
    Ok(GammaTransform { series, generator: u, differences: m, certified_at })
}

/// The constant `c` in `ord_n = 2^n mu + lambda n + c` for `n = start, start + 1, ...`.
pub fn iwasawa_asymptote_check(ords: &[i64], start: u32, mu: i64, lambda: i64) -> Result<i64, IwasawaError> {
    if ords.len() < 3 {
        return Err(IwasawaError::TooFewValues(3));
    }
    let cs: Vec<i64> = ords
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let n = start as i64 + i as i64;
            o - (1i64 << n) * mu - lambda * n
        })
        .collect();
    if cs.iter().all(|c| *c == cs[0]) {
        Ok(cs[0])
    } else {
        Err(IwasawaError::NoConsistentConstant)
    }
}

/// Rational function `P(T)/Q(T)` in `T = 1 + w` with integer coefficients and `Q(1)` odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalDatum {
    pub num: Vec<BigInt>,
    pub den: Vec<BigInt>,
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn pmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `p(c T)` for `c` in `{1, -1}` or the Gaussian unit `i^k`, returned as real and imaginary parts.
fn substitute_unit(p: &[BigInt], k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut re = vec![BigInt::zero(); p.len()];
    let mut im = vec![BigInt::zero(); p.len()];
    for (j, c) in p.iter().enumerate() {
        match (k as usize * j) % 4 {
            0 => re[j] = c.clone(),
            1 => im[j] = c.clone(),
            2 => re[j] = -c,
            _ => im[j] = -c,
        }
    }
    (re, im)
}

fn eval_at_one(p: &[BigInt]) -> BigInt {
    p.iter().sum()
}

/// Coefficients of `p(1 + w)`.
pub fn taylor_shift(p: &[BigInt]) -> Vec<BigInt> {
    let n = p.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, c) in p.iter().enumerate() {
        let mut b = BigInt::one();
        for j in 0..=i {
            out[j] += c * &b;
            b = b * BigInt::from(i - j) / BigInt::from(j + 1);
        }
    }
    out
}

impl RationalDatum {
    pub fn new(num: Vec<BigInt>, den: Vec<BigInt>) -> Result<Self, IwasawaError> {
        let den = trim(den);
        if eval_at_one(&den).is_even() {
            return Err(IwasawaError::EvenDenominator);
        }
        Ok(RationalDatum { num: trim(num), den })
    }

    pub fn from_i64(num: &[i64], den: &[i64]) -> Result<Self, IwasawaError> {
        RationalDatum::new(num.iter().map(|&c| BigInt::from(c)).collect(), den.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Power series in `w` to degree `d`, exact modulo `2^prec`.
    pub fn series(&self, d: usize, prec: i64) -> Series2 {
        let m = pow2(prec);
        let mut a = taylor_shift(&self.num);
        let b = taylor_shift(&self.den);
        a.resize(max(a.len(), d + 1), BigInt::zero());
        let inv_b0 = crate::padic::q2::inv_odd_mod(&b[0], prec);
        let mut q: Vec<BigInt> = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut t = a[k].clone();
            for j in 1..=min(k, b.len() - 1) {
                t -= &b[j] * &q[k - j];
            }
            q.push((t * &inv_b0).mod_floor(&m));
        }
        let poly = self.den.len() == 1;
        let coeffs = q.iter().map(|c| Q2::from_int(c, prec)).collect();
        Series { coeffs, tail_zero: poly && self.num.len() <= d + 1 }
    }

    /// Exact `mu` of the series: the valuation of the numerator's content.
    pub fn mu(&self) -> Option<i64> {
        let g = self.num.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        v2(&g)
    }

    fn at_unit(&self, k: u32) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
        let (pr, pi) = substitute_unit(&self.num, k);
        let (qr, qi) = substitute_unit(&self.den, k);
        let qi_neg: Vec<BigInt> = qi.iter().map(|c| -c).collect();
        let re = trim(sub_poly(&pmul(&pr, &qr), &pmul(&pi, &qi_neg)));
        let im = trim(add_poly(&pmul(&pi, &qr), &pmul(&pr, &qi_neg)));
        let den = trim(add_poly(&pmul(&qr, &qr), &pmul(&qi, &qi)));
        (re, im, den)
    }

    /// Odd part `(R(T) - R(-T))/2`: the restriction to the units.
    pub fn units_part(&self) -> RationalDatum {
        let qm = substitute_unit(&self.den, 2).0;
        let n = pmul(&self.num, &qm);
        let odd: Vec<BigInt> = n.iter().enumerate().map(|(j, c)| if j % 2 == 1 { c.clone() } else { BigInt::zero() }).collect();
        RationalDatum { num: trim(odd), den: trim(pmul(&self.den, &qm)) }
    }

    /// `R(1/T)`.
    pub fn involution(&self) -> RationalDatum {
        let dp = self.num.len() - 1;
        let dq = self.den.len() - 1;
        let mut num: Vec<BigInt> = self.num.iter().rev().cloned().collect();
        let mut den: Vec<BigInt> = self.den.iter().rev().cloned().collect();
        if dq >= dp {
            let mut pad = vec![BigInt::zero(); dq - dp];
            pad.extend(num);
            num = pad;
        } else {
            let mut pad = vec![BigInt::zero(); dp - dq];
            pad.extend(den);
            den = pad;
        }
        RationalDatum { num: trim(num), den: trim(den) }
    }

    /// `Im R(i T)`: the class of 1 minus the class of 3 mod 4.
    pub fn twist(&self) -> RationalDatum {
        let (_, im, den) = self.at_unit(1);
        RationalDatum { num: im, den }
    }

    pub fn add(&self, o: &RationalDatum) -> RationalDatum {
        let num = add_poly(&pmul(&self.num, &o.den), &pmul(&o.num, &self.den));
        RationalDatum { num: trim(num), den: trim(pmul(&self.den, &o.den)) }
    }

    pub fn scale(&self, c: i64) -> RationalDatum {
        RationalDatum { num: self.num.iter().map(|x| x * c).collect(), den: self.den.clone() }
    }
}

fn add_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = max(a.len(), b.len());
    (0..n).map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()).collect()
}

fn sub_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = max(a.len(), b.len());
    (0..n).map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()).collect()
}

/// Both sides of the mu-identity for a rational datum.
#[derive(Clone, Debug, Serialize)]
pub struct SinnottCheck {
    pub lhs: MuLambda,
    pub rhs_mu: i64,
    pub rhs_series: MuLambda,
    pub holds: bool,
}

/// Compare `mu(L(F))` with `mu(F~ + F~ o (-1))`; the right side is exact, the left side is read
/// off the Gamma-transform truncated at degree `d` with coefficient precision `prec`.
pub fn sinnott_mu_identity_check(f: &RationalDatum, d: usize, prec: i64) -> Result<SinnottCheck, IwasawaError> {
    let ft = f.units_part();
    let rhs = ft.add(&ft.involution());
    let rhs_mu = rhs.mu().ok_or(IwasawaError::Uncertified)?;
    let len = 2 * prec as usize;
    let fs = ft.series(len, 2 * prec + 8 * d as i64);
    let tw = ft.twist().series(len, 2 * prec + 8 * d as i64);
    let g = gamma_transform_parts(&fs, &tw, 5, d)?;
    let lhs = g.series.mu_lambda();
    if !lhs.certified {
        return Err(IwasawaError::Uncertified);
    }
    let rhs_series = rhs.series(d, prec).mu_lambda();
    Ok(SinnottCheck { lhs, rhs_mu, rhs_series, holds: lhs.mu == rhs_mu })
}

/// Signed remainder of `x` modulo `2^e`, in `(-2^(e-1), 2^(e-1)]`.
pub fn centered(x: &BigInt, e: i64) -> BigInt {
    let m = pow2(e);
    let r = x.mod_floor(&m);
    if r > (&m >> 1usize) {
        r - m
    } else {
        r
    }
}

pub fn abs_centered(x: &BigInt, e: i64) -> BigInt {
    centered(x, e).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Q2 {
        Q2::from_i64(n, 64)
    }

    fn poly(c: &[i64], d: usize) -> Series2 {
        Series::from_poly(c.iter().map(|&x| q(x)).collect(), d, 64)
    }

    #[test]
    fn dirac_series() {
        assert!(Series2::dirac(0, 6, 64).agrees(&poly(&[1], 6)));
        assert!(Series2::dirac(1, 6, 64).agrees(&poly(&[1, 1], 6)));
        assert!(Series2::dirac(3, 6, 64).agrees(&poly(&[1, 3, 3, 1], 6)));
        let comb = DiracComb::new(vec![(3, 1), (5, 2)]);
        let want = Series2::dirac(3, 8, 64).add(&Series2::dirac(5, 8, 64).scale(&q(2)));
        assert!(comb.series(8, 64).agrees(&want));
        assert!(mahler(&inverse_mahler(&want)).agrees(&want));
    }

    #[test]
    fn mu_lambda_examples() {
        assert_eq!(poly(&[8, 2, 4, 1], 6).mu_lambda(), MuLambda { mu: 0, lambda: 3, certified: true });
        assert_eq!(poly(&[2, 4, 2], 6).mu_lambda(), MuLambda { mu: 1, lambda: 0, certified: true });
        assert!(!poly(&[], 4).mu_lambda().certified);
    }

    #[test]
    fn unit_restriction_and_involution() {
        assert!(restrict_units(&poly(&[1], 8)).unwrap().agrees(&poly(&[], 8)));
        assert!(restrict_units(&poly(&[1, 1], 8)).unwrap().agrees(&poly(&[1, 1], 8)));
        let f = Series2::dirac(5, 8, 64).add(&Series2::dirac(2, 8, 64));
        assert!(restrict_units(&f).unwrap().agrees(&Series2::dirac(5, 8, 64)));
        let inv = involution(&Series2::dirac(3, 8, 64)).unwrap();
        assert!(inv.agrees(&Series2::dirac(-3, 8, 64)));
    }

    #[test]
    fn class_restriction() {
        let d1 = Series2::dirac(1, 8, 64);
        let d3 = Series2::dirac(3, 8, 64);
        assert!(restrict_class(&d1, 1).unwrap().agrees(&d1));
        assert!(restrict_class(&d3, 1).unwrap().agrees(&poly(&[], 8)));
        assert!(restrict_class(&d3, 3).unwrap().agrees(&d3));
        assert!(teichmueller_twist(&d3).unwrap().agrees(&d3.neg()));
        let d5 = Series2::dirac(5, 8, 64);
        let sum = d5.add(&d3);
        assert!(teichmueller_twist(&sum).unwrap().agrees(&d5.sub(&d3)));
    }

    #[test]
    fn truncated_composition_caps_precision() {
        let f = RationalDatum::from_i64(&[1], &[4, -1]).unwrap().series(10, 64);
        let r = restrict_units(&f).unwrap();
        assert_eq!(r.coeff(10).prec(), 0);
        assert!(r.coeff(0).prec() >= 9);
    }

    #[test]
    fn gamma_transform_of_diracs() {
        let d = 8;
        let g = gamma_transform(&Series2::dirac(1, d, 96), 5, d).unwrap();
        assert!(g.series.agrees_to(&poly(&[1], d), 16));
        let g = gamma_transform(&Series2::dirac(5, d, 96), 5, d).unwrap();
        assert!(g.series.agrees_to(&poly(&[1, 1], d), 16));
        let g = gamma_transform(&Series2::dirac(3, d, 96), 5, d).unwrap();
        let t = log_q2(&Q2::from_i64(-3, 120)).div(&log_q2(&Q2::from_i64(5, 120)));
        let mut b = Q2::one(100);
        for n in 0..=d {
            assert!((&b - g.series.coeff(n)).with_prec(16).is_zero(), "coefficient {n}");
            b = &(&b * &(&t - &Q2::from_i64(n as i64, 100))) * &Q2::from_ratio(&BigInt::one(), &BigInt::from(n + 1), 100);
        }
    }

    #[test]
    fn rational_operators_match_series_operators() {
        let r = RationalDatum::from_i64(&[1, -2, 3], &[5, 0, 2]).unwrap();
        let d = 10;
        let s = r.series(d, 80);
        let exact_units = r.units_part().series(d, 80);
        let via = restrict_units(&s).unwrap();
        for k in 0..=d {
            let p = via.coeff(k).prec();
            assert!((via.coeff(k) - exact_units.coeff(k)).with_prec(p).is_zero());
        }
        let inv_exact = r.involution().series(d, 80);
        assert!(involution(&s).unwrap().agrees(&inv_exact));
        let tw_exact = r.units_part().twist().series(d, 80);
        let tw = teichmueller_twist(&exact_units).unwrap();
        for k in 0..=d {
            let p = tw.coeff(k).prec();
            assert!((tw.coeff(k) - tw_exact.coeff(k)).with_prec(p).is_zero(), "k={k}");
        }
    }

    #[test]
    fn sinnott_examples() {
        let one_plus_w = RationalDatum::from_i64(&[0, 1], &[1]).unwrap();
        let c = sinnott_mu_identity_check(&one_plus_w, 6, 24).unwrap();
        assert!(c.holds && c.rhs_mu == 0);
        let two_over = RationalDatum::from_i64(&[2], &[2, -1]).unwrap();
        let half = RationalDatum::from_i64(&[1], &[2, -1]).unwrap();
        let a = sinnott_mu_identity_check(&two_over, 6, 24).unwrap();
        let b = sinnott_mu_identity_check(&half, 6, 24).unwrap();
        assert!(a.holds && b.holds);
        assert_eq!(a.lhs.mu, b.lhs.mu + 1);
    }

    #[test]
    fn asymptote() {
        assert_eq!(iwasawa_asymptote_check(&[0, 0, 0], 0, 0, 0), Ok(0));
        assert_eq!(iwasawa_asymptote_check(&[5, 6, 7], 0, 0, 1), Ok(5));
        assert_eq!(iwasawa_asymptote_check(&[1, 2, 4], 0, 1, 0), Ok(0));
        assert_eq!(iwasawa_asymptote_check(&[1, 2, 5], 0, 1, 0), Err(IwasawaError::NoConsistentConstant));
    }

    #[test]
    fn property_suites_pass() {
        assert!(suites::mahler_suite(10, 1).passed);
        assert!(suites::gamma_suite(12, 16).unwrap().passed);
        let s = suites::sinnott_suite(20, 7, 6, 24);
        assert!(s.passed, "{:?}", s.witnesses);
        assert!(suites::scalar_shift_suite(20, 3).passed);
        assert!(suites::asymptote_suite().passed);
    }

    fn arb_series() -> impl Strategy<Value = Series2> {
        prop::collection::vec(-1000i64..1000, 1..10).prop_map(|c| {
            let d = 9;
            Series::from_poly(c.iter().map(|&x| Q2::from_i64(x, 48)).collect(), d, 48)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn involution_is_an_involution(f in arb_series()) {
            let g = involution(&involution(&f).unwrap()).unwrap();
            prop_assert!(g.agrees(&f));
        }

        #[test]
        fn classes_sum_to_whole(f in arb_series()) {
            let parts: Vec<Series2> = (0..4).map(|a| restrict_class(&f, a).unwrap()).collect();
            let all = parts[1..].iter().fold(parts[0].clone(), |s, p| s.add(p));
            prop_assert!(all.agrees(&f));
            let units = parts[1].add(&parts[3]);
            prop_assert!(units.agrees(&restrict_units(&f).unwrap()));
        }

        #[test]
        fn mu_shifts_with_scalars(f in arb_series(), k in 0i64..6, odd in 0i64..50) {
            let base = f.mu_lambda();
            prop_assume!(base.certified);
            let c = Q2::from_i64((2 * odd + 1) << k, 48);
            let scaled = f.scale(&c).mu_lambda();
            prop_assert_eq!(scaled.mu, base.mu + k);
            prop_assert_eq!(scaled.lambda, base.lambda);
        }

        #[test]
        fn gamma_transform_is_linear(a in 0i64..12, b in 0i64..12, wa in -5i64..5, wb in -5i64..5) {
            let d = 6;
            let comb = DiracComb::new(vec![(2 * a + 1, wa), (2 * b + 1, wb)]);
            let f = comb.series(30, 96);
            let gf = gamma_transform(&f, 5, d).unwrap().series;
            let ga = gamma_transform(&Series2::dirac(2 * a + 1, 30, 96), 5, d).unwrap().series;
            let gb = gamma_transform(&Series2::dirac(2 * b + 1, 30, 96), 5, d).unwrap().series;
            let lin = ga.scale(&Q2::from_i64(wa, 96)).add(&gb.scale(&Q2::from_i64(wb, 96)));
            prop_assert!(gf.agrees_to(&lin, 16));
        }
    }
}

/// Property sweeps and worked examples, as run by the command-line `verify iwasawa`.
pub mod suites {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use serde_json::{json, Value};

    #[derive(Clone, Debug, Serialize)]
    pub struct PropertyReport {
        pub property: String,
        pub parameters: Value,
        pub samples: usize,
        pub failures: usize,
        pub skipped: usize,
        pub witnesses: Vec<Value>,
        pub passed: bool,
    }

    impl PropertyReport {
        fn new(property: &str, parameters: Value, samples: usize, witnesses: Vec<Value>, skipped: usize) -> Self {
            let failures = witnesses.len();
            PropertyReport { property: property.into(), parameters, samples, failures, skipped, witnesses, passed: failures == 0 }
        }
    }

    fn check(witnesses: &mut Vec<Value>, ok: bool, what: impl FnOnce() -> Value) {
        if !ok {
            witnesses.push(what());
        }
    }

    /// Dirac images and the round trip `mahler(inverse_mahler(F)) = F` on random data.
    pub fn mahler_suite(samples: usize, seed: u64) -> PropertyReport {
        let (d, prec) = (12, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        let binom = |n: usize| -> Series2 {
            let mut c = Vec::new();
            let mut b = BigInt::one();
            for k in 0..=n {
                c.push(Q2::from_int(&b, prec));
                b = b * BigInt::from(n - k) / BigInt::from(k + 1);
            }
            Series::from_poly(c, d, prec)
        };
        for a in [0i64, 1, 3] {
            let ok = Series2::dirac(a, d, prec).agrees(&binom(a as usize));
            check(&mut bad, ok, || json!({ "dirac": a }));
        }
        for i in 0..samples {
            let m: Vec<Q2> = (0..=d).map(|_| Q2::from_i64(rng.gen_range(-1000..1000), prec)).collect();
            let f = mahler(&m);
            let back = inverse_mahler(&f);
            let ok = back.iter().zip(&m).all(|(x, y)| (x - y).is_zero()) && mahler(&back).agrees(&f);
            check(&mut bad, ok, || json!({ "sample": i }));
            let atoms: Vec<(i64, i64)> = (0..3).map(|_| (rng.gen_range(0..40), rng.gen_range(-9..10))).collect();
            let comb = DiracComb::new(atoms.clone());
            let moments: Vec<Q2> = comb.binomial_moments(d).iter().map(|b| Q2::from_int(b, prec)).collect();
            let ok = mahler(&moments).agrees(&comb.series(d, prec));
            check(&mut bad, ok, || json!({ "sample": i, "atoms": atoms }));
        }
        PropertyReport::new("mahler round trip and Dirac images", json!({ "D": d, "N": prec, "seed": seed }), samples + 3, bad, 0)
    }

    /// Restriction, twist and Gamma-transform examples, including `L(delta_5) = 1 + w` for `u = 5`.
    pub fn gamma_suite(d: usize, n: i64) -> Result<PropertyReport, IwasawaError> {
        let p_in = 8 + 2 * (2 * d as i64 + n);
        let mut bad = Vec::new();
        let one_w = Series::from_poly(vec![Q2::one(p_in), Q2::one(p_in)], d, p_in);
        let g5 = gamma_transform(&Series2::dirac(5, d, p_in), 5, d)?;
        check(&mut bad, g5.series.agrees_to(&one_w, n), || json!({ "example": "L(delta_5) = 1 + w" }));
        let g1 = gamma_transform(&Series2::dirac(1, d, p_in), 5, d)?;
        check(&mut bad, g1.series.agrees_to(&Series::constant(Q2::one(p_in), d), n), || json!({ "example": "L(delta_1) = 1" }));
        let g3 = gamma_transform(&Series2::dirac(3, d, p_in), 5, d)?;
        let t = log_q2(&Q2::from_i64(-3, p_in + 32)).div(&log_q2(&Q2::from_i64(5, p_in + 32)));
        let mut b = Q2::one(p_in + 16);
        let mut ok = true;
        for k in 0..=d {
            let c = g3.series.coeff(k);
            let p = min(c.prec(), n);
            ok &= (&b - c).with_prec(p).is_zero();
            b = &(&b * &(&t - &Q2::from_i64(k as i64, p_in + 16))) * &Q2::from_ratio(&BigInt::one(), &BigInt::from(k + 1), p_in + 16);
        }
        check(&mut bad, ok, || json!({ "example": "L(delta_3) = (1 + w)^t, t = log(-3)/log(5)" }));
        let d1 = Series2::dirac(1, d, p_in);
        let d3 = Series2::dirac(3, d, p_in);
        let d5 = Series2::dirac(5, d, p_in);
        check(&mut bad, restrict_units(&Series::constant(Q2::one(p_in), d))?.agrees(&Series::from_poly(vec![], d, p_in)), || {
            json!({ "example": "restrict_units(1) = 0" })
        });
        check(&mut bad, restrict_units(&d1)?.agrees(&d1), || json!({ "example": "restrict_units(1 + w) = 1 + w" }));
        check(&mut bad, restrict_class(&d3, 1)?.agrees(&Series::from_poly(vec![], d, p_in)), || json!({ "example": "delta_3 on 1 + 4Z_2" }));
        check(&mut bad, teichmueller_twist(&d3)?.agrees(&d3.neg()), || json!({ "example": "twist(delta_3)" }));
        check(&mut bad, teichmueller_twist(&d5.add(&d3))?.agrees(&d5.sub(&d3)), || json!({ "example": "twist(delta_5 + delta_3)" }));
        let mixed = gamma_transform(&d5.add(&d1.scale(&Q2::from_i64(3, p_in))), 5, d)?;
        let lin = g5.series.add(&g1.series.scale(&Q2::from_i64(3, p_in)));
        check(&mut bad, mixed.series.agrees_to(&lin, n), || json!({ "example": "linearity" }));
        Ok(PropertyReport::new("restriction, twist and Gamma-transform examples", json!({ "D": d, "N": n, "u": 5 }), 10, bad, 0))
    }

    fn random_datum(rng: &mut ChaCha8Rng) -> RationalDatum {
        loop {
            let dn = rng.gen_range(0..=4);
            let dd = rng.gen_range(0..=4);
            let num: Vec<i64> = (0..=dn).map(|_| rng.gen_range(-16..=16)).collect();
            let den: Vec<i64> = (0..=dd).map(|_| rng.gen_range(-16..=16)).collect();
            if let Ok(r) = RationalDatum::from_i64(&num, &den) {
                return r;
            }
        }
    }

    /// `mu(L(F)) = mu(F~ + F~ o (-1))` on pseudorandom `P(1 + w)/Q(1 + w)`. Samples whose right side
    /// vanishes identically carry no information and are redrawn.
    pub fn sinnott_suite(samples: usize, seed: u64, d: usize, prec: i64) -> PropertyReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        let mut done = 0;
        let mut skipped = 0;
        while done < samples {
            let f = random_datum(&mut rng);
            let ft = f.units_part();
            if ft.add(&ft.involution()).mu().is_none() {
                skipped += 1;
                continue;
            }
            done += 1;
            match sinnott_mu_identity_check(&f, d, prec) {
                Ok(c) if c.holds => {}
                Ok(c) => bad.push(json!({ "num": f.num.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "den": f.den.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "lhs": c.lhs, "rhs_mu": c.rhs_mu })),
                Err(e) => bad.push(json!({ "num": f.num.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "den": f.den.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "error": e.to_string() })),
            }
        }
        PropertyReport::new("mu(L(F)) = mu(F~ + F~ o (-1))", json!({ "D": d, "N": prec, "seed": seed, "u": 5 }), samples, bad, skipped)
    }

    /// `mu_lambda(c F) = mu_lambda(F) + (ord_2 c, 0)`.
    pub fn scalar_shift_suite(samples: usize, seed: u64) -> PropertyReport {
        let (d, prec) = (10, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        let mut done = 0;
        let mut skipped = 0;
        while done < samples {
            let c: Vec<Q2> = (0..=d).map(|_| Q2::from_i64(rng.gen_range(-4096..4096), prec)).collect();
            let f = Series::from_poly(c, d, prec);
            let base = f.mu_lambda();
            if !base.certified {
                skipped += 1;
                continue;
            }
            done += 1;
            let k = rng.gen_range(0..8i64);
            let s = (2 * rng.gen_range(0..500i64) + 1) << k;
            let scaled = f.scale(&Q2::from_i64(s, prec)).mu_lambda();
            if scaled.mu != base.mu + k || scaled.lambda != base.lambda {
                bad.push(json!({ "scalar": s, "base": base, "scaled": scaled }));
            }
        }
        PropertyReport::new("mu_lambda(c F) = mu_lambda(F) + (ord c, 0)", json!({ "D": d, "N": prec, "seed": seed }), samples, bad, skipped)
    }

    pub fn asymptote_suite() -> PropertyReport {
        let cases: [(&[i64], i64, i64, Result<i64, IwasawaError>); 4] = [
            (&[0, 0, 0], 0, 0, Ok(0)),
            (&[5, 6, 7], 0, 1, Ok(5)),
            (&[1, 2, 4], 1, 0, Ok(0)),
            (&[1, 2, 5], 1, 0, Err(IwasawaError::NoConsistentConstant)),
        ];
        let mut bad = Vec::new();
        for (ords, mu, lambda, want) in cases {
            let got = iwasawa_asymptote_check(ords, 0, mu, lambda);
            check(&mut bad, got == want, || json!({ "ords": ords, "mu": mu, "lambda": lambda, "got": format!("{got:?}") }));
        }
        PropertyReport::new("ord_n = 2^n mu + lambda n + c", json!({}), 4, bad, 0)
    }
}
