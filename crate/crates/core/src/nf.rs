//! The ring class field as an absolute number field, with exact arithmetic and 2-adic splitting data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bigcomplex::{poly_roots, recognize_rational, BigComplex};
use crate::cm::{self, HilbertClassPoly};
use crate::padic::{hensel_roots, Local2, Local2Ring, LocalError};
use crate::poly::{self, format_poly, Gf2Poly, QPoly, ZPoly};

#[derive(Debug, Error)]
pub enum NfError {
    #[error("no primitive element j + k*alpha with odd k <= {max_k} gives a polynomial squarefree over Q and mod 2 (q = {q})")]
    NoPrimitiveElement { q: u64, max_k: u32 },
    #[error("defining polynomial must be monic of degree {expected}, got degree {got}")]
    BadDegree { expected: usize, got: usize },
    #[error("defining polynomial must be monic")]
    NotMonic,
    #[error("defining polynomial is not squarefree")]
    NotSquarefree,
    #[error("defining polynomial has a real root")]
    NotTotallyComplex,
    #[error("index divisible by 2: defining polynomial is not squarefree mod 2, choose another primitive element")]
    IndexDivisibleBy2,
    #[error("local factors mod 2 have unequal degrees {0:?}")]
    UnequalLocalDegrees(Vec<usize>),
    #[error("p-block and p*-block have sizes {0} and {1}")]
    UnbalancedBlocks(usize, usize),
    #[error("could not locate (1+sqrt(-q))/2 in the field")]
    OmegaNotFound,
    #[error("division by zero in the number field")]
    DivisionByZero,
    #[error(transparent)]
    Cm(#[from] cm::CmError),
    #[error(transparent)]
    Local(#[from] LocalError),
}

/// How the defining polynomial was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldOrigin {
    /// `x^2 + x + (q+1)/4` for class number one.
    Quadratic,
    /// Norm of `H(x - k*alpha)` from `Q(alpha)` to `Q`.
    Compositum { k: u32 },
    /// Supplied from outside (a data file or a published polynomial).
    External,
}

/// Exact element in the power basis `1, theta, ..., theta^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem(pub Vec<BigRational>);

impl FieldElem {
    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn is_integral_coords(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|c| c.to_string()).collect()
    }

    /// Display as a polynomial in `var`.
    pub fn format(&self, var: &str) -> String {
        let den = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: ZPoly = self.0.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let body = format_poly(&num, var);
        if den.is_one() {
            body
        } else {
            format!("({body})/{den}")
        }
    }
}

#[derive(Clone, Debug)]
pub struct NumberField {
    q: u64,
    h: usize,
    poly: ZPoly,
    origin: FieldOrigin,
    omega: FieldElem,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl NumberField {
    fn checked(q: u64, h: usize, mut poly: ZPoly, origin: FieldOrigin) -> Result<Self, NfError> {
        poly::trim(&mut poly);
        let n = poly::degree(&poly).unwrap_or(0);
        if n != 2 * h {
            return Err(NfError::BadDegree { expected: 2 * h, got: n });
        }
        if !poly[n].is_one() {
            return Err(NfError::NotMonic);
        }
        if !poly::is_squarefree_q(&poly::to_q(&poly)) {
            return Err(NfError::NotSquarefree);
        }
        let c: Vec<BigComplex> = poly.iter().map(|x| BigComplex::from_bigint(x, 128)).collect();
        if poly_roots(&c, 128).iter().any(|z| z.im.to_f64().abs() < 1e-20) {
            return Err(NfError::NotTotallyComplex);
        }
        let placeholder = FieldElem(vec![BigRational::zero(); n]);
        Ok(NumberField { q, h, poly, origin, omega: placeholder })
    }

    /// Adopt an externally supplied defining polynomial of `H` for discriminant `-q`.
    pub fn from_external(q: u64, h: usize, poly: ZPoly) -> Result<Self, NfError> {
        let mut nf = Self::checked(q, h, poly, FieldOrigin::External)?;
        nf.omega = nf.find_omega_numerically()?;
        Ok(nf)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn degree(&self) -> usize {
        2 * self.h
    }

    pub fn poly(&self) -> &ZPoly {
        &self.poly
    }

    pub fn origin(&self) -> &FieldOrigin {
        &self.origin
    }

    /// The element `(1 + sqrt(-q))/2`.
    pub fn omega(&self) -> &FieldElem {
        &self.omega
    }

    pub fn discriminant(&self) -> BigInt {
        poly::discriminant_z(&self.poly)
    }

    pub fn poly_string(&self) -> String {
        format_poly(&self.poly, "x")
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![BigRational::zero(); self.degree()])
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElem {
        let mut c = vec![BigRational::zero(); self.degree()];
        c[0] = r;
        FieldElem(c)
    }

    pub fn gen(&self) -> FieldElem {
        self.from_qpoly(&[BigRational::zero(), BigRational::one()])
    }

    pub fn from_ints(&self, c: &[i64]) -> FieldElem {
        self.from_qpoly(&c.iter().map(|&x| rat(x)).collect::<Vec<_>>())
    }

    /// Reduce a polynomial in the generator modulo the defining polynomial.
    pub fn from_qpoly(&self, p: &[BigRational]) -> FieldElem {
        let n = self.degree();
        let mut c: Vec<BigRational> = p.to_vec();
        if c.len() > n {
            for d in (n..c.len()).rev() {
                let top = std::mem::replace(&mut c[d], BigRational::zero());
                if top.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let t = &top * BigRational::from_integer(self.poly[i].clone());
                    c[d - n + i] -= t;
                }
            }
            c.truncate(n);
        }
        c.resize(n, BigRational::zero());
        FieldElem(c)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &FieldElem, s: &BigRational) -> FieldElem {
        FieldElem(a.0.iter().map(|x| x * s).collect())
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.degree();
        let mut c = vec![BigRational::zero(); 2 * n];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        self.from_qpoly(&c)
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem, NfError> {
        if a.is_zero() {
            return Err(NfError::DivisionByZero);
        }
        let (g, s) = inverse_mod(&a.0, &poly::to_q(&self.poly));
        if poly::degree(&g) != Some(0) {
            return Err(NfError::DivisionByZero);
        }
        let s = poly::scale(&s, &(BigRational::one() / &g[0]));
        Ok(self.from_qpoly(&s))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, NfError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElem, e: i64) -> Result<FieldElem, NfError> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Norm to `Q` as the resultant with the (monic) defining polynomial.
    pub fn norm(&self, a: &FieldElem) -> BigRational {
        let mut p = a.0.clone();
        poly::trim(&mut p);
        poly::resultant_q(&poly::to_q(&self.poly), &p)
    }

    /// Power sums of the roots of the defining polynomial by Newton's identities.
    pub fn power_sums(&self) -> Vec<BigInt> {
        let n = self.degree();
        let a = &self.poly;
        let mut p = vec![BigInt::from(n)];
        for k in 1..n {
            let mut s = BigInt::from(k) * &a[n - k];
            for i in 1..k {
                s += &a[n - i] * &p[k - i];
            }
            p.push(-s);
        }
        p
    }

    pub fn trace(&self, a: &FieldElem) -> BigRational {
        self.power_sums().iter().zip(&a.0).map(|(p, c)| c * BigRational::from_integer(p.clone())).sum()
    }

    /// One complex root of the defining polynomial from each conjugate pair, upper half plane first,
    /// followed by their conjugates.
    pub fn complex_roots(&self, prec: u32) -> Vec<BigComplex> {
        let c: Vec<BigComplex> = self.poly.iter().map(|x| BigComplex::from_bigint(x, prec)).collect();
        let roots = poly_roots(&c, prec);
        let mut upper: Vec<BigComplex> = roots.into_iter().filter(|z| z.im.is_sign_positive()).collect();
        upper.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        let lower: Vec<BigComplex> = upper.iter().map(|z| z.conj()).collect();
        upper.into_iter().chain(lower).collect()
    }

    pub fn embed(&self, a: &FieldElem, root: &BigComplex) -> BigComplex {
        let prec = root.prec();
        let mut acc = BigComplex::zero(prec);
        for c in a.0.iter().rev() {
            acc = &(&acc * root) + &BigComplex::from_ratio(c.numer(), c.denom(), prec);
        }
        acc
    }

    /// Coordinates of the element taking the given values at all complex roots, if they are rational
    /// with denominator at most `max_den`.
    pub fn recognize(&self, roots: &[BigComplex], values: &[BigComplex], max_den: u64) -> Option<FieldElem> {
        let coords = vandermonde_solve(roots, values)?;
        let mut out = Vec::with_capacity(coords.len());
        for c in &coords {
            if c.im.to_f64().abs() > 1e-20 {
                return None;
            }
            out.push(recognize_rational(&c.re, max_den)?);
        }
        Some(FieldElem(out))
    }

    fn is_omega(&self, w: &FieldElem) -> bool {
        let c = BigRational::new(BigInt::from(self.q + 1), BigInt::from(4));
        let w2 = self.mul(w, w);
        let lhs = self.add(&self.sub(&w2, w), &self.from_rational(c));
        lhs.is_zero()
    }

    fn find_omega_numerically(&self) -> Result<FieldElem, NfError> {
        let prec = 256 + 64 * self.degree() as u32;
        let roots = self.complex_roots(prec);
        let h = self.h;
        let s = BigComplex::sqrt_neg(self.q, prec);
        for mask in 0u64..(1u64 << h) {
            let vals: Vec<BigComplex> = (0..2 * h)
                .map(|j| {
                    let pos = (mask >> (j % h)) & 1 == 0;
                    let v = if pos { s.clone() } else { -&s };
                    let v = if j >= h { v.conj() } else { v };
                    (&BigComplex::one(prec) + &v).div_i64(2)
                })
                .collect();
            if let Some(w) = self.recognize(&roots, &vals, 1u64 << 40) {
                if self.is_omega(&w) {
                    return Ok(w);
                }
            }
        }
        Err(NfError::OmegaNotFound)
    }
}

/// `(g, s)` with `s*a = g mod m` and `g = gcd(a, m)`.
fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> (QPoly, QPoly) {
    let mut r0: QPoly = m.to_vec();
    let mut r1: QPoly = a.to_vec();
    poly::trim(&mut r1);
    let mut s0: QPoly = vec![BigRational::zero()];
    let mut s1: QPoly = vec![BigRational::one()];
    while poly::degree(&r1).is_some() {
        let (q, r) = poly::divrem_q(&r0, &r1);
        let s = poly::sub(&s0, &poly::mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, s0)
}

/// Solve `sum_i c_i r_j^i = v_j` by Gaussian elimination with partial pivoting.
fn vandermonde_solve(roots: &[BigComplex], values: &[BigComplex]) -> Option<Vec<BigComplex>> {
    let n = roots.len();
    if n == 0 || values.len() != n {
        return None;
    }
    let prec = roots[0].prec();
    let mut a: Vec<Vec<BigComplex>> = roots
        .iter()
        .zip(values)
        .map(|(r, v)| {
            let mut row = Vec::with_capacity(n + 1);
            let mut p = BigComplex::one(prec);
            for _ in 0..n {
                row.push(p.clone());
                p = &p * r;
            }
            row.push(v.clone());
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs_f64().partial_cmp(&a[j][c].abs_f64()).unwrap())?;
        if a[piv][c].abs_f64() == 0.0 {
            return None;
        }
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = &a[r][c] * &inv;
            for k in c..=n {
                let t = &f * &a[c][k];
                a[r][k] = &a[r][k] - &t;
            }
        }
    }
    Some((0..n).map(|i| &a[i][n] * &a[i][i].recip()).collect())
}

/// Coefficients `u + v*alpha` over `Z[alpha]`, `alpha^2 = -alpha - c`.
#[derive(Clone, Debug, PartialEq)]
struct Quad {
    u: BigInt,
    v: BigInt,
}

impl Quad {
    fn zero() -> Self {
        Quad { u: BigInt::zero(), v: BigInt::zero() }
    }

    fn add(&self, o: &Quad) -> Quad {
        Quad { u: &self.u + &o.u, v: &self.v + &o.v }
    }

    fn mul(&self, o: &Quad, c: &BigInt) -> Quad {
        let vv = &self.v * &o.v;
        Quad { u: &self.u * &o.u - c * &vv, v: &self.u * &o.v + &self.v * &o.u - vv }
    }

    fn conj(&self) -> Quad {
        Quad { u: &self.u - &self.v, v: -self.v.clone() }
    }
}

fn quad_poly_mul(a: &[Quad], b: &[Quad], c: &BigInt) -> Vec<Quad> {
    let mut r = vec![Quad::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] = r[i + j].add(&x.mul(y, c));
        }
    }
    r
}

/// `N_{K/Q}(H(x - k*alpha))` for `alpha = (-1 + sqrt(-q))/2`.
pub fn compositum_poly(hcp: &[BigInt], q: u64, k: u32) -> ZPoly {
    let c = BigInt::from((q + 1) / 4);
    let lin = [Quad { u: BigInt::zero(), v: -BigInt::from(k) }, Quad { u: BigInt::one(), v: BigInt::zero() }];
    let mut acc = vec![Quad::zero()];
    for coef in hcp.iter().rev() {
        acc = quad_poly_mul(&acc, &lin, &c);
        acc[0] = acc[0].add(&Quad { u: coef.clone(), v: BigInt::zero() });
    }
    let conj: Vec<Quad> = acc.iter().map(|x| x.conj()).collect();
    let prod = quad_poly_mul(&acc, &conj, &c);
    let mut out: ZPoly = prod
        .into_iter()
        .map(|x| {
            debug_assert!(x.v.is_zero());
            x.u
        })
        .collect();
    poly::trim(&mut out);
    out
}

/// `H` as an absolute field: the compositum `K(j)` via a primitive element `j + k*alpha`.
pub fn build_h(hcp: &HilbertClassPoly) -> Result<NumberField, NfError> {
    cm::check_q(hcp.q)?;
    let q = hcp.q;
    let h = hcp.h();
    let c = BigInt::from((q + 1) / 4);
    if h == 1 {
        let mut nf = NumberField::checked(q, 1, vec![c, BigInt::one(), BigInt::one()], FieldOrigin::Quadratic)?;
        nf.omega = nf.from_ints(&[1, 1]);
        return Ok(nf);
    }
    const MAX_K: u32 = 32;
    for k in (1..=MAX_K).step_by(2) {
        let f = compositum_poly(&hcp.coeffs, q, k);
        if !Gf2Poly::from_zpoly(&f).is_squarefree() || !poly::is_squarefree_q(&poly::to_q(&f)) {
            continue;
        }
        let mut nf = NumberField::checked(q, h, f, FieldOrigin::Compositum { k })?;
        nf.omega = omega_in_compositum(&nf, &hcp.coeffs, k)?;
        return Ok(nf);
    }
    Err(NfError::NoPrimitiveElement { q, max_k: MAX_K })
}

/// Recover `alpha` from `H(theta - k*alpha) = 0`: reducing `H(theta - kY)` modulo `Y^2 + Y + c`
/// leaves `A + B*Y`, and `alpha = -A/B`.
fn omega_in_compositum(nf: &NumberField, hcp: &[BigInt], k: u32) -> Result<FieldElem, NfError> {
    let c = BigRational::from_integer(BigInt::from((nf.q + 1) / 4));
    let theta = nf.gen();
    let kk = rat(k as i64);
    let mut a0 = nf.zero();
    let mut a1 = nf.zero();
    for coef in hcp.iter().rev() {
        // (a0 + a1 Y)(theta - k Y) with Y^2 = -Y - c
        let t0 = nf.add(&nf.mul(&a0, &theta), &nf.scale(&a1, &(&kk * &c)));
        let t1 = nf.add(&nf.sub(&nf.mul(&a1, &theta), &nf.scale(&a0, &kk)), &nf.scale(&a1, &kk));
        a0 = nf.add(&t0, &nf.from_rational(BigRational::from_integer(coef.clone())));
        a1 = t1;
    }
    let alpha = nf.neg(&nf.div(&a0, &a1)?);
    let omega = nf.add(&alpha, &nf.one());
    if !nf.is_omega(&omega) {
        return Err(NfError::OmegaNotFound);
    }
    Ok(omega)
}

/// One irreducible factor of the defining polynomial over the 2-adic integers.
#[derive(Clone, Debug, Serialize)]
pub struct LocalFactor {
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub lift: ZPoly,
    #[serde(skip)]
    pub residue: Gf2Poly,
    pub residue_str: String,
    pub degree: usize,
    pub above_p: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoAdicSplitting {
    pub prec: u32,
    pub f: usize,
    pub factors: Vec<LocalFactor>,
}

impl TwoAdicSplitting {
    pub fn p_block(&self) -> Vec<&LocalFactor> {
        self.factors.iter().filter(|x| x.above_p).collect()
    }

    pub fn pstar_block(&self) -> Vec<&LocalFactor> {
        self.factors.iter().filter(|x| !x.above_p).collect()
    }

    /// Unramified local ring attached to the first factor of the `p`-block.
    pub fn p_ring(&self, cap: u32) -> Result<std::sync::Arc<Local2Ring>, NfError> {
        let first = self.p_block()[0];
        Ok(Local2Ring::new(&first.lift, cap)?)
    }
}

/// Factor the defining polynomial over `Z_2` to precision `2^n`, labelling the factors above `p`.
pub fn split_2(nf: &NumberField, n: u32) -> Result<TwoAdicSplitting, NfError> {
    let res = Gf2Poly::from_zpoly(&nf.poly);
    if !res.is_squarefree() {
        return Err(NfError::IndexDivisibleBy2);
    }
    let fac = res.factor_squarefree();
    let degs: Vec<usize> = fac.iter().map(|g| g.degree().unwrap()).collect();
    if degs.iter().any(|&d| d != degs[0]) {
        return Err(NfError::UnequalLocalDegrees(degs));
    }
    let lifts = poly::hensel_lift_all(&nf.poly, &fac, n);
    let mut factors = Vec::with_capacity(fac.len());
    for (g, lift) in fac.iter().zip(lifts) {
        let ring = Local2Ring::new(&lift, n)?;
        let w = Local2::eval_qpoly(nf.omega.coords(), &Local2::beta(&ring))?;
        let above_p = w.residue().is_zero();
        factors.push(LocalFactor {
            residue_str: g.to_string_var("x"),
            lift,
            residue: *g,
            degree: g.degree().unwrap(),
            above_p,
        });
    }
    let np = factors.iter().filter(|x| x.above_p).count();
    if 2 * np != factors.len() {
        return Err(NfError::UnbalancedBlocks(np, factors.len() - np));
    }
    Ok(TwoAdicSplitting { prec: n, f: degs[0], factors })
}

/// Evidence that a second defining polynomial describes the same field, checked 2-adically.
#[derive(Clone, Debug, Serialize)]
pub struct FieldAgreement {
    pub same_degree: bool,
    pub discriminants_odd: bool,
    pub roots_in_completion: usize,
    pub prec: u32,
}

impl FieldAgreement {
    /// The other polynomial splits completely in the completion at a prime above `p`,
    /// as it must when both define the same Galois field.
    pub fn holds(&self, n: usize) -> bool {
        self.same_degree && self.discriminants_odd && self.roots_in_completion == n
    }
}

pub fn compare_fields_2adic(
    nf: &NumberField,
    split: &TwoAdicSplitting,
    other: &[BigInt],
    prec: u32,
) -> Result<FieldAgreement, NfError> {
    let same_degree = poly::degree(other) == Some(nf.degree());
    let odd = |p: &[BigInt]| poly::discriminant_z(p).is_odd();
    let discriminants_odd = odd(&nf.poly) && odd(other);
    let ring = split.p_ring(prec)?;
    let roots = if Gf2Poly::from_zpoly(other).is_squarefree() { hensel_roots(other, &ring, prec)? } else { vec![] };
    let verified = roots.iter().filter(|r| Local2::eval_zpoly(other, r).is_zero()).count();
    Ok(FieldAgreement { same_degree, discriminants_odd, roots_in_completion: verified, prec })
}

/// Parse coefficient strings (ascending) into an integer polynomial.
pub fn parse_zpoly(v: &[String]) -> Result<ZPoly, String> {
    v.iter().map(|s| s.trim().parse::<BigInt>().map_err(|e| format!("{s}: {e}"))).collect()
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: BigInt = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            if b.is_zero() {
                return Err(format!("{s}: zero denominator"));
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|e| format!("{s}: {e}"))?)),
    }
}

pub fn abs_is_one(r: &BigRational) -> bool {
    r.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::hilbert_class_poly_default;
    use crate::poly::zpoly;

    fn published_sextic() -> ZPoly {
        zpoly(&[1, -3, 5, -5, 5, -3, 1])
    }

    #[test]
    fn q7_is_quadratic() {
        let nf = build_h(&hilbert_class_poly_default(7).unwrap()).unwrap();
        assert_eq!(nf.poly(), &zpoly(&[2, 1, 1]));
        assert_eq!(nf.norm(&nf.gen()), rat(2));
        assert_eq!(nf.trace(&nf.one()), rat(2));
        assert_eq!(nf.omega(), &nf.from_ints(&[1, 1]));
    }

    #[test]
    fn q23_compositum() {
        let nf = build_h(&hilbert_class_poly_default(23).unwrap()).unwrap();
        assert_eq!(nf.degree(), 6);
        assert!(nf.discriminant().is_odd());
        assert_eq!(nf.trace(&nf.one()), rat(6));
        let sp = split_2(&nf, 64).unwrap();
        assert_eq!(sp.f, 3);
        assert_eq!(sp.factors.len(), 2);
        let agree = compare_fields_2adic(&nf, &sp, &published_sextic(), 64).unwrap();
        assert!(agree.holds(6), "{agree:?}");
    }

    #[test]
    fn real_roots_are_rejected() {
        let err = NumberField::from_external(23, 3, zpoly(&[-1, 2, 0, 0, 0, 0, 1])).unwrap_err();
        assert!(matches!(err, NfError::NotTotallyComplex), "{err}");
    }

    #[test]
    fn published_sextic_units_have_unit_norm() {
        let nf = NumberField::from_external(23, 3, published_sextic()).unwrap();
        let e1 = nf.from_ints(&[0, 2, -1, 2, -2, 1]);
        let e2 = nf.from_ints(&[2, -2, 3, -2, 1]);
        assert!(abs_is_one(&nf.norm(&e1)));
        assert!(abs_is_one(&nf.norm(&e2)));
        // e1 + 1 happens to be a unit as well; e1 + 2 has norm 121
        assert!(abs_is_one(&nf.norm(&nf.add(&e1, &nf.one()))));
        let bad = nf.add(&e1, &nf.from_ints(&[2]));
        assert_eq!(nf.norm(&bad), rat(121));
        let sp = split_2(&nf, 32).unwrap();
        assert_eq!(sp.factors.iter().map(|f| f.residue.0).collect::<Vec<_>>(), vec![0b1011, 0b1101]);
    }

    #[test]
    fn inverse_and_power() {
        let nf = NumberField::from_external(23, 3, published_sextic()).unwrap();
        let x = nf.from_ints(&[3, 0, 1, 7]);
        let y = nf.inv(&x).unwrap();
        assert_eq!(nf.mul(&x, &y), nf.one());
        assert_eq!(nf.pow(&x, -2).unwrap(), nf.mul(&y, &y));
        assert!(nf.inv(&nf.zero()).is_err());
    }

    #[test]
    fn local_degrees_match_class_group_order() {
        for q in [7u64, 23, 31] {
            let hcp = hilbert_class_poly_default(q).unwrap();
            let nf = build_h(&hcp).unwrap();
            let sp = split_2(&nf, 32).unwrap();
            let f = cm::prime_above_2_order(&cm::class_group(q).unwrap());
            assert_eq!(sp.f, f, "q={q}");
            assert_eq!(sp.factors.len(), 2 * nf.h() / f);
            assert!(sp.factors.iter().all(|x| x.degree == f));
        }
    }

    #[test]
    fn trace_matches_complex_embeddings() {
        let nf = build_h(&hilbert_class_poly_default(31).unwrap()).unwrap();
        let x = nf.from_ints(&[1, -2, 0, 5, 1, 3]);
        let roots = nf.complex_roots(200);
        let s = roots.iter().fold(BigComplex::zero(200), |acc, r| &acc + &nf.embed(&x, r));
        let t = nf.trace(&x);
        assert!((s.re.to_f64() - t.numer().to_string().parse::<f64>().unwrap()).abs() < 1e-20);
    }
}
