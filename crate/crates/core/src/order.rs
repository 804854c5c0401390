//! Orders in the number field, the Round 2 enlargement to the maximal order, and an LLL-reduced
//! integral basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rug::Float;
use thiserror::Error;

use crate::bigcomplex::BigComplex;
use crate::linalg::{self, IMat, QMat};
use crate::lll;
use crate::nf::{FieldElem, FieldOrigin, NumberField};

#[derive(Debug, Error)]
pub enum OrderError {
    #[error("elements do not span a full-rank lattice")]
    Degenerate,
    #[error("discriminant quotient {0} is not a perfect square")]
    NotSquare(BigInt),
    #[error("index has a cofactor {0} without small prime factors")]
    IndexNotSmooth(BigInt),
    #[error("maximal order discriminant {got} differs from the expected {expected}")]
    WrongDiscriminant { got: BigInt, expected: BigInt },
}

/// Full-rank `Z`-lattice in the field closed under multiplication.
#[derive(Clone, Debug)]
pub struct Order {
    basis: Vec<FieldElem>,
    to_coords: QMat,
}

impl Order {
    /// Order spanned by the given elements (which must generate a ring containing 1).
    pub fn from_span(nf: &NumberField, gens: &[FieldElem]) -> Result<Order, OrderError> {
        let n = nf.degree();
        let den = gens
            .iter()
            .flat_map(|g| g.coords().iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let rows: IMat = gens
            .iter()
            .map(|g| g.coords().iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        let h = linalg::hnf(&rows);
        if h.len() != n {
            return Err(OrderError::Degenerate);
        }
        let basis: Vec<FieldElem> = h
            .iter()
            .map(|r| FieldElem(r.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect()))
            .collect();
        Self::from_basis(basis)
    }

    pub fn from_basis(basis: Vec<FieldElem>) -> Result<Order, OrderError> {
        let m: QMat = basis.iter().map(|b| b.coords().to_vec()).collect();
        let to_coords = linalg::inverse_q(&m).ok_or(OrderError::Degenerate)?;
        Ok(Order { basis, to_coords })
    }

    pub fn basis(&self) -> &[FieldElem] {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    /// Rational coordinates of `x` in the order basis.
    pub fn coords(&self, x: &FieldElem) -> Vec<BigRational> {
        linalg::vec_mul_q(x.coords(), &self.to_coords)
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        self.coords(x).iter().all(|c| c.is_integer())
    }

    pub fn element(&self, nf: &NumberField, c: &[BigInt]) -> FieldElem {
        let mut acc = nf.zero();
        for (b, x) in self.basis.iter().zip(c) {
            if !x.is_zero() {
                acc = nf.add(&acc, &nf.scale(b, &BigRational::from_integer(x.clone())));
            }
        }
        acc
    }

    pub fn discriminant(&self, nf: &NumberField) -> BigInt {
        let n = self.degree();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let t = nf.trace(&nf.mul(&self.basis[i], &self.basis[j]));
                m[i][j] = t.clone();
                m[j][i] = t;
            }
        }
        let d = linalg::det_q(&m);
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// `mult[i][j]` = coordinates of `basis[i] * basis[j]`.
    fn mult_table(&self, nf: &NumberField) -> Vec<Vec<Vec<BigInt>>> {
        let n = self.degree();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = self.coords(&nf.mul(&self.basis[i], &self.basis[j]));
                        c.into_iter().map(|x| x.to_integer()).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

fn mul_coords(t: &[Vec<Vec<BigInt>>], a: &[BigInt], b: &[BigInt], p: Option<&BigInt>) -> Vec<BigInt> {
    let n = a.len();
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if b[j].is_zero() {
                continue;
            }
            let s = &a[i] * &b[j];
            for k in 0..n {
                out[k] += &s * &t[i][j][k];
            }
        }
    }
    match p {
        Some(p) => out.into_iter().map(|x| x.mod_floor(p)).collect(),
        None => out,
    }
}

fn pow_coords(t: &[Vec<Vec<BigInt>>], one: &[BigInt], a: &[BigInt], e: &BigInt, p: &BigInt) -> Vec<BigInt> {
    let mut acc = one.to_vec();
    for i in (0..e.bits()).rev() {
        acc = mul_coords(t, &acc, &acc, Some(p));
        if e.bit(i) {
            acc = mul_coords(t, &acc, a, Some(p));
        }
    }
    acc
}

fn transpose(a: &IMat) -> IMat {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// One Round 2 pass at `p`: the ring of multipliers of the `p`-radical. Returns `None` when the
/// order is already `p`-maximal.
fn enlarge_at(nf: &NumberField, o: &Order, p: &BigInt) -> Result<Option<Order>, OrderError> {
    let n = o.degree();
    let t = o.mult_table(nf);
    let one: Vec<BigInt> = o.coords(&nf.one()).into_iter().map(|x| x.to_integer()).collect();
    let mut e = p.clone();
    while e < BigInt::from(n) {
        e *= p;
    }
    let frob: IMat = (0..n)
        .map(|i| {
            let mut unit = vec![BigInt::zero(); n];
            unit[i] = BigInt::one();
            pow_coords(&t, &one, &unit, &e, p)
        })
        .collect();
    let ker = linalg::kernel_mod_p(&transpose(&frob), n, p);
    let mut gens = ker.clone();
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = p.clone();
        gens.push(v);
    }
    let rad = linalg::hnf(&gens);
    let rad_q = linalg::to_qmat(&rad);
    let rad_inv = linalg::inverse_q(&rad_q).ok_or(OrderError::Degenerate)?;
    let mut eqs: IMat = Vec::new();
    let mut blocks: Vec<Vec<Vec<BigInt>>> = vec![Vec::new(); n];
    for (k, block) in blocks.iter_mut().enumerate() {
        let mut wk = vec![BigInt::zero(); n];
        wk[k] = BigInt::one();
        for g in &rad {
            let prod = mul_coords(&t, &wk, g, None);
            let prod_q: Vec<BigRational> = prod.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            let in_rad = linalg::vec_mul_q(&prod_q, &rad_inv);
            block.push(in_rad.into_iter().map(|x| x.to_integer().mod_floor(p)).collect());
        }
    }
    for i in 0..n {
        for l in 0..n {
            eqs.push((0..n).map(|k| blocks[k][i][l].clone()).collect());
        }
    }
    let uker = linalg::kernel_mod_p(&eqs, n, p);
    let mut ugens = uker;
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = p.clone();
        ugens.push(v);
    }
    let u = linalg::hnf(&ugens);
    let pq = BigRational::from_integer(p.clone());
    let new_basis: Vec<FieldElem> = u
        .iter()
        .map(|r| {
            let x = o.element(nf, r);
            nf.scale(&x, &(BigRational::one() / &pq))
        })
        .collect();
    let det: BigInt = (0..n).map(|i| u[i][i].clone()).product();
    if det == p.pow(n as u32) {
        return Ok(None);
    }
    Ok(Some(Order::from_span(nf, &new_basis)?))
}

fn small_prime_factors(mut n: BigInt) -> Result<Vec<BigInt>, OrderError> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while n > BigInt::one() && d < 20_000_000 {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            out.push(db.clone());
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        if BigInt::from(d) * BigInt::from(d) > n {
            if n > BigInt::one() {
                out.push(n.clone());
            }
            return Ok(out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        return Err(OrderError::IndexNotSmooth(n));
    }
    Ok(out)
}

/// Expected discriminant of the unramified extension of `Q(sqrt(-q))` of degree `h`: `(-q)^h`.
pub fn expected_discriminant(q: u64, h: usize) -> BigInt {
    BigInt::from(-(q as i64)).pow(h as u32)
}

/// Starting order: `O_K[j]` for the compositum, `Z[theta]` otherwise.
fn initial_order(nf: &NumberField) -> Result<Order, OrderError> {
    let n = nf.degree();
    let theta = nf.gen();
    let mut gens = Vec::new();
    match nf.origin() {
        FieldOrigin::Compositum { k } => {
            let alpha = nf.sub(nf.omega(), &nf.one());
            let kk = BigRational::from_integer(BigInt::from(*k));
            let j = nf.sub(&theta, &nf.scale(&alpha, &kk));
            let mut jp = nf.one();
            for _ in 0..nf.h() {
                gens.push(jp.clone());
                gens.push(nf.mul(&jp, &alpha));
                jp = nf.mul(&jp, &j);
            }
        }
        _ => {
            let mut tp = nf.one();
            for _ in 0..n {
                gens.push(tp.clone());
                tp = nf.mul(&tp, &theta);
            }
        }
    }
    Order::from_span(nf, &gens)
}

/// The maximal order, certified by its discriminant `(-q)^h`.
pub fn maximal_order(nf: &NumberField) -> Result<Order, OrderError> {
    let mut o = initial_order(nf)?;
    let target = expected_discriminant(nf.q(), nf.h());
    let d = o.discriminant(nf);
    let (quo, rem) = d.div_rem(&target);
    if !rem.is_zero() || quo.is_negative() {
        return Err(OrderError::NotSquare(quo));
    }
    let idx = quo.sqrt();
    if &idx * &idx != quo {
        return Err(OrderError::NotSquare(quo));
    }
    for p in small_prime_factors(idx)? {
        while let Some(next) = enlarge_at(nf, &o, &p)? {
            o = next;
        }
    }
    let got = o.discriminant(nf);
    if got != target {
        return Err(OrderError::WrongDiscriminant { got, expected: target });
    }
    Ok(o)
}

/// Embeddings of the basis at one root per complex place (upper half plane roots).
pub fn place_embeddings(nf: &NumberField, elems: &[FieldElem], prec: u32) -> Vec<Vec<BigComplex>> {
    let roots = nf.complex_roots(prec);
    let h = nf.h();
    elems.iter().map(|e| roots[..h].iter().map(|r| nf.embed(e, r)).collect()).collect()
}

/// Working precision large enough for the sizes of the given elements.
pub fn working_precision(nf: &NumberField, elems: &[FieldElem]) -> u32 {
    let root_size = nf.poly().iter().map(|c| c.bits()).max().unwrap_or(1) as u32;
    let coeff_size = elems
        .iter()
        .flat_map(|e| e.coords().iter())
        .map(|c| (c.numer().bits() + c.denom().bits()) as u32)
        .max()
        .unwrap_or(1);
    256 + 2 * coeff_size + 2 * root_size * nf.degree() as u32 / 2
}

/// LLL-reduced basis of the order with respect to the trace form `T2`.
pub fn reduced_basis(nf: &NumberField, o: &Order) -> Order {
    let mut prec = working_precision(nf, o.basis());
    loop {
        if let Some(u) = lll::lll_gram(&t2_gram(nf, o.basis(), prec), 0.99) {
            let basis: Vec<FieldElem> = u.iter().map(|r| o.element(nf, r)).collect();
            return Order::from_basis(basis).expect("unimodular transform keeps full rank");
        }
        prec *= 2;
    }
}

fn t2_gram(nf: &NumberField, basis: &[FieldElem], prec: u32) -> Vec<Vec<Float>> {
    let emb = place_embeddings(nf, basis, prec);
    let n = basis.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = Float::new(prec);
                    for (a, b) in emb[i].iter().zip(&emb[j]) {
                        let prod = a * &b.conj();
                        s += Float::with_val(prec, &prod.re * 2u32);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `T2` size of an element in floating point.
pub fn t2(nf: &NumberField, x: &FieldElem, prec: u32) -> f64 {
    let roots = nf.complex_roots(prec);
    roots.iter().map(|r| nf.embed(x, r).norm_sqr().to_f64()).sum()
}

/// Characteristic polynomial of an element, from its complex embeddings.
pub fn char_poly(nf: &NumberField, x: &FieldElem, prec: u32) -> Option<Vec<BigInt>> {
    let roots = nf.complex_roots(prec);
    let vals: Vec<BigComplex> = roots.iter().map(|r| nf.embed(x, r)).collect();
    let mut p = vec![BigComplex::one(prec)];
    for v in &vals {
        let mut next = vec![BigComplex::zero(prec); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * v);
        }
        p = next;
    }
    let mut out = Vec::new();
    for c in &p {
        if c.rounding_gap() > 1e-6 {
            return None;
        }
        out.push(c.round_re());
    }
    Some(out)
}

/// Index of the lattice `Z[theta]` in the order, when finite and small enough for `u64`.
pub fn index_of_power_order(nf: &NumberField, o: &Order) -> Option<u64> {
    let d1 = crate::poly::discriminant_z(nf.poly());
    let d2 = o.discriminant(nf);
    let (q, r) = d1.div_rem(&d2);
    if !r.is_zero() {
        return None;
    }
    q.sqrt().to_u64()
}
