//! Dense univariate polynomials over the integers, the rationals and the field with two elements.
//!
//! Coefficients are stored in ascending order of degree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

pub fn zpoly(c: &[i64]) -> ZPoly {
    c.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(T::zero());
    }
}

pub fn degree<T: Zero>(p: &[T]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn to_q(p: &[BigInt]) -> QPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn add<T: Zero + Clone + std::ops::Add<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    let mut r: Vec<T> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x + y
        })
        .collect();
    trim(&mut r);
    r
}

pub fn sub<T: Zero + Clone + std::ops::Sub<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    let mut r: Vec<T> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x - y
        })
        .collect();
    trim(&mut r);
    r
}

pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Zero + Clone + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return vec![T::zero()];
    }
    let mut r = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] = r[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut r);
    r
}

pub fn scale<T: Clone + std::ops::Mul<Output = T> + Zero>(a: &[T], s: &T) -> Vec<T> {
    let mut r: Vec<T> = a.iter().map(|c| c.clone() * s.clone()).collect();
    trim(&mut r);
    r
}

pub fn derivative_z(p: &[BigInt]) -> ZPoly {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    let mut r: ZPoly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    trim(&mut r);
    r
}

pub fn derivative_q(p: &[BigRational]) -> QPoly {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    let mut r: QPoly =
        p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect();
    trim(&mut r);
    r
}

pub fn eval_z(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Quotient and remainder over the rationals.
pub fn divrem_q(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let da = match degree(&r) {
        Some(d) if d >= db => d,
        _ => return (vec![BigRational::zero()], r),
    };
    let mut q = vec![BigRational::zero(); da - db + 1];
    for i in (db..=da).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = &r[i] / &lead;
        for j in 0..=db {
            r[i - db + j] = &r[i - db + j] - &c * &b[j];
        }
        q[i - db] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn monic_q(p: &[BigRational]) -> QPoly {
    match degree(p) {
        None => vec![BigRational::zero()],
        Some(d) => {
            let l = p[d].clone();
            p[..=d].iter().map(|c| c / &l).collect()
        }
    }
}

/// Monic greatest common divisor over the rationals.
pub fn gcd_q(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x: QPoly = a.to_vec();
    let mut y: QPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while degree(&y).is_some() {
        let (_, r) = divrem_q(&x, &y);
        x = y;
        y = r;
    }
    monic_q(&x)
}

pub fn is_squarefree_q(p: &[BigRational]) -> bool {
    let g = gcd_q(p, &derivative_q(p));
    degree(&g) == Some(0)
}

/// Resultant over the rationals by the Euclidean remainder sequence.
pub fn resultant_q(f: &[BigRational], g: &[BigRational]) -> BigRational {
    let mut f: QPoly = f.to_vec();
    let mut g: QPoly = g.to_vec();
    trim(&mut f);
    trim(&mut g);
    let mut acc = BigRational::one();
    loop {
        let (df, dg) = match (degree(&f), degree(&g)) {
            (Some(a), Some(b)) => (a, b),
            _ => return BigRational::zero(),
        };
        if dg == 0 {
            return acc * num_traits::pow(g[0].clone(), df);
        }
        let (_, r) = divrem_q(&f, &g);
        let dr = match degree(&r) {
            Some(d) => d,
            None => return BigRational::zero(),
        };
        if (df * dg) % 2 == 1 {
            acc = -acc;
        }
        acc *= num_traits::pow(g[dg].clone(), df - dr);
        f = g;
        g = r;
    }
}

pub fn resultant_z(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let r = resultant_q(&to_q(f), &to_q(g));
    debug_assert!(r.is_integer());
    r.to_integer()
}

pub fn discriminant_z(f: &[BigInt]) -> BigInt {
    let d = degree(f).expect("zero polynomial");
    let r = resultant_z(f, &derivative_z(f));
    let sign = if (d * (d - 1) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let lead = &f[d];
    sign * r / lead
}

pub fn format_poly(p: &[BigInt], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        let body = match i {
            0 => mag.to_string(),
            1 if mag.is_one() => var.to_string(),
            1 => format!("{mag}{var}"),
            _ if mag.is_one() => format!("{var}^{i}"),
            _ => format!("{mag}{var}^{i}"),
        };
        parts.push((sign, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (sign, body)) in parts.iter().enumerate() {
        if k == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(if *sign == "-" { " - " } else { " + " });
        }
        s.push_str(body);
    }
    s
}

/// Reduce coefficients into `[0, m)`.
pub fn reduce_mod(p: &[BigInt], m: &BigInt) -> ZPoly {
    let mut r: ZPoly = p.iter().map(|c| c.mod_floor(m)).collect();
    trim(&mut r);
    r
}

/// Polynomial over the field with two elements, bit `i` holding the coefficient of `x^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Poly(pub u128);

impl Gf2Poly {
    pub fn from_zpoly(p: &[BigInt]) -> Self {
        let mut bits = 0u128;
        for (i, c) in p.iter().enumerate() {
            if c.is_odd() {
                assert!(i < 128, "polynomial degree too large for GF(2) packing");
                bits |= 1u128 << i;
            }
        }
        Gf2Poly(bits)
    }

    pub fn to_zpoly(self) -> ZPoly {
        match self.degree() {
            None => vec![BigInt::zero()],
            Some(d) => (0..=d).map(|i| BigInt::from(((self.0 >> i) & 1) as u8)).collect(),
        }
    }

    pub fn degree(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(127 - self.0.leading_zeros() as usize)
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn one() -> Self {
        Gf2Poly(1)
    }

    pub fn x() -> Self {
        Gf2Poly(2)
    }

    pub fn add(self, o: Self) -> Self {
        Gf2Poly(self.0 ^ o.0)
    }

    /// Product; panics if the result would not fit in 128 bits.
    pub fn mul(self, o: Self) -> Self {
        let mut r = 0u128;
        let mut a = self.0;
        let mut sh = 0;
        while a != 0 {
            if a & 1 == 1 {
                r ^= o.0 << sh;
            }
            a >>= 1;
            sh += 1;
        }
        Gf2Poly(r)
    }

    pub fn divrem(self, d: Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0;
        let mut q = 0u128;
        while let Some(dr) = Gf2Poly(r).degree() {
            if dr < dd {
                break;
            }
            q |= 1u128 << (dr - dd);
            r ^= d.0 << (dr - dd);
        }
        (Gf2Poly(q), Gf2Poly(r))
    }

    pub fn rem(self, d: Self) -> Self {
        self.divrem(d).1
    }

    pub fn mulmod(self, o: Self, m: Self) -> Self {
        let mut r = 0u128;
        let mut a = self.rem(m).0;
        let b = o.rem(m);
        let mut cur = b;
        while a != 0 {
            if a & 1 == 1 {
                r ^= cur.0;
            }
            a >>= 1;
            cur = Gf2Poly(cur.0 << 1).rem(m);
        }
        Gf2Poly(r)
    }

    pub fn gcd(self, o: Self) -> Self {
        let (mut a, mut b) = (self, o);
        while !b.is_zero() {
            let r = a.rem(b);
            a = b;
            b = r;
        }
        a
    }

    /// `(s, t, g)` with `s*a + t*b = g = gcd(a, b)`.
    pub fn ext_gcd(a: Self, b: Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a, b);
        let (mut s0, mut s1) = (Gf2Poly(1), Gf2Poly(0));
        let (mut t0, mut t1) = (Gf2Poly(0), Gf2Poly(1));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(r1);
            r0 = r1;
            r1 = r;
            let s = s0.add(q.mul(s1));
            s0 = s1;
            s1 = s;
            let t = t0.add(q.mul(t1));
            t0 = t1;
            t1 = t;
        }
        (s0, t0, r0)
    }

    pub fn derivative(self) -> Self {
        let odd_mask: u128 = 0xAAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA;
        Gf2Poly((self.0 & odd_mask) >> 1)
    }

    pub fn is_squarefree(self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(self.derivative()).degree() == Some(0),
        }
    }

    /// `x^(2^k) mod m`
    fn frobenius_power_of_x(k: usize, m: Self) -> Self {
        let mut r = Gf2Poly::x().rem(m);
        for _ in 0..k {
            r = r.mulmod(r, m);
        }
        r
    }

    /// Factorization of a squarefree polynomial into monic irreducibles, sorted.
    pub fn factor_squarefree(self) -> Vec<Gf2Poly> {
        assert!(self.is_squarefree(), "polynomial is not squarefree mod 2");
        let mut out = Vec::new();
        let mut rest = self;
        let mut d = 1;
        while rest.degree().unwrap_or(0) >= 2 * d {
            let xp = Self::frobenius_power_of_x(d, rest);
            let g = rest.gcd(xp.add(Gf2Poly::x()));
            if g.degree().unwrap_or(0) > 0 {
                out.extend(equal_degree_split(g, d));
                rest = rest.divrem(g).0;
            }
            d += 1;
        }
        if rest.degree().unwrap_or(0) > 0 {
            out.push(rest);
        }
        out.sort();
        out
    }

    pub fn to_string_var(self, var: &str) -> String {
        format_poly(&self.to_zpoly(), var)
    }
}

/// Splits a product of distinct irreducibles of common degree `d` using trace maps.
fn equal_degree_split(g: Gf2Poly, d: usize) -> Vec<Gf2Poly> {
    let n = g.degree().unwrap();
    if n == d {
        return vec![g];
    }
    let mut seed = 2u128;
    loop {
        let a = Gf2Poly(seed).rem(g);
        seed += 1;
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut t = a;
        let mut acc = a;
        for _ in 1..d {
            t = t.mulmod(t, g);
            acc = acc.add(t);
        }
        let h = g.gcd(acc);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < n {
            let mut v = equal_degree_split(h, d);
            v.extend(equal_degree_split(g.divrem(h).0, d));
            return v;
        }
        assert!(seed < (1u128 << (n.min(100))) + 4, "equal-degree splitting failed");
    }
}

/// Lift a factorization `f = g*h mod 2` with monic `f`, `g` and coprime factors to modulus `2^n`.
pub fn hensel_lift_pair(f: &[BigInt], g: Gf2Poly, h: Gf2Poly, n: u32) -> (ZPoly, ZPoly) {
    let (s, t, one) = Gf2Poly::ext_gcd(g, h);
    assert_eq!(one, Gf2Poly::one(), "factors not coprime mod 2");
    let s = to_q(&s.to_zpoly());
    let t = to_q(&t.to_zpoly());
    let mut gz = g.to_zpoly();
    let mut hz = h.to_zpoly();
    let two = BigInt::from(2);
    for k in 1..n {
        let pk = BigInt::one() << k;
        let e = sub(f, &mul(&gz, &hz));
        let e: ZPoly = e.iter().map(|c| (c / &pk).mod_floor(&two)).collect();
        let eq = to_q(&e);
        let et = mul(&eq, &t);
        let (quo, rem) = divrem_q(&et, &to_q(&gz));
        let dh = add(&mul(&eq, &s), &mul(&quo, &to_q(&hz)));
        let dg: ZPoly = rem.iter().map(|c| c.to_integer().mod_floor(&two)).collect();
        let dh: ZPoly = dh.iter().map(|c| c.to_integer().mod_floor(&two)).collect();
        let m = BigInt::one() << (k + 1);
        gz = reduce_mod(&add(&gz, &scale(&dg, &pk)), &m);
        hz = reduce_mod(&add(&hz, &scale(&dh, &pk)), &m);
    }
    (gz, hz)
}

/// Lift a full factorization of monic `f` into pairwise coprime monic factors mod 2 to `2^n`.
pub fn hensel_lift_all(f: &[BigInt], factors: &[Gf2Poly], n: u32) -> Vec<ZPoly> {
    let m = BigInt::one() << n;
    let mut out = Vec::new();
    let mut rest = reduce_mod(f, &m);
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            out.push(rest.clone());
            break;
        }
        let h = factors[i + 1..].iter().fold(Gf2Poly::one(), |acc, x| acc.mul(*x));
        let (gl, hl) = hensel_lift_pair(&rest, *g, h, n);
        out.push(gl);
        rest = hl;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> QPoly {
        to_q(&zpoly(c))
    }

    /// Sylvester-matrix determinant by fraction-free elimination.
    fn sylvester_resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
        let m = degree(f).unwrap();
        let n = degree(g).unwrap();
        let size = m + n;
        let mut a = vec![vec![BigRational::zero(); size]; size];
        for i in 0..n {
            for j in 0..=m {
                a[i][i + j] = BigRational::from_integer(f[m - j].clone());
            }
        }
        for i in 0..m {
            for j in 0..=n {
                a[n + i][i + j] = BigRational::from_integer(g[n - j].clone());
            }
        }
        let mut det = BigRational::one();
        for c in 0..size {
            let p = match (c..size).find(|&r| !a[r][c].is_zero()) {
                Some(p) => p,
                None => return BigInt::zero(),
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c].clone();
            for r in c + 1..size {
                let factor = &a[r][c] / &a[c][c];
                for k in c..size {
                    let v = &a[c][k] * &factor;
                    a[r][k] -= v;
                }
            }
        }
        det.to_integer()
    }

    #[test]
    fn resultant_matches_sylvester() {
        let f = zpoly(&[1, -3, 5, -5, 5, -3, 1]);
        let g = zpoly(&[0, 2, -1, 2, -2, 1]);
        assert_eq!(resultant_z(&f, &g), sylvester_resultant(&f, &g));
        let g2 = zpoly(&[7, 0, 3]);
        assert_eq!(resultant_z(&f, &g2), sylvester_resultant(&f, &g2));
    }

    #[test]
    fn discriminant_of_quadratic() {
        assert_eq!(discriminant_z(&zpoly(&[2, 1, 1])), BigInt::from(-7));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = q(&[-1, 0, 1]);
        let b = q(&[1, 2, 1]);
        assert_eq!(gcd_q(&a, &b), q(&[1, 1]));
        assert!(is_squarefree_q(&a));
        assert!(!is_squarefree_q(&b));
    }

    #[test]
    fn gf2_factor_published_sextic() {
        let f = Gf2Poly::from_zpoly(&zpoly(&[1, -3, 5, -5, 5, -3, 1]));
        let fs = f.factor_squarefree();
        assert_eq!(fs, vec![Gf2Poly(0b1011), Gf2Poly(0b1101)]);
    }

    #[test]
    fn gf2_split_linear_factors() {
        let f = Gf2Poly::from_zpoly(&zpoly(&[2, 1, 1]));
        assert_eq!(f.factor_squarefree(), vec![Gf2Poly(0b10), Gf2Poly(0b11)]);
    }

    #[test]
    fn hensel_lifts_multiply_back() {
        let f = zpoly(&[1, -3, 5, -5, 5, -3, 1]);
        let fs = Gf2Poly::from_zpoly(&f).factor_squarefree();
        let lifted = hensel_lift_all(&f, &fs, 64);
        let m = BigInt::one() << 64;
        let prod = lifted.iter().fold(zpoly(&[1]), |acc, p| mul(&acc, p));
        assert_eq!(reduce_mod(&prod, &m), reduce_mod(&f, &m));
    }

    #[test]
    fn format_readable() {
        assert_eq!(format_poly(&zpoly(&[3375, 1]), "x"), "x + 3375");
        assert_eq!(format_poly(&zpoly(&[2, -1, 1]), "x"), "x^2 - x + 2");
    }
}
