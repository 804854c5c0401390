use num_bigint::BigInt;
use num_integer::Integer;

use iwasawa2::cm::{admissible_primes, class_group, hilbert_class_poly, hilbert_class_poly_default, prime_above_2_order};
use iwasawa2::nf::{build_h, split_2};
use iwasawa2::padic::regulator::{ord2_over_drops, rational_digits, regulator_2adic};
use iwasawa2::units::{certify_odd_index, parse_units, Q23_UNITS};

/// Brute-force count of reduced forms of discriminant `-q`.
fn reduced_forms(q: i64) -> usize {
    let mut n = 0;
    let mut a = 1;
    while 3 * a * a <= q {
        for b in -a + 1..=a {
            if (b * b + q) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + q) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            n += 1;
        }
        a += 1;
    }
    n
}

#[test]
fn class_numbers_agree_with_reduced_form_count() {
    for q in admissible_primes(500) {
        assert_eq!(class_group(q).unwrap().h, reduced_forms(q as i64), "q = {q}");
    }
}

#[test]
fn class_numbers_are_odd() {
    for q in admissible_primes(1000) {
        assert!(class_group(q).unwrap().h.is_odd());
    }
}

#[test]
fn hcp_is_stable_under_doubled_precision() {
    for q in [23, 31, 47] {
        let a = hilbert_class_poly_default(q).unwrap();
        let b = hilbert_class_poly(q, 2 * a.prec_bits).unwrap();
        assert_eq!(a.coeffs, b.coeffs, "q = {q}");
        assert_eq!(a.coeffs.len(), class_group(q).unwrap().h + 1);
        assert_eq!(a.coeffs.last(), Some(&BigInt::from(1)));
    }
}

#[test]
fn two_splits_into_h_over_f_primes() {
    for q in [23, 31, 47, 71] {
        let cg = class_group(q).unwrap();
        let f = prime_above_2_order(&cg);
        let nf = build_h(&hilbert_class_poly_default(q).unwrap()).unwrap();
        let sp = split_2(&nf, 64).unwrap();
        assert_eq!(sp.f, f, "q = {q}");
        assert_eq!(sp.factors.len(), 2 * cg.h / f);
        assert_eq!(sp.p_block().len(), cg.h / f);
    }
}

#[test]
fn q23_regulator_from_ingested_units() {
    let (nf, set) = parse_units(Q23_UNITS, "q23", None).unwrap();
    let sp = split_2(&nf, 160).unwrap();
    let res = regulator_2adic(&nf, &sp, &set.units, 128).unwrap();
    assert_eq!(res.ord2, 2);
    assert_eq!(ord2_over_drops(&res).unwrap(), vec![2, 2, 2]);
    let m = BigInt::from(1) << 23u32;
    let v: BigInt = [2u32, 4, 6, 7, 8, 9, 10, 13, 17, 20].iter().map(|&e| BigInt::from(1) << e).sum();
    let d = rational_digits(&res.det, 23).unwrap();
    assert!(d == v || d == (&m - &v) % &m);
    let cert = certify_odd_index(&nf, &set.units, 200).unwrap();
    assert_eq!(cert.classes_checked, 7);
}

#[test]
fn squared_units_are_not_certified() {
    let (nf, set) = parse_units(Q23_UNITS, "q23", None).unwrap();
    let sq: Vec<_> = set.units.iter().map(|u| nf.mul(u, u)).collect();
    assert!(certify_odd_index(&nf, &sq, 200).is_err());
}
