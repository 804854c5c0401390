use iwasawa2::elliptic::lemma26_search;
use iwasawa2::elliptic::suites as elliptic;
use iwasawa2::formalgroup::suites::formal_group;
use iwasawa2::iwasawa::suites::{asymptote_suite, gamma_suite, mahler_suite, scalar_shift_suite, sinnott_suite};

#[test]
fn iwasawa_properties() {
    assert!(mahler_suite(50, 3).passed);
    assert!(scalar_shift_suite(50, 3).passed);
    assert!(asymptote_suite().passed);
    let s = sinnott_suite(30, 3, 6, 24);
    assert!(s.passed && s.failures == 0 && s.samples == 30);
    assert!(gamma_suite(16, 16).unwrap().passed);
}

#[test]
fn elliptic_identities_hold_at_200_bits() {
    for r in elliptic::identity25(200, 1).unwrap() {
        assert!(r.passed && r.residual < 1e-20, "{}: {}", r.identity, r.residual);
    }
    let d = elliptic::distribution(200, 1).unwrap();
    assert!(d.passed && d.residual < 1e-15);
    for r in elliptic::prop21(200).unwrap().into_iter().chain(elliptic::hecke(200).unwrap()) {
        assert!(r.passed, "{}: {}", r.identity, r.residual);
    }
}

#[test]
fn multipliers_are_coprime_to_6q() {
    for q in [7u64, 23, 31, 47] {
        let w = lemma26_search(q).unwrap();
        let (a, b) = (w.lambda.a as i128, w.lambda.b as i128);
        assert_eq!((a * a + q as i128 * b * b) / 4, w.norm as i128);
        assert_eq!(((a - b) % 2 + 2) % 2, 0);
        assert!(w.norm % 2 == 1 && w.norm % 3 != 0 && w.norm % q != 0);
        assert_eq!((w.lambda_mod8, w.conj_mod8), (1, 5));
    }
}

#[test]
fn formal_group_checks() {
    let rs = formal_group(12, 16, 48).unwrap();
    assert!(rs.iter().all(|r| r.passed), "{rs:?}");
}
