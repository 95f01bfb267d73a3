use num_rational::Rational64;
use proptest::prelude::*;
use rlw_core::group::{circle, Factor, Signature, SingularSet};
use rlw_core::Error;

fn circle_z3() -> Signature {
    Signature::new(vec![Factor::QmodZ, Factor::Zmod { n: 3 }]).unwrap()
}

#[test]
fn addition_examples() {
    assert_eq!(&circle(1, 5) + &circle(3, 5), circle(4, 5));
    assert!((&circle(2, 3) + &circle(1, 3)).is_zero());
    let sig = circle_z3();
    let a = sig.parse("(1/5,2)").unwrap();
    let b = sig.parse("(4/5,1)").unwrap();
    assert_eq!(&a + &b, sig.zero());
}

#[test]
fn negation_examples() {
    assert_eq!(circle(1, 5).neg(), circle(4, 5));
    assert_eq!(circle(0, 1).neg(), circle(0, 1));
    let sig = Signature::new(vec![Factor::QmodZ, Factor::Zmod { n: 2 }]).unwrap();
    assert_eq!(sig.parse("(2/7,1)").unwrap().neg(), sig.parse("(5/7,1)").unwrap());
}

#[test]
fn mismatched_signatures_do_not_add() {
    let x = circle_z3().parse("(1/5,1)").unwrap();
    assert!(matches!(circle(1, 5).checked_add(&x), Err(Error::GroupArithmetic(_))));
}

#[test]
fn genericity_for_six_torsion() {
    let x = SingularSet::TorsionDividing(6);
    assert!(x.is_generic(&circle(1, 5)));
    assert!(!x.is_generic(&circle(1, 2)));
    assert!(!x.is_generic(&circle(1, 3)));
    assert!(!x.is_generic(&circle(0, 1)));
    assert!(x.is_small(&Signature::circle()));
}

#[test]
fn parsing_wraps_and_rejects() {
    let sig = Signature::circle();
    assert_eq!(sig.parse("7/5").unwrap(), circle(2, 5));
    assert_eq!(sig.parse("-1/5").unwrap(), circle(4, 5));
    assert!(sig.parse("x").is_err());
    assert!(circle_z3().parse("(1/5,1/2)").is_err());
}

fn small_fraction() -> impl Strategy<Value = (i64, i64)> {
    (1i64..40).prop_flat_map(|q| (-3 * q..3 * q, Just(q)))
}

proptest! {
    #[test]
    fn circle_is_an_abelian_group((a, p) in small_fraction(), (b, q) in small_fraction(), (c, r) in small_fraction()) {
        let (x, y, z) = (circle(a, p), circle(b, q), circle(c, r));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert!((&x + &x.neg()).is_zero());
        let exact = Rational64::new(a, p) + Rational64::new(b, q);
        let wrapped = exact - exact.floor();
        prop_assert_eq!((&x + &y).circle_part(), Some(wrapped));
    }

    #[test]
    fn product_negation_is_an_inverse((a, p) in small_fraction(), k in -10i64..10) {
        let sig = circle_z3();
        let x = sig.element(&[Rational64::new(a, p), Rational64::from_integer(k)]).unwrap();
        prop_assert!((&x + &x.neg()).is_zero());
        prop_assert_eq!(x.scale(3).scale(5), x.scale(15));
    }
}
