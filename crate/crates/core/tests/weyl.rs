use capelli_core::weyl::{twisted_apply, twisted_canonical};
use capelli_core::{instantiate, Monomial, MultiPoly, Rational, Twist, WeylOp};
use proptest::prelude::*;

const ARITY: usize = 2;

fn rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(p, q)| Rational::new(p, q))
}

fn poly(max_exp: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, ARITY).prop_map(Monomial::new), rational()),
        0..4,
    )
    .prop_map(|terms| MultiPoly::from_terms(ARITY, terms))
}

/// Sums of `p(x)·q(∂)`.
fn op() -> impl Strategy<Value = WeylOp> {
    prop::collection::vec((poly(2), poly(2)), 1..3).prop_map(|parts| {
        parts.iter().fold(WeylOp::zero(ARITY), |acc, (p, q)| {
            let term = WeylOp::multiplication(p)
                .try_mul(&WeylOp::from_symbol(q))
                .unwrap();
            acc.try_add(&term).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_acts_as_composition(a in op(), b in op(), p in poly(4)) {
        let lhs = a.try_mul(&b).unwrap().apply(&p).unwrap();
        let rhs = a.apply(&b.apply(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_is_associative(a in op(), b in op(), c in op()) {
        let lhs = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let rhs = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twisted_action_specializes(a in op(), k in 0u32..4) {
        let f = &MultiPoly::var(ARITY, 0).pow(2) + &MultiPoly::var(ARITY, 1).pow(2);
        let tw = Twist::new(&f).unwrap();
        let image = tw.apply(&a, &tw.f_power(0)).unwrap();
        // Both sides are multiplied by f^level so the comparison stays polynomial.
        let lifted = tw.element(tw.mul_poly(&f.pow(image.level), &image).unwrap().numer, 0).unwrap();
        let lifted = tw.specialize(&lifted, k).unwrap();
        let direct = f.pow(image.level).try_mul(&a.apply(&f.pow(k)).unwrap()).unwrap();
        prop_assert_eq!(lifted, direct);
    }
}

fn q(n: i64) -> Rational {
    Rational::from(n)
}

#[test]
fn commutation_examples() {
    let d1 = WeylOp::partial(1, 0);
    let x1 = WeylOp::multiplication(&MultiPoly::var(1, 0));
    let expected = x1.try_mul(&d1).unwrap().try_add(&WeylOp::identity(1)).unwrap();
    assert_eq!(d1.try_mul(&x1).unwrap(), expected);

    let quad = instantiate(1, 2).unwrap();
    let comm = quad.theta.commutator(&quad.f_op()).unwrap();
    assert_eq!(comm, WeylOp::multiplication(&quad.f.scale(&q(2))));
}

#[test]
fn apply_examples() {
    let det = instantiate(4, 2).unwrap();
    assert_eq!(det.theta.apply(&det.f).unwrap(), det.f.scale(&q(2)));
    assert_eq!(det.delta.apply(&det.f).unwrap(), MultiPoly::constant(4, q(2)));
    assert!(det.delta.apply(&MultiPoly::one(4)).unwrap().is_zero());
    assert!(det.delta.try_mul(&WeylOp::zero(3)).is_err());
}

#[test]
fn twisted_examples() {
    let quad = instantiate(1, 2).unwrap();
    let tw = quad.twist();
    let s = tw.f_power(0);
    let d1 = tw.apply(&WeylOp::partial(2, 0), &s).unwrap();
    // 2x·s·f^(s-1)
    assert_eq!(d1.level, 1);
    let x = MultiPoly::var(3, 0);
    let svar = MultiPoly::var(3, 2);
    assert_eq!(d1.numer, x.try_mul(&svar).unwrap().scale(&q(2)));

    let (g, j) = tw.as_scaled_power(&tw.apply(&quad.delta, &tw.f_power(1)).unwrap()).unwrap();
    assert_eq!(j, 0);
    assert_eq!(g.coeffs(), &[q(4), q(8), q(4)]);

    let via_free = twisted_apply(&quad.delta, &tw.f_power(1), &quad.f).unwrap();
    assert_eq!(via_free.level, 0);
}

#[test]
fn canonical_examples() {
    let quad = instantiate(1, 2).unwrap();
    let tw = quad.twist();
    let f3 = quad.f.extend_arity(1);
    // f·f^(s-1) is f^s
    let e = tw.element(f3.clone(), 1).unwrap();
    assert_eq!(tw.canonical(&e), tw.f_power(0));
    // f²·x at level 3 reduces to x at level 1
    let x = MultiPoly::var(3, 0);
    let e = tw.element(f3.pow(2).try_mul(&x).unwrap(), 3).unwrap();
    let c = twisted_canonical(&e, &quad.f).unwrap();
    assert_eq!((c.numer, c.level), (x, 1));
}
