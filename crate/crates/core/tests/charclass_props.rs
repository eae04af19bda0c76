//! Identities of characteristic classes in truncated cohomology rings.

use folhp::charclass::{
    bott_criterion, bott_example_pipeline, conjugate, line_op, pontryagin_from_chern, tensor_with_line,
    whitney_sum, BottVerdict, BundleDescriptor, CohomElement, CohomRing, LineOp,
};
use folhp::expr::num::{int, rat};
use folhp::expr::Rational;
use proptest::prelude::*;

fn c1s() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-4i64..=4, 1i64..=2).prop_map(|(p, q)| rat(p, q)), 1..=4)
}

fn line_sum(ring: &std::sync::Arc<CohomRing>, c1: &[Rational]) -> BundleDescriptor {
    c1.iter()
        .map(|c| BundleDescriptor::line(ring, c.clone()))
        .reduce(|a, b| whitney_sum(&a, &b).unwrap())
        .unwrap()
}

/// `Π (1 + c_i t)` truncated: the oracle for the total Chern class.
fn product_oracle(ring: &std::sync::Arc<CohomRing>, c1: &[Rational]) -> CohomElement {
    c1.iter().fold(CohomElement::one(ring), |acc, c| {
        acc.mul(&CohomElement::from_coeffs(ring, &[int(1), c.clone()])).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn whitney_multiplicativity(m in 1usize..=8, a in c1s(), b in c1s()) {
        let ring = CohomRing::projective(m);
        let (e, f) = (line_sum(&ring, &a), line_sum(&ring, &b));
        let s = whitney_sum(&e, &f).unwrap();
        prop_assert_eq!(s.chern().unwrap(), &e.chern().unwrap().mul(f.chern().unwrap()).unwrap());
        let all: Vec<Rational> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(s.chern().unwrap(), &product_oracle(&ring, &all));
        let (pe, pf, ps) = (
            pontryagin_from_chern(&e).unwrap(),
            pontryagin_from_chern(&f).unwrap(),
            pontryagin_from_chern(&s).unwrap(),
        );
        prop_assert_eq!(ps.pontryagin(), pe.pontryagin().mul(&pf.pontryagin()).unwrap());
    }

    #[test]
    fn dual_is_an_involution(m in 1usize..=8, c in -6i64..=6, cs in c1s()) {
        let ring = CohomRing::projective(m);
        let l = BundleDescriptor::line(&ring, int(c));
        prop_assert_eq!(line_op(&line_op(&l, LineOp::Dual).unwrap(), LineOp::Dual).unwrap(), l);
        let e = line_sum(&ring, &cs);
        prop_assert_eq!(conjugate(&conjugate(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn first_chern_class_is_additive_under_tensor(m in 1usize..=8, a in -6i64..=6, b in -6i64..=6) {
        let ring = CohomRing::projective(m);
        let (la, lb) = (BundleDescriptor::line(&ring, int(a)), BundleDescriptor::line(&ring, int(b)));
        let t = tensor_with_line(&la, &lb).unwrap();
        prop_assert_eq!(t.c1().unwrap(), int(a + b));
    }

    #[test]
    fn underlying_real_line_bundle(m in 2usize..=8, c in -6i64..=6) {
        let ring = CohomRing::projective(m);
        let l = BundleDescriptor::line(&ring, int(c));
        let r = pontryagin_from_chern(&l).unwrap();
        prop_assert_eq!(r.pontryagin_class(1), CohomElement::monomial(&ring, int(c * c), 2));
        prop_assert_eq!(r.euler().unwrap(), CohomElement::monomial(&ring, int(c), 1));
    }

    #[test]
    fn obstruction_survives_deeper_truncation(m in 1usize..=10, extra in 1usize..=6, c in -4i64..=4, q in 1usize..=4) {
        let verdict = |top: usize| {
            let ring = CohomRing::projective(top);
            bott_criterion(&BundleDescriptor::line(&ring, int(c)), q).unwrap()
        };
        if let BottVerdict::ObstructionNonzero { degree, .. } = verdict(m) {
            match verdict(m + extra) {
                BottVerdict::ObstructionNonzero { degree: d2, .. } => prop_assert_eq!(d2, degree),
                BottVerdict::Silent => prop_assert!(false, "obstruction lost at truncation {}", m + extra),
            }
        }
    }
}

#[test]
fn pipeline_identities_for_small_n() {
    for n in 2..=8 {
        let r = bott_example_pipeline(n, 2).unwrap();
        assert!(r.identities_hold(), "n = {n}: {:?}", r.identities);
    }
}
