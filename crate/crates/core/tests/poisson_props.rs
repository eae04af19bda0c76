//! Properties of regular bivectors, distributions and leafwise forms.

mod common;

use common::*;
use folhp::cartan::{exterior_derivative, DiffForm, Multivector};
use folhp::expr::num::{int, rat};
use folhp::expr::{parse_document, Rational, Scalar};
use folhp::linalg::{self, Matrix};
use folhp::poisson::{
    bivector_matrix, from_pair, leafwise_closed_check, rank_and_image, to_pair, CheckConfig, Distribution,
    RegularityStatus,
};
use proptest::prelude::*;

fn catalog_bivectors() -> Vec<(String, Multivector)> {
    let doc = parse_document(folhp::catalog::BIVECTORS).unwrap();
    doc.items()
        .filter_map(|i| doc.bivector(Some(&i.name)).map(|(n, m)| (n.to_string(), m.clone())))
        .collect()
}

fn rank_at(m: &Matrix<Scalar>, x: &[Rational]) -> usize {
    let v: Matrix<Rational> = m.iter().map(|r| r.iter().map(|s| s.eval(x)).collect()).collect();
    linalg::rank_exact(&v)
}

/// `π` in coordinates `y = A x`: `π'^{ab}(y) = A_{ai} A_{bj} π^{ij}(A⁻¹ y)`.
fn transform(pi: &Multivector, a: &Matrix<Rational>) -> Multivector {
    let c = pi.chart();
    let n = c.dim();
    let zero = int(0);
    let det = linalg::det(a, &zero);
    let adj = linalg::adjugate(a, &zero);
    let subs: Vec<Scalar> = (0..n)
        .map(|i| {
            let terms = (0..n).map(|k| Scalar::var(c, k).scale(&(&adj[i][k] / &det)));
            terms.fold(Scalar::zero(c), |s, t| &s + &t)
        })
        .collect();
    let m = bivector_matrix(pi);
    let mut terms = Vec::new();
    for p in 0..n {
        for q in (p + 1)..n {
            let mut s = Scalar::zero(c);
            for i in 0..n {
                for j in 0..n {
                    let coef = &a[p][i] * &a[q][j];
                    if coef != zero && !m[i][j].is_zero() {
                        s = &s + &m[i][j].scale(&coef);
                    }
                }
            }
            terms.push((vec![p, q], s.compose(&subs, c).unwrap()));
        }
    }
    Multivector::from_terms(c, 2, terms).unwrap()
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(prop::collection::vec((-3i64..=3, 1i64..=2), n), n)
        .prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(|(p, q)| rat(p, q)).collect())
                .collect::<Matrix<Rational>>()
        })
        .prop_filter("singular", |m| linalg::det(m, &int(0)) != int(0))
}

#[test]
fn pair_round_trip_on_certified_bivectors() {
    let cfg = CheckConfig::default();
    let mut tested = 0;
    for (name, pi) in catalog_bivectors() {
        let Ok(rb) = rank_and_image(&pi, &cfg) else { continue };
        if rb.status() != RegularityStatus::Certified {
            continue;
        }
        let (_, form) = to_pair(&rb).unwrap();
        assert_eq!(from_pair(&form, &cfg).unwrap(), pi, "{name}");
        tested += 1;
    }
    assert!(tested >= 4, "only {tested} certified bivectors");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 5, ..ProptestConfig::default() })]

    #[test]
    fn rank_invariant_under_linear_change_3d(a in invertible(3)) {
        check_rank_invariance(3, &a)?;
    }

    #[test]
    fn rank_invariant_under_linear_change_4d(a in invertible(4)) {
        check_rank_invariance(4, &a)?;
    }
}

fn check_rank_invariance(n: usize, a: &Matrix<Rational>) -> Result<(), TestCaseError> {
    let cfg = CheckConfig::default();
    for (name, pi) in catalog_bivectors().into_iter().filter(|(_, p)| p.dim() == n) {
        let moved = transform(&pi, a);
        // pointwise: rank of A π(x) Aᵀ at y = A x equals rank of π(x)
        let (m, m2) = (bivector_matrix(&pi), bivector_matrix(&moved));
        for x in cfg.probe_points(n).iter().take(8) {
            let y: Vec<Rational> = (0..n).map(|i| (0..n).map(|k| &a[i][k] * &x[k]).sum()).collect();
            let r = rank_at(&m, x);
            prop_assert_eq!(r % 2, 0);
            prop_assert_eq!(r, rank_at(&m2, &y), "{}", name);
        }
        if let Ok(rb) = rank_and_image(&pi, &cfg) {
            let moved_rank = rank_and_image(&moved, &cfg).map(|r| r.rank());
            prop_assert_eq!(Ok(rb.rank()), moved_rank, "{}", name);
        }
    }
    Ok(())
}

fn leaf_coframe() -> DiffForm {
    // α = d(x4 + x1 x2) is closed, so its kernel is involutive
    let c = chart(4);
    let f = &Scalar::var(&c, 3) + &(&Scalar::var(&c, 0) * &Scalar::var(&c, 1));
    exterior_derivative(&DiffForm::scalar(f))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn leafwise_closedness_ignores_the_extension(w in form(4, 2), g in form(4, 1)) {
        let alpha = leaf_coframe();
        let dist = Distribution::from_coframe(alpha.chart(), vec![alpha.clone()], &CheckConfig::default()).unwrap();
        let shifted = w.checked_add(&alpha.wedge(&g).unwrap()).unwrap();
        prop_assert_eq!(
            leafwise_closed_check(&dist, &w).unwrap(),
            leafwise_closed_check(&dist, &shifted).unwrap()
        );
    }

    #[test]
    fn exact_plus_conormal_forms_are_leafwise_closed(b in form(4, 1), g in form(4, 1)) {
        let alpha = leaf_coframe();
        let dist = Distribution::from_coframe(alpha.chart(), vec![alpha.clone()], &CheckConfig::default()).unwrap();
        let w = exterior_derivative(&b).checked_add(&alpha.wedge(&g).unwrap()).unwrap();
        prop_assert!(leafwise_closed_check(&dist, &w).unwrap().is_closed());
    }
}
