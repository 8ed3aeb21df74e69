use proptest::prelude::*;
use symroot_core::oracle::{min_eigenvalue_on_sphere, DirectionSampler};
use symroot_core::pd2d::{check_field, classify, hessian2d, FieldTriple, Verdict2D};
use symroot_core::pd3d::{hessian3d, necessary_conditions_3d};
use symroot_core::sympoly::{
    charpoly_to_monomial_2d, charpoly_to_monomial_3d, expand_charpoly, CharPoly, CharPolyCoeffs2D, CharPolyCoeffs3D,
};
use symroot_core::{CoefficientSet2D, CoefficientSet3D, Region};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn closed_form_hessians_match_dense_expansion(
        l in -5.0..5.0f64, m in -5.0..5.0f64, n in -5.0..5.0f64, q in -5.0..5.0f64,
        y in prop::array::uniform3(-2.0..2.0f64),
    ) {
        let c2 = CoefficientSet2D::new(l, m, n);
        let h = c2.to_dense().hessian(&y[..2]);
        let closed = hessian2d(&c2, [y[0], y[1]]);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(close(h[(i, j)], closed[i][j], 1e-12));
            }
        }
        let c3 = CoefficientSet3D::new(l, m, n, q);
        let h = c3.to_dense().hessian(&y);
        let closed = hessian3d(&c3, y);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(close(h[(i, j)], closed[i][j], 1e-12));
            }
        }
    }

    #[test]
    fn basis_change_preserves_the_polynomial(
        a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64,
        y in prop::array::uniform3(-2.0..2.0f64),
    ) {
        let cp2 = CharPolyCoeffs2D { a, b, c };
        let dense = expand_charpoly(&CharPoly::TwoD(cp2), 2).unwrap();
        prop_assert!(close(dense.eval(&y[..2]), charpoly_to_monomial_2d(cp2).eval([y[0], y[1]]), 1e-12));
        let cp3 = CharPolyCoeffs3D { a, b, c, d };
        let dense = expand_charpoly(&CharPoly::ThreeD(cp3), 3).unwrap();
        prop_assert!(close(dense.eval(&y), charpoly_to_monomial_3d(cp3).eval(y), 1e-12));
    }

    #[test]
    fn ternary_conditions_imply_planar_positivity(l in 0.1..5.0f64, m in -5.0..5.0f64, n in -5.0..10.0f64, q in -10.0..10.0f64) {
        let c = CoefficientSet3D::new(l, m, n, q);
        if necessary_conditions_3d(&c).all_hold {
            prop_assert!(classify(&c.planar()).verdict.is_positive_definite());
        }
    }
}

#[test]
fn constant_fields_classify_like_the_pointwise_check() {
    for c in [
        CoefficientSet2D::new(1.0, 2.0, 3.0),
        CoefficientSet2D::new(1.0, 1.0, 2.0),
        CoefficientSet2D::new(1.0, 1.0, 5.0),
        CoefficientSet2D::new(4.0, 6.0, 5.0),
    ] {
        let r = check_field(&FieldTriple::constant(c), &Region::square(-1.0, 1.0), [3, 4]).unwrap();
        let v = classify(&c).verdict;
        assert!(r.points.iter().all(|p| p.verdict == Some(v)));
        assert_eq!(r.positive_definite_everywhere, v.is_positive_definite());
        assert_eq!(r.classification_changes, 0);
    }
}

#[test]
fn oracle_agrees_on_hand_picked_corpora() {
    let sampler = DirectionSampler::circle();
    let pd = [(1.0, 2.0, 3.0), (1.0, 1.0, 2.0), (0.25, 19f64.sqrt() / 6.0, 1.0)];
    let not_pd = [(4.0, 6.0, 5.0), (1.0, 7f64.sqrt(), 3.0), (4.0, 6.0, 4.0)];
    for (set, expect) in [(&pd, true), (&not_pd, false)] {
        for &(l, m, n) in set.iter() {
            let c = CoefficientSet2D::new(l, m, n);
            assert_eq!(classify(&c).verdict.is_positive_definite(), expect, "{c:?}");
            let o = min_eigenvalue_on_sphere(&c.to_dense(), &sampler).unwrap();
            assert_eq!(o.pd_evidence(), expect, "{c:?}: {}", o.value);
        }
    }
    assert_eq!(classify(&CoefficientSet2D::new(1.0, 2.0, 3.0)).verdict, Verdict2D::PDRiemannianCritical);
}
