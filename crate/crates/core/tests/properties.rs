//! Property-based invariants across the core crate.

use proptest::prelude::*;

use cayley_core::curvature::{curvature_full, sectional_curvature, CurvatureScale};
use cayley_core::extremizer::{decompose, eigen_f, eigen_f_gradient, falsify_sample, octo_defect};
use cayley_core::linalg::{determinant, frobenius_inner, random_orthogonal, sym_eig, RealMatrix};
use cayley_core::lines::{line_through, project_onto_line};
use cayley_core::rng::seeded;
use cayley_core::trace_ineq::{key_defect, sum_defect};
use cayley_core::variation::{
    complex_integrand, octonionic_integrand_tangent, ComplexStructure, ProductFrame,
};
use cayley_core::{CayleyVector, LineParam, Octonion, Tolerance};

fn octonion() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-3.0f64..3.0).prop_map(Octonion::new)
}

fn cayley() -> impl Strategy<Value = CayleyVector> {
    (octonion(), octonion()).prop_map(|(u, v)| CayleyVector::new(u, v))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c)
            .prop_map(move |data| RealMatrix::new(r, c, data).expect("sized"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_is_multiplicative(a in octonion(), b in octonion()) {
        let lhs = (a * b).norm();
        prop_assert!((lhs - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn alternative_laws(a in octonion(), b in octonion()) {
        let left = (a * a) * b - a * (a * b);
        let right = (b * a) * a - b * (a * a);
        let scale = 1.0 + a.norm_sq() * b.norm();
        prop_assert!(left.norm() <= 1e-12 * scale);
        prop_assert!(right.norm() <= 1e-12 * scale);
    }

    #[test]
    fn trace_cyclicity(seed in any::<u64>(), r in 1usize..8, c in 1usize..8) {
        let mut rng = seeded(seed);
        let a = RealMatrix::gaussian(r, c, &mut rng);
        let b = RealMatrix::gaussian(r, c, &mut rng);
        let lhs = frobenius_inner(&a, &b).unwrap();
        let rhs = b.matmul(&a.transpose()).unwrap().trace();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn gram_norms_agree(x in matrix(10, 10)) {
        let a = x.gram().frobenius_norm();
        let b = x.outer_gram().frobenius_norm();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn eigenvalues_sum_to_trace(x in matrix(9, 9)) {
        let s = x.gram();
        let spec = sym_eig(&s, Tolerance::default()).unwrap();
        let sum: f64 = spec.eigenvalues.iter().sum();
        prop_assert!((sum - s.trace()).abs() <= 1e-10 * (1.0 + s.frobenius_norm()));
        prop_assert!(spec.reconstruct().sub(&s).unwrap().frobenius_norm() <= 1e-10 * (1.0 + s.frobenius_norm()));
    }

    #[test]
    fn haar_samples_have_unit_determinant(m in 1usize..12, seed in any::<u64>()) {
        let q = random_orthogonal(m, seed);
        prop_assert!((determinant(&q).unwrap().abs() - 1.0).abs() <= 1e-9);
        prop_assert!(q.orthogonality_residual() <= 1e-12);
    }

    #[test]
    fn key_defect_is_nonpositive(m in 1usize..10, n in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_orthogonal(m, seed ^ 1);
        let x = RealMatrix::gaussian(m, n, &mut rng);
        let r = key_defect(&a, &x, Tolerance::default()).unwrap();
        prop_assert!(r.defect <= 1e-9 * (1.0 + x.frobenius_norm().powi(4)));
    }

    #[test]
    fn sum_defect_is_nonnegative(x in matrix(8, 12)) {
        let d = sum_defect(&x, Tolerance::default());
        prop_assert!(d.value >= -1e-9 * (1.0 + x.frobenius_norm().powi(4)));
    }

    #[test]
    fn point_lies_on_its_line(x in cayley()) {
        prop_assume!(x.norm() > 1e-6);
        let m = line_through(&x, Tolerance::default()).unwrap();
        let p = project_onto_line(&x, &m);
        prop_assert!((p - x).norm() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn curvature_pair_symmetry(x in cayley(), y in cayley(), z in cayley(), w in cayley()) {
        let s = CurvatureScale::cayley_plane();
        let r = curvature_full(&x, &y, &z, &w, s);
        let scale = 1.0 + x.norm() * y.norm() * z.norm() * w.norm();
        prop_assert!((r - curvature_full(&z, &w, &x, &y, s)).abs() <= 1e-10 * scale);
        prop_assert!((r + curvature_full(&y, &x, &z, &w, s)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn sectional_curvature_is_quarter_pinched(x in cayley(), y in cayley()) {
        if let Some(k) = sectional_curvature(&x, &y, CurvatureScale::cayley_plane()) {
            prop_assume!(x.norm_sq() * y.norm_sq() - x.dot(&y).powi(2) > 1e-6 * x.norm_sq() * y.norm_sq());
            prop_assert!((1.0 - 1e-8..=4.0 + 1e-8).contains(&k));
        }
    }

    #[test]
    fn octo_defect_scales_with_fourth_power(n in 1usize..16, seed in any::<u64>()) {
        let xs = falsify_sample(n, seed);
        let d = octo_defect(&xs, LineParam::ORIGIN, Tolerance::default());
        let scaled: Vec<CayleyVector> = xs.iter().map(|x| x.scale(2.0)).collect();
        prop_assert_eq!(octo_defect(&scaled, LineParam::ORIGIN, Tolerance::default()), 16.0 * d);
        let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
        prop_assert!(d <= 1e-8 * total * total);
    }

    #[test]
    fn eigen_form_matches_defect(n in 1usize..20, seed in any::<u64>()) {
        let xs = falsify_sample(n, seed);
        let dec = decompose(&xs, Tolerance::default()).unwrap();
        let f = eigen_f(&dec, &dec.eigen).unwrap();
        let d = octo_defect(&xs, LineParam::ORIGIN, Tolerance::default());
        let total: f64 = xs.iter().map(CayleyVector::norm_sq).sum();
        prop_assert!((f - d).abs() <= 1e-9 * total * total);
        for row in eigen_f_gradient(&dec, &dec.eigen).unwrap() {
            let scale: f64 = 1.0 + row.iter().map(|v| v.abs()).sum::<f64>();
            prop_assert!(row.iter().sum::<f64>().abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn complex_integrand_rotation_invariant(
        half in 1usize..5, m2 in 1usize..4, n in 1usize..5, seed in any::<u64>()
    ) {
        let m1 = 2 * half;
        let n = n.min(m1 + m2);
        let f = ProductFrame::random(m1, m2, n, 0, seed).unwrap();
        let j = ComplexStructure::standard(m1).unwrap();
        let s = CurvatureScale::complex_projective(m1).unwrap();
        let a = complex_integrand(&f, &j, s, Tolerance::default()).unwrap().value;
        let b = complex_integrand(&f.rotate_tangent(&random_orthogonal(n, seed ^ 3)).unwrap(), &j, s, Tolerance::default())
            .unwrap()
            .value;
        prop_assert!(a <= 1e-9 * s.lambda_sq());
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn octonionic_integrand_rotation_invariant(
        m2 in 0usize..4, n in 1usize..10, d in 0usize..6, seed in any::<u64>()
    ) {
        let f = ProductFrame::random(16, m2, n, d, seed).unwrap();
        let s = CurvatureScale::cayley_plane();
        let a = octonionic_integrand_tangent(&f, LineParam::ORIGIN, s, Tolerance::default()).unwrap().value;
        let rotated = f.rotate_tangent(&random_orthogonal(n, seed ^ 5)).unwrap();
        let b = octonionic_integrand_tangent(&rotated, LineParam::ORIGIN, s, Tolerance::default()).unwrap().value;
        prop_assert!(a <= 1e-9 * s.lambda_sq());
        prop_assert!((a - b).abs() <= 1e-10);
    }
}
