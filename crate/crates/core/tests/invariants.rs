//! Property tests for the structural invariants of subspaces, kernels and
//! relations.

use fockrel_core::fock::{eval_derivative, inner, kernel_vector, taylor_to_fock, FockVector, KernelSpec, TaylorSeries};
use fockrel_core::linalg::{
    complement, max_principal_angle, orthonormalize, principal_angles, project, subspace_equal, CMatrix, CVector,
    Subspace, DEFAULT_RANK_TOL,
};
use fockrel_core::relation::{LinearRelation, RelationPair};
use fockrel_core::symbols::{conjugation_matrix, smax_generators, ConjugationParams, SymbolTriple};
use fockrel_core::{c64, Complex64};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c64(re, im))
}

fn vector(n: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex(), n).prop_map(|v| CVector::new(v).unwrap())
}

/// A random subspace of `C^n` spanned by up to `n` random vectors.
fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    prop::collection::vec(vector(n), 0..=n).prop_map(move |vs| orthonormalize(n, &vs, DEFAULT_RANK_TOL).unwrap())
}

fn fock_vector(truncation: usize) -> impl Strategy<Value = FockVector> {
    vector(truncation + 1).prop_map(|v| FockVector::from_cvector(v).unwrap())
}

/// A random relation on `C^n` with `pairs` graph generators and a few
/// purely multivalued directions.
fn relation(n: usize) -> impl Strategy<Value = LinearRelation> {
    let pair = (fock_vector(n - 1), fock_vector(n - 1)).prop_map(|(f, g)| RelationPair::new(f, g).unwrap());
    (
        prop::collection::vec(pair, 0..=n),
        prop::collection::vec(fock_vector(n - 1), 0..2),
    )
        .prop_map(move |(pairs, mv)| LinearRelation::from_pairs(n - 1, &pairs, &mv, DEFAULT_RANK_TOL).unwrap())
}

fn square_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_splits_the_norm(s in subspace(6), v in vector(6)) {
        let p = project(&s, &v).unwrap();
        let r = v.sub(&p).unwrap();
        let lhs = v.norm().powi(2);
        let rhs = p.norm().powi(2) + r.norm().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs));
        prop_assert!(p.inner(&r).unwrap().norm() <= 1e-10 * (1.0 + lhs));
    }

    #[test]
    fn complement_is_an_involution(s in subspace(7)) {
        let c = complement(&s);
        prop_assert_eq!(c.dim() + s.dim(), 7);
        prop_assert!(subspace_equal(&complement(&c), &s, 1e-9).unwrap());
    }

    #[test]
    fn principal_angles_are_symmetric(s1 in subspace(6), s2 in subspace(6)) {
        let a = principal_angles(&s1, &s2).unwrap();
        let b = principal_angles(&s2, &s1).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
            prop_assert!((0.0..=core::f64::consts::FRAC_PI_2 + 1e-12).contains(x));
        }
    }

    #[test]
    fn kernel_reproduces_derivatives(
        coeffs in prop::collection::vec(complex(), 1..12),
        z in complex(),
        k in 0usize..4,
    ) {
        let taylor = TaylorSeries::new(coeffs).unwrap();
        let f = taylor_to_fock(&taylor, 25).unwrap();
        let direct = taylor.derivative(k).eval(z);
        let via_kernel = eval_derivative(&f, z, k).unwrap();
        prop_assert!((direct - via_kernel).norm() <= 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn kernel_gram_is_exponential(z in complex(), w in complex()) {
        let kz = kernel_vector(&KernelSpec::derivative(z, 0), 40).unwrap();
        let kw = kernel_vector(&KernelSpec::derivative(w, 0), 40).unwrap();
        let expected = (w * z.conj()).exp();
        prop_assert!((inner(&kz, &kw).unwrap() - expected).norm() <= 1e-12 * expected.norm().max(1.0));
    }

    #[test]
    fn adjoint_is_an_involution(r in relation(5)) {
        let twice = r.adjoint().adjoint();
        prop_assert!(subspace_equal(twice.graph(), r.graph(), 1e-8).unwrap());
    }

    #[test]
    fn graph_and_adjoint_dimensions_add_up(r in relation(5)) {
        prop_assert_eq!(r.dim() + r.adjoint().dim(), 10);
    }

    #[test]
    fn adjoint_multivalued_part_is_domain_complement(r in relation(5)) {
        let mv = r.adjoint().multivalued_part();
        let target = complement(&r.domain());
        prop_assert_eq!(mv.dim(), target.dim());
        prop_assert!(max_principal_angle(&mv, &target).unwrap() <= 1e-7);
    }

    #[test]
    fn norm_is_unitarily_invariant(m in square_matrix(5), phases in prop::collection::vec(0.0..TAU, 5)) {
        let rotated = CMatrix::from_fn(5, 5, |i, j| Complex64::from_polar(1.0, phases[i]) * m[(i, j)]);
        let a = LinearRelation::from_matrix(&m, DEFAULT_RANK_TOL).unwrap().relation_norm().value();
        let b = LinearRelation::from_matrix(&rotated, DEFAULT_RANK_TOL).unwrap().relation_norm().value();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn matrix_relation_norm_is_spectral_norm(m in square_matrix(4)) {
        let r = LinearRelation::from_matrix(&m, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(r.multivalued_part().dim(), 0);
        let sigma = fockrel_core::linalg::svd(&m).singular_values[0];
        prop_assert!((r.relation_norm().value() - sigma).abs() <= 1e-9 * (1.0 + sigma));
    }

    #[test]
    fn conjugation_is_an_involution(alpha in 0.0..TAU, radius in 0.0..1.0f64, gamma in 0.0..TAU) {
        let p = ConjugationParams::from_angles(alpha, radius, gamma);
        let m = conjugation_matrix(&p, 40).unwrap();
        let square = m.matmul(&m.conj()).unwrap().block(0, 21, 0, 21);
        prop_assert!(square.max_abs_diff(&CMatrix::identity(21)) <= 1e-8);
    }

    #[test]
    fn generators_solve_the_relation_equation(
        c in complex(), d in complex(), a in complex(), b in complex(),
        e in complex(), f in complex(), m in 0usize..3,
    ) {
        prop_assume!(c.norm() > 0.1 && a.norm() > 0.1 && (e.norm() > 0.1 || f.norm() > 0.1));
        let t = SymbolTriple::new(c, d, a, b, e, f, m).unwrap();
        let gens = smax_generators(&t, 30, 10).unwrap();
        for z in [c64(0.0, 0.0), c64(0.3, -0.2), c64(-0.4, 0.1)] {
            for p in &gens.pairs {
                let lhs = t.weight(z) * p.f.to_taylor().eval(t.map(z));
                let rhs = t.factor(z) * p.g.to_taylor().derivative(m).eval(z);
                let scale = 1.0 + lhs.norm().max(rhs.norm());
                prop_assert!((lhs - rhs).norm() <= 1e-9 * scale);
            }
        }
    }
}

#[test]
fn coordinate_subspaces_have_exact_angles() {
    let a = Subspace::coordinate(4, [0, 1]);
    let b = Subspace::coordinate(4, [1, 2]);
    let angles = principal_angles(&a, &b).unwrap();
    assert!(angles[0].abs() < 1e-15);
    assert!((angles[1] - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
}
