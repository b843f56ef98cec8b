mod common;

use lqrdecay::linalg::{
    cholesky, determinant, general_eig, hermitian_eig, inverse, lstsq_qr, singular_values, solve_linear,
    spectral_norm, ComplexMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    (a - b).frobenius_norm() <= tol * a.frobenius_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian_reconstruction(seed in any::<u64>(), n in 1usize..14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_complex(&mut rng, n, n, 3.0);
        let h = &g + &g.adjoint();
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let d = ComplexMatrix::from_diag(&e.values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
        let back = &(&e.vectors * &d) * &e.vectors.adjoint();
        prop_assert!(rel_close(&h, &back, 1e-12));
        let gram = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(gram.approx_eq(&ComplexMatrix::identity(n), 1e-12));
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_complex(&mut rng, n, n, 1.0);
        let eigs = general_eig(&m).unwrap();
        prop_assert_eq!(eigs.len(), n);
        let sum: Complex64 = eigs.iter().sum();
        let prod: Complex64 = eigs.iter().product();
        let det = determinant(&m).unwrap();
        prop_assert!((sum - m.trace()).norm() <= 1e-10 * (n as f64));
        prop_assert!((prod - det).norm() <= 1e-9 * det.norm().max(1.0));
        // Each eigenvalue makes M − νI singular.
        for nu in eigs {
            let shifted = m.shift_diagonal(-nu);
            let smin = *singular_values(&shifted).last().unwrap();
            prop_assert!(smin <= 1e-8 * spectral_norm(&m).max(1.0), "σ_min = {smin}");
        }
    }

    #[test]
    fn singular_values_are_unitarily_invariant(seed in any::<u64>(), r in 1usize..10, c in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_complex(&mut rng, r, c, 2.0);
        let u = common::random_unitary(&mut rng, r);
        let v = common::random_unitary(&mut rng, c);
        let s = singular_values(&m);
        let t = singular_values(&(&(&u * &m) * &v));
        prop_assert_eq!(s.len(), r.min(c));
        for (x, y) in s.iter().zip(&t) {
            prop_assert!((x - y).abs() <= 1e-11 * s[0].max(1.0));
        }
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let fro2: f64 = s.iter().map(|x| x * x).sum();
        prop_assert!((fro2.sqrt() - m.frobenius_norm()).abs() <= 1e-11 * m.frobenius_norm());
    }

    #[test]
    fn cholesky_and_solves(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_complex(&mut rng, n, n, 1.0);
        let g = (&m * &m.adjoint()).shift_diagonal(Complex64::new(1.0, 0.0));
        let l = cholesky(&g).unwrap();
        prop_assert!(rel_close(&g, &(&l * &l.adjoint()), 1e-12));
        let rhs = common::random_complex(&mut rng, n, 3, 1.0);
        let x = solve_linear(&g, &rhs).unwrap();
        prop_assert!(rel_close(&rhs, &(&g * &x), 1e-11));
        let y = lstsq_qr(&g, &rhs).unwrap();
        prop_assert!(rel_close(&x, &y, 1e-10));
        prop_assert!((&inverse(&g).unwrap() * &g).approx_eq(&ComplexMatrix::identity(n), 1e-10));
    }
}

#[test]
fn singular_matrix_is_rejected() {
    let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
    assert!(inverse(&m).is_err());
    assert!(cholesky(&m).is_err());
}
