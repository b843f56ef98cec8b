//! Random system generators shared by the integration tests.
#![allow(dead_code)]

use lqrdecay::linalg::{hermitian_eig, ComplexMatrix};
use lqrdecay::riccati::SystemSpec;
use num_complex::Complex64;
use rand::Rng;

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
    })
}

/// Eigenvectors of a random Hermitian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n, 1.0);
    let h = &g + &g.adjoint();
    hermitian_eig(&h).expect("hermitian").vectors
}

/// `V·diag(iλ)·V*` with `λ` drawn from `[-span, span]`.
pub fn random_skew(rng: &mut impl Rng, n: usize, span: f64) -> (ComplexMatrix, Vec<f64>) {
    let lambdas: Vec<f64> = (0..n).map(|_| rng.gen_range(-span..span)).collect();
    let v = random_unitary(rng, n);
    let d = ComplexMatrix::from_diag(&lambdas.iter().map(|&l| Complex64::new(0.0, l)).collect::<Vec<_>>());
    (&(&v * &d) * &v.adjoint(), lambdas)
}

/// Skew-Hermitian system with `n` in `n_range`, random `m ≤ n` and a
/// control scale spread over three decades.
pub fn random_system(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>, label: &str) -> SystemSpec {
    let n = rng.gen_range(n_range);
    let m = rng.gen_range(1..=n);
    let span = 10f64.powf(rng.gen_range(-0.5..1.5));
    let (a, _) = random_skew(rng, n, span);
    let scale = 10f64.powf(rng.gen_range(-1.5..1.0));
    let b = random_complex(rng, n, m, scale);
    SystemSpec::new(a, b, label).expect("consistent dimensions")
}
