//! Built-in benchmark systems.

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::riccati::SystemSpec;
use crate::string_model::StringConfig;

/// `(a, b)` for the seven two-control systems.
pub const PAIR_ROWS: [(f64, f64); 7] = [
    (15.0, 45.0),
    (5.0, 15.0),
    (1.8, 5.4),
    (1.0, 10.0),
    (4.0, 4.1),
    (0.2, 0.22),
    (0.1, 0.11),
];

/// Shifts used in the shifted-LQR experiment.
pub const SHIFTS: [f64; 3] = [0.0, 1.0, 2.0];

/// Coupling `t` used for the non-normal counterexamples.
pub const COUNTEREXAMPLE_T: f64 = 100.0;

fn imag_diag(lambdas: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diag(&lambdas.iter().map(|&l| Complex64::new(0.0, l)).collect::<Vec<_>>())
}

fn ones(n: usize) -> ComplexMatrix {
    ComplexMatrix::column_vector(&vec![Complex64::new(1.0, 0.0); n])
}

/// `A = i·diag(−b, −a, a, b)`, `B` stacks two copies of `I₂`.
pub fn pair_system(a: f64, b: f64) -> SystemSpec {
    let am = imag_diag(&[-b, -a, a, b]);
    let bm = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]])
        .expect("constant matrix");
    SystemSpec::new(am, bm, format!("pair a={a} b={b}")).expect("valid by construction")
}

/// `A = i·diag(−5, …, 5)` with a single actuator reaching every mode.
pub fn shifted_lqr_system() -> SystemSpec {
    let lambdas: Vec<f64> = (-5..=5).map(f64::from).collect();
    SystemSpec::new(imag_diag(&lambdas), ones(11), "eleven modes, one input").expect("valid by construction")
}

/// `i·[[−1, t], [0, 1]]` and `(1, 1)ᵀ`: imaginary spectrum, not normal.
pub fn counterexample_two(t: f64) -> (ComplexMatrix, ComplexMatrix) {
    let a = ComplexMatrix::from_real_rows(&[&[-1.0, t], &[0.0, 1.0]])
        .expect("constant matrix")
        .scale(Complex64::new(0.0, 1.0));
    (a, ones(2))
}

/// `i·[[−1, t, 0], [0, 1, 0], [0, 0, 0]]` and `(1, 1, 1)ᵀ`.
pub fn counterexample_three(t: f64) -> (ComplexMatrix, ComplexMatrix) {
    let a = ComplexMatrix::from_real_rows(&[&[-1.0, t, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]])
        .expect("constant matrix")
        .scale(Complex64::new(0.0, 1.0));
    (a, ones(3))
}

/// `N = 30`, `τ/h = 10`, `M = 50`.
pub fn benchmark_string(m: usize) -> StringConfig {
    StringConfig::new(30, m, 10.0, 50.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::general_eig;

    #[test]
    fn counterexamples_have_imaginary_spectrum() {
        for (a, _) in [counterexample_two(100.0), counterexample_three(100.0)] {
            assert!(a.skew_hermitian_defect() > 1.0);
            for z in general_eig(&a).unwrap() {
                assert!(z.re.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn generators_validate() {
        for (a, b) in PAIR_ROWS {
            assert_eq!(pair_system(a, b).n(), 4);
        }
        assert_eq!(shifted_lqr_system().m(), 1);
        assert!(benchmark_string(2).validate_template().is_ok());
    }
}
