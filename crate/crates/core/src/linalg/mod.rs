//! Dense complex linear algebra.
//!
//! Everything here is written against [`ComplexMatrix`], a small row-major
//! container. Sizes in this crate stay below a few hundred, so the kernels
//! favour clarity and unconditional convergence over blocking.

mod decomp;
mod eigen;
mod matrix;
mod svd;

use thiserror::Error;

pub use decomp::{cholesky, determinant, inverse, lstsq_qr, solve_linear, Lu};
pub use eigen::{general_eig, hermitian_eig, normalize_phase, HermitianEig};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use svd::{null_vector, singular_values, spectral_norm};

/// Relative tolerance for accepting a matrix as Hermitian:
/// `‖H − H*‖_F ≤ TOL_HERM·(1 + ‖H‖_F)`.
pub const TOL_HERM: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is numerically singular (pivot {pivot:.3e} at step {step})")]
    Singular { step: usize, pivot: f64 },
    #[error("matrix is not positive definite (pivot {pivot:.3e} at step {step})")]
    NotPositiveDefinite { step: usize, pivot: f64 },
    #[error("{method} did not converge after {iterations} iterations")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        partial: Box<ComplexMatrix>,
    },
}

pub(crate) fn require_square(m: &ComplexMatrix) -> Result<(), LinalgError> {
    if m.is_square() {
        Ok(())
    } else {
        Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

pub(crate) fn require_hermitian(m: &ComplexMatrix) -> Result<(), LinalgError> {
    require_square(m)?;
    let defect = m.hermitian_defect();
    if defect > TOL_HERM * (1.0 + m.frobenius_norm()) {
        return Err(LinalgError::NotHermitian { defect });
    }
    Ok(())
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `u* v`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
