use num_complex::Complex64;

use super::eigen::Rotation;
use super::{require_square, ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 100;

/// One-sided (Hestenes) Jacobi: orthogonalizes the columns of `w` in place,
/// accumulating the right rotations into `v` when given.
fn hestenes(w: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = w.cols();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, Complex64::new(0.0, 0.0));
                for i in 0..w.rows() {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::jacobi(alpha, beta, gamma);
                rot.apply_right(w, p, q);
                if let Some(v) = v.as_deref_mut() {
                    rot.apply_right(v, p, q);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut w = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    hestenes(&mut w, None);
    let mut s: Vec<f64> = (0..w.cols()).map(|j| super::vec_norm(&w.column(j))).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Induced 2-norm (largest singular value).
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m)[0]
}

/// Unit right singular vector of the smallest singular value of a square
/// matrix, together with that singular value.
pub fn null_vector(m: &ComplexMatrix) -> Result<(Vec<Complex64>, f64), LinalgError> {
    require_square(m)?;
    let n = m.cols();
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(n);
    hestenes(&mut w, Some(&mut v));
    let (j, sigma) = (0..n)
        .map(|j| (j, super::vec_norm(&w.column(j))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("square matrix has at least one column");
    Ok((v.column(j), sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(singular_values(&ComplexMatrix::identity(3)), vec![1.0, 1.0, 1.0]);
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(singular_values(&m), vec![3.0, 0.0]);
    }

    #[test]
    fn two_controls_four_states() {
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let s = singular_values(&b);
        assert_eq!(s.len(), 2);
        for x in s {
            assert!((x - 2f64.sqrt()).abs() < 1e-15);
        }
        // Wide input goes through the adjoint.
        assert_eq!(singular_values(&b.adjoint()).len(), 2);
    }

    #[test]
    fn rank_one() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        let s = singular_values(&m);
        assert!((s[0] - 5.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-14);
        let (v, sigma) = null_vector(&m).unwrap();
        assert!(sigma < 1e-14);
        let mv = m.mul_vec(&v);
        assert!(super::super::vec_norm(&mv) < 1e-14);
    }
}
