use num_complex::Complex64;

use super::{require_hermitian, require_square, ComplexMatrix, LinalgError};

const PIVOT_REL_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P·M = L·U`, packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self, LinalgError> {
        require_square(m)?;
        let n = m.rows();
        let threshold = PIVOT_REL_TOL * m.frobenius_norm();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(LinalgError::Singular { step: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv_pivot = lu[(k, k)].inv();
            for i in (k + 1)..n {
                let factor = lu[(i, k)] * inv_pivot;
                lu[(i, k)] = factor;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{n} right-hand-side rows"),
                found: format!("{}", rhs.rows()),
            });
        }
        let k = rhs.cols();
        let mut x = ComplexMatrix::from_fn(n, k, |i, j| rhs[(self.perm[i], j)]);
        for col in 0..k {
            for i in 0..n {
                let mut acc = x[(i, col)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, col)];
                for j in (i + 1)..n {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn determinant(&self) -> Complex64 {
        let sign = if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.lu.diagonal().iter().product::<Complex64>() * sign
    }

    /// `ln |det M|`, safe against overflow for large matrices.
    pub fn log_abs_determinant(&self) -> f64 {
        self.lu.diagonal().iter().map(|z| z.norm().ln()).sum()
    }
}

/// Solves `M·X = RHS` by LU with partial pivoting.
pub fn solve_linear(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Lu::new(m)?.solve(rhs)
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Lu::new(m)?.solve(&ComplexMatrix::identity(m.rows()))
}

/// Determinant via LU; a singular matrix yields zero.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    match Lu::new(m) {
        Ok(lu) => Ok(lu.determinant()),
        Err(LinalgError::Singular { .. }) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Cholesky factor `L` (lower triangular, positive real diagonal) with `G = L·L*`.
pub fn cholesky(g: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    require_hermitian(g)?;
    let n = g.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = g[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { step: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut acc = g[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / djj;
        }
    }
    Ok(l)
}

/// Least-squares solution of an overdetermined system `M·X ≈ RHS`
/// (`rows ≥ cols`) by Householder QR.
pub fn lstsq_qr(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(LinalgError::DimensionMismatch {
            expected: "rows >= cols".into(),
            found: format!("{rows}x{cols}"),
        });
    }
    if rhs.rows() != rows {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{rows} right-hand-side rows"),
            found: format!("{}", rhs.rows()),
        });
    }
    let threshold = PIVOT_REL_TOL * m.frobenius_norm();
    let mut r = m.clone();
    let mut b = rhs.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); rows];
    for k in 0..cols {
        let norm: f64 = (k..rows).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= threshold || norm == 0.0 {
            return Err(LinalgError::Singular { step: k, pivot: norm });
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in k..rows {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..rows).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 > 0.0 {
            let beta = 2.0 / vnorm2;
            for j in k..cols {
                let dot: Complex64 = (k..rows).map(|i| v[i].conj() * r[(i, j)]).sum();
                let f = dot * beta;
                for i in k..rows {
                    let vi = v[i];
                    r[(i, j)] -= vi * f;
                }
            }
            for j in 0..b.cols() {
                let dot: Complex64 = (k..rows).map(|i| v[i].conj() * b[(i, j)]).sum();
                let f = dot * beta;
                for i in k..rows {
                    let vi = v[i];
                    b[(i, j)] -= vi * f;
                }
            }
        }
    }
    let mut x = ComplexMatrix::zeros(cols, b.cols());
    for j in 0..b.cols() {
        for i in (0..cols).rev() {
            let mut acc = b[(i, j)];
            for k in (i + 1)..cols {
                acc -= r[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / r[(i, i)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn identity_system_returns_rhs() {
        let rhs = real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let x = solve_linear(&ComplexMatrix::identity(2), &rhs).unwrap();
        assert!(x.approx_eq(&rhs, 1e-15));
    }

    #[test]
    fn diagonal_and_triangular_solves() {
        let x = solve_linear(&real(&[&[2.0, 0.0], &[0.0, 4.0]]), &real(&[&[2.0], &[4.0]])).unwrap();
        assert!(x.approx_eq(&real(&[&[1.0], &[1.0]]), 1e-15));
        let x = solve_linear(&real(&[&[1.0, 1.0], &[0.0, 1.0]]), &real(&[&[3.0], &[2.0]])).unwrap();
        assert!(x.approx_eq(&real(&[&[1.0], &[2.0]]), 1e-15));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(solve_linear(&m, &ComplexMatrix::identity(2)), Err(LinalgError::Singular { .. })));
        assert_eq!(determinant(&m).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        let m = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((determinant(&m).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn cholesky_examples() {
        assert!(cholesky(&ComplexMatrix::identity(3)).unwrap().approx_eq(&ComplexMatrix::identity(3), 0.0));
        let l = cholesky(&real(&[&[4.0, 0.0], &[0.0, 9.0]])).unwrap();
        assert!(l.approx_eq(&real(&[&[2.0, 0.0], &[0.0, 3.0]]), 1e-15));
        let l = cholesky(&real(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        let expected = real(&[&[2f64.sqrt(), 0.0], &[1.0 / 2f64.sqrt(), 1.5f64.sqrt()]]);
        assert!(l.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(cholesky(&g), Err(LinalgError::NotPositiveDefinite { step: 1, .. })));
        let h = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(cholesky(&h), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn least_squares_matches_consistent_system() {
        // Overdetermined but consistent: x = (1, -1).
        let m = real(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let b = real(&[&[1.0], &[-1.0], &[0.0]]);
        let x = lstsq_qr(&m, &b).unwrap();
        assert!(x.approx_eq(&real(&[&[1.0], &[-1.0]]), 1e-14));
    }

    #[test]
    fn least_squares_minimizes_residual() {
        // Fit a constant to (1, 2, 3): the mean.
        let m = real(&[&[1.0], &[1.0], &[1.0]]);
        let b = real(&[&[1.0], &[2.0], &[3.0]]);
        let x = lstsq_qr(&m, &b).unwrap();
        assert!((x[(0, 0)] - 2.0).norm() < 1e-14);
    }
}
