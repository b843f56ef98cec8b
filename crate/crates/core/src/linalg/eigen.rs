use num_complex::Complex64;

use super::{require_hermitian, require_square, ComplexMatrix, LinalgError};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;
const QR_DEFLATION_TOL: f64 = 1e-14;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`. Each
    /// column has its largest-magnitude component real and positive.
    pub vectors: ComplexMatrix,
}

/// 2×2 unitary acting on coordinates `p`, `q`.
#[derive(Clone, Copy)]
pub(crate) struct Rotation {
    pub(crate) u00: Complex64,
    pub(crate) u01: Complex64,
    pub(crate) u10: Complex64,
    pub(crate) u11: Complex64,
}

impl Rotation {
    /// Unitary `U` that diagonalizes `[[a, h], [h̄, b]]` by `U*·M·U`.
    pub(crate) fn jacobi(a: f64, b: f64, h: Complex64) -> Self {
        let habs = h.norm();
        let u = h / habs;
        let theta = (b - a) / (2.0 * habs);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let ubar = u.conj();
        Self {
            u00: Complex64::new(c, 0.0),
            u01: Complex64::new(s, 0.0),
            u10: -ubar * s,
            u11: ubar * c,
        }
    }

    /// `M ← M·U` on columns `p`, `q`.
    pub(crate) fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for i in 0..m.rows() {
            let (x, y) = (m[(i, p)], m[(i, q)]);
            m[(i, p)] = x * self.u00 + y * self.u10;
            m[(i, q)] = x * self.u01 + y * self.u11;
        }
    }

    /// `M ← U*·M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for j in 0..m.cols() {
            let (x, y) = (m[(p, j)], m[(q, j)]);
            m[(p, j)] = self.u00.conj() * x + self.u10.conj() * y;
            m[(q, j)] = self.u01.conj() * x + self.u11.conj() * y;
        }
    }
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    require_hermitian(h)?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_REL_TOL * h.frobenius_norm();

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                method: "Jacobi eigensolver",
                iterations: sweeps,
                partial: Box::new(a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let rot = Rotation::jacobi(a[(p, p)].re, a[(q, q)].re, apq);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rot.apply_right(&mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        normalize_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(HermitianEig { values, vectors })
}

/// Rotates a vector so its first largest-magnitude component is real positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = Complex64::new(v[best].norm(), 0.0);
}

/// Householder reduction to upper Hessenberg form (similarity, eigenvalues preserved).
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in (k + 1)..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum();
        let beta = 2.0 / vnorm2;
        // Left: rows k+1.., columns k..
        for j in k..n {
            let dot: Complex64 = ((k + 1)..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let f = dot * beta;
            for i in (k + 1)..n {
                let vi = v[i];
                h[(i, j)] -= vi * f;
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let dot: Complex64 = ((k + 1)..n).map(|j| h[(i, j)] * v[j]).sum();
            let f = dot * beta;
            for j in (k + 1)..n {
                let vj = v[j];
                h[(i, j)] -= f * vj.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let (plus, minus) = (p + disc, p - disc);
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// Eigenvalues of a general square matrix: Hessenberg reduction followed by
/// single-shift complex QR with Wilkinson shifts.
pub fn general_eig(m: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    require_square(m)?;
    let n = m.rows();
    let mut h = hessenberg(m);
    let norm = h.frobenius_norm();
    let mut eigs = vec![Complex64::new(0.0, 0.0); n];
    let zero = Complex64::new(0.0, 0.0);

    let max_iterations = 100 * n;
    let mut total = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            let sub = h[(lo, lo - 1)].norm();
            if sub <= QR_DEFLATION_TOL * scale || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total == max_iterations {
            return Err(LinalgError::NoConvergence {
                method: "Hessenberg QR",
                iterations: total,
                partial: Box::new(h),
            });
        }
        total += 1;
        since_deflation += 1;

        let mu = if since_deflation % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 1.5
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = a.norm().hypot(b.norm());
            let (c, s) = if r == 0.0 {
                (1.0, zero)
            } else if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                let phase = a / a.norm();
                (a.norm() / r, phase * b.conj() / r)
            };
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn hermitian_one_by_one() {
        let e = hermitian_eig(&ComplexMatrix::zeros(1, 1)).unwrap();
        assert_eq!(e.values, vec![0.0]);
        assert_eq!(e.vectors[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn hermitian_diagonal_and_swap() {
        let e = hermitian_eig(&ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]).unwrap()).unwrap();
        assert_eq!(e.values, vec![2.0, 3.0]);
        assert!(e.vectors.approx_eq(&ComplexMatrix::identity(2), 0.0));

        let e = hermitian_eig(&ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_complex_entries() {
        let h = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, -2.0)], vec![c(0.0, 2.0), c(1.0, 0.0)]]).unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        for j in 0..2 {
            let v = e.vectors.column(j);
            let hv = h.mul_vec(&v);
            for i in 0..2 {
                assert!((hv[i] - v[i] * e.values[j]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn general_eig_examples() {
        let d = general_eig(&ComplexMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)])).unwrap();
        assert_eq!(sorted(d), vec![c(0.0, -1.0), c(0.0, 1.0)]);

        let rot = general_eig(&ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap()).unwrap();
        let rot = sorted(rot);
        assert!((rot[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((rot[1] - c(0.0, 1.0)).norm() < 1e-14);

        let jordan = general_eig(&ComplexMatrix::from_real_rows(&[&[5.0, 1.0], &[0.0, 5.0]]).unwrap()).unwrap();
        assert_eq!(jordan, vec![c(5.0, 0.0), c(5.0, 0.0)]);
    }

    #[test]
    fn general_eig_companion_matrix() {
        // Roots 1, 2, 3, 4 of (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24.
        let m = ComplexMatrix::from_real_rows(&[
            &[10.0, -35.0, 50.0, -24.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let e = sorted(general_eig(&m).unwrap());
        for (k, z) in e.iter().enumerate() {
            assert!((z - c(k as f64 + 1.0, 0.0)).norm() < 1e-9, "{z}");
        }
    }

    #[test]
    fn phase_normalization() {
        let mut v = vec![c(0.0, 0.1), c(0.0, -2.0)];
        normalize_phase(&mut v);
        assert_eq!(v[1], c(2.0, 0.0));
        assert!((v[0] - c(-0.1, 0.0)).norm() < 1e-16);
    }
}
