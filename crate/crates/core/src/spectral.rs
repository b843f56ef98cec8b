//! Spectral data of a skew-Hermitian system matrix.
//!
//! With `A = Σ iλ_j·v_j·v_j*` (orthonormal `v_j`, `λ` ascending) the control
//! matrix is seen mode by mode through `b_j = B*·v_j`. Every decay-rate
//! bound in [`crate::bounds`] is a function of the `λ_j`, the `b_j` and
//! a few norms of `B`, all collected in [`SpectralData`].

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    general_eig, hermitian_eig, normalize_phase, null_vector, singular_values, solve_linear, vec_norm,
    ComplexMatrix, LinalgError,
};

/// Relative tolerance for the skew-Hermitian gate: `‖A + A*‖_F ≤ tol·(1 + ‖A‖_F)`.
pub const SKEW_TOL: f64 = 1e-9;
/// Eigenvalues closer than `COINCIDENCE_TOL·max(1, Δ)` count as one repeated eigenvalue.
pub const COINCIDENCE_TOL: f64 = 1e-8;
/// Distance below which `z` is considered to sit on a pole of `Φ`.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("A is not skew-Hermitian (‖A + A*‖_F = {defect:.3e})")]
    NotSkewHermitian { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Φ(z) evaluated at a pole: z = {z} is within {distance:.3e} of iλ_{index}")]
    Pole { z: Complex64, index: usize, distance: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Eigen-decomposition of `A` plus every derived spectral quantity.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// `λ₁ ≤ … ≤ λ_n`; the eigenvalues of `A` are `iλ_j`.
    pub lambdas: Vec<f64>,
    /// Unit eigenvectors `v_j` as columns, shared between configurations that
    /// only differ in `B`.
    pub vectors: Arc<ComplexMatrix>,
    /// `b_j = B*·v_j`.
    pub b_vectors: Vec<Vec<Complex64>>,
    pub b_norms: Vec<f64>,
    /// `‖B‖` (spectral).
    pub b_norm: f64,
    pub b_frobenius: f64,
    /// Singular values of `B`, descending.
    pub sigma: Vec<f64>,
    /// `δ`, the minimal separation (`+∞` for `n = 1`, `0` with repeated eigenvalues).
    pub delta: f64,
    /// `δ_k`, the separation of `λ_k` from the rest.
    pub delta_k: Vec<f64>,
    /// `Δ = λ_n − λ₁`.
    pub diameter: f64,
    /// `Δ_k = min_j (λ_{j+k} − λ_j)` for `k = 1..n−1`, stored at index `k − 1`.
    pub delta_table: Vec<f64>,
    /// False when built through the non-normal override; bounds are then
    /// only "would-be" values.
    pub skew_hermitian: bool,
}

impl SpectralData {
    /// Assembles spectral data from eigenvalues, eigenvectors, the mode
    /// vectors `b_j` and the singular values of `B`.
    pub fn from_parts(
        lambdas: Vec<f64>,
        vectors: Arc<ComplexMatrix>,
        b_vectors: Vec<Vec<Complex64>>,
        sigma: Vec<f64>,
        b_frobenius: f64,
    ) -> Self {
        let n = lambdas.len();
        assert_eq!(b_vectors.len(), n);
        let diameter = if n > 0 { lambdas[n - 1] - lambdas[0] } else { 0.0 };
        let coincide = COINCIDENCE_TOL * diameter.max(1.0);
        let gap = |x: f64| if x.abs() <= coincide { 0.0 } else { x.abs() };

        let delta_k: Vec<f64> = (0..n)
            .map(|k| {
                let left = if k > 0 { gap(lambdas[k] - lambdas[k - 1]) } else { f64::INFINITY };
                let right = if k + 1 < n { gap(lambdas[k + 1] - lambdas[k]) } else { f64::INFINITY };
                left.min(right)
            })
            .collect();
        let delta = delta_k.iter().copied().fold(f64::INFINITY, f64::min);
        let delta_table: Vec<f64> = (1..n)
            .map(|k| (0..n - k).map(|j| gap(lambdas[j + k] - lambdas[j])).fold(f64::INFINITY, f64::min))
            .collect();
        let b_norms = b_vectors.iter().map(|b| vec_norm(b)).collect();
        let b_norm = sigma.first().copied().unwrap_or(0.0);
        Self {
            lambdas,
            vectors,
            b_vectors,
            b_norms,
            b_norm,
            b_frobenius,
            sigma,
            delta,
            delta_k,
            diameter,
            delta_table,
            skew_hermitian: true,
        }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn m(&self) -> usize {
        self.sigma.len()
    }

    /// Smallest singular value `σ_m` of `B`.
    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// `Δ_k` for `1 ≤ k ≤ n − 1`.
    pub fn delta_m(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return None;
        }
        self.delta_table.get(k - 1).copied()
    }

    pub fn has_repeated_eigenvalues(&self) -> bool {
        self.delta == 0.0
    }
}

/// Eigen-decomposition of a skew-Hermitian `A` (via the Hermitian `−iA`) and
/// the mode vectors of `B`.
pub fn decompose(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SpectralData, SpectralError> {
    check_conformable(a, b)?;
    let defect = a.skew_hermitian_defect();
    if defect > SKEW_TOL * (1.0 + a.frobenius_norm()) {
        return Err(SpectralError::NotSkewHermitian { defect });
    }
    let h = a.scale(Complex64::new(0.0, -1.0)).hermitian_part();
    let eig = hermitian_eig(&h)?;
    Ok(assemble(eig.values, eig.vectors, b))
}

/// Decomposition for an arbitrary `A` with purely imaginary, simple spectrum.
/// Eigenvectors are unit null vectors of `A − iλ_j·I` and are not orthogonal
/// in general; the resulting bounds carry no guarantee.
pub fn decompose_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SpectralData, SpectralError> {
    check_conformable(a, b)?;
    let mut lambdas: Vec<f64> = general_eig(a)?.iter().map(|z| z.im).collect();
    lambdas.sort_by(f64::total_cmp);
    let n = a.rows();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (j, &lambda) in lambdas.iter().enumerate() {
        let shifted = a.shift_diagonal(Complex64::new(0.0, -lambda));
        let (mut v, _) = null_vector(&shifted)?;
        normalize_phase(&mut v);
        vectors.set_column(j, &v);
    }
    let mut data = assemble(lambdas, vectors, b);
    data.skew_hermitian = false;
    Ok(data)
}

fn check_conformable(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(), SpectralError> {
    if !a.is_square() || b.rows() != a.rows() {
        return Err(SpectralError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn assemble(lambdas: Vec<f64>, vectors: ComplexMatrix, b: &ComplexMatrix) -> SpectralData {
    let bh = b.adjoint();
    let b_vectors = (0..vectors.cols()).map(|j| bh.mul_vec(&vectors.column(j))).collect();
    SpectralData::from_parts(
        lambdas,
        Arc::new(vectors),
        b_vectors,
        singular_values(b),
        b.frobenius_norm(),
    )
}

/// Decay rate `min |Re ν|` over the closed-loop spectrum.
pub fn gamma_decay(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min)
}

/// `Φ(z) = I − Σ_j (z − iλ_j)⁻²·b_j·b_j*`.
pub fn phi(z: Complex64, data: &SpectralData) -> Result<ComplexMatrix, SpectralError> {
    let m = data.m();
    let mut out = ComplexMatrix::identity(m);
    for (j, (&lambda, b)) in data.lambdas.iter().zip(&data.b_vectors).enumerate() {
        let d = z - Complex64::new(0.0, lambda);
        if d.norm() <= POLE_TOL {
            return Err(SpectralError::Pole {
                z,
                index: j + 1,
                distance: d.norm(),
            });
        }
        let w = (d * d).inv();
        for r in 0..m {
            for c in 0..m {
                out[(r, c)] -= w * b[r] * b[c].conj();
            }
        }
    }
    Ok(out)
}

/// `Φ(z) = I − B*(zI − A)⁻²B` evaluated directly from the matrices.
pub fn phi_direct(z: Complex64, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, SpectralError> {
    let resolvent_b = solve_linear(&(-a).shift_diagonal(z), b)?;
    let twice = solve_linear(&(-a).shift_diagonal(z), &resolvent_b)?;
    Ok(&ComplexMatrix::identity(b.cols()) - &(&b.adjoint() * &twice))
}

/// Controllability measure `d₀ = min_k ‖b_k‖`.
pub fn d0(data: &SpectralData) -> f64 {
    data.b_norms.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Upper bound on the distance to uncontrollability and, for `m = 1`, the
/// decay-rate bound it implies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DucBounds {
    /// `min(d₀, Δ_m/2)`.
    pub upper: f64,
    /// `u²/√(‖B‖² + 2u²)` with `u = upper` standing in for `d_uc`. This is a
    /// bound derived from a bound, reported for comparison only.
    pub gamma_lower_m1: Option<f64>,
}

/// `None` when `m ≥ n`.
pub fn duc_bounds(data: &SpectralData) -> Option<DucBounds> {
    let (n, m) = (data.n(), data.m());
    if m >= n {
        return None;
    }
    let half_gap = data.delta_m(m).unwrap_or(f64::INFINITY) / 2.0;
    let upper = d0(data).min(half_gap);
    Some(DucBounds {
        upper,
        gamma_lower_m1: (m == 1).then(|| decay_lower_from_duc(upper, data.b_norm)),
    })
}

/// `d²/√(‖B‖² + 2d²)`, the single-input decay bound in terms of `d_uc`.
pub fn decay_lower_from_duc(duc: f64, b_norm: f64) -> f64 {
    if duc == 0.0 {
        return 0.0;
    }
    duc * duc / (b_norm * b_norm + 2.0 * duc * duc).sqrt()
}
