//! Continuous algebraic Riccati equation, Lyapunov equations and LQR costs.
//!
//! The regulator problem is `x' = Ax + Bu` with cost `∫ x*Qx + u*Ru dt`.
//! Its optimal feedback is `u = −Fx`, `F = R⁻¹B*X`, where `X` is the
//! stabilizing solution of
//!
//! ```text
//! X·B·R⁻¹·B*·X − X·A − A*·X − Q = 0.
//! ```
//!
//! [`solve_care`] computes `X` from the matrix sign function of the
//! Hamiltonian `[[A, −BR⁻¹B*], [−Q, −A*]]`, using scaled Newton iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    general_eig, hermitian_eig, lstsq_qr, singular_values, solve_linear, ComplexMatrix, LinalgError, Lu,
    TOL_HERM,
};
use crate::spectral::gamma_decay;

const SIGN_MAX_ITERATIONS: usize = 100;
const SIGN_REL_TOL: f64 = 1e-13;
/// Once the Newton step is this small, a step that fails to shrink means the
/// iteration has hit its rounding floor.
const SIGN_STAGNATION_TOL: f64 = 1e-8;
/// Determinant scaling is switched off near convergence, where it would only
/// perturb the quadratic phase.
const SIGN_SCALING_CUTOFF: f64 = 1e-2;
/// Largest state dimension for the Kronecker Lyapunov solver.
pub const LYAPUNOV_MAX_DIM: usize = 64;

#[derive(Debug, Error)]
pub enum RiccatiError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("matrix sign iteration did not converge in {iterations} steps (last relative step {last_step:.3e})")]
    NoConvergence { iterations: usize, last_step: f64 },
    #[error("closed loop is not stable (max Re = {max_real:.3e}); the pair is probably not stabilizable")]
    NotStabilizable { max_real: f64 },
    #[error("Lyapunov operator is not stable (max Re = {max_real:.3e})")]
    UnstableLyapunov { max_real: f64 },
    #[error("Lyapunov dimension {n} exceeds the Kronecker solver limit {LYAPUNOV_MAX_DIM}")]
    TooLarge { n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A regulator problem `(A, B, Q, R)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    #[serde(rename = "B")]
    pub b: ComplexMatrix,
    #[serde(rename = "Q")]
    pub q: ComplexMatrix,
    #[serde(rename = "R")]
    pub r: ComplexMatrix,
    pub label: String,
}

impl SystemSpec {
    /// System with `Q = I`, `R = I`.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, label: impl Into<String>) -> Result<Self, RiccatiError> {
        let q = ComplexMatrix::identity(a.rows());
        let r = ComplexMatrix::identity(b.cols());
        Self::with_weights(a, b, q, r, label)
    }

    pub fn with_weights(
        a: ComplexMatrix,
        b: ComplexMatrix,
        q: ComplexMatrix,
        r: ComplexMatrix,
        label: impl Into<String>,
    ) -> Result<Self, RiccatiError> {
        let sys = Self {
            a,
            b,
            q,
            r,
            label: label.into(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn validate(&self) -> Result<(), RiccatiError> {
        let (n, m) = (self.a.rows(), self.b.cols());
        if !self.a.is_square() {
            return Err(RiccatiError::DimensionMismatch(format!(
                "A is {}x{}, expected square",
                self.a.rows(),
                self.a.cols()
            )));
        }
        if self.b.rows() != n {
            return Err(RiccatiError::DimensionMismatch(format!("B has {} rows, A has {n}", self.b.rows())));
        }
        if (self.q.rows(), self.q.cols()) != (n, n) {
            return Err(RiccatiError::DimensionMismatch(format!("Q must be {n}x{n}")));
        }
        if (self.r.rows(), self.r.cols()) != (m, m) {
            return Err(RiccatiError::DimensionMismatch(format!("R must be {m}x{m}")));
        }
        for (name, w) in [("Q", &self.q), ("R", &self.r)] {
            if w.hermitian_defect() > TOL_HERM * (1.0 + w.frobenius_norm()) {
                return Err(RiccatiError::InvalidSystem(format!("{name} is not Hermitian")));
            }
            let min_eig = hermitian_eig(w)?.values[0];
            if min_eig <= 0.0 {
                return Err(RiccatiError::InvalidSystem(format!(
                    "{name} is not positive definite (min eigenvalue {min_eig:.3e})"
                )));
            }
        }
        if m > n {
            return Err(RiccatiError::InvalidSystem(format!("m = {m} exceeds n = {n}")));
        }
        let sv = singular_values(&self.b);
        if sv[m - 1] <= 1e-12 * sv[0] || sv[0] == 0.0 {
            return Err(RiccatiError::InvalidSystem("B has a nontrivial kernel".into()));
        }
        Ok(())
    }
}

/// Stabilizing CARE solution and the resulting closed loop.
#[derive(Clone, Debug)]
pub struct CareSolution {
    pub x: ComplexMatrix,
    /// `F = R⁻¹B*X`.
    pub feedback: ComplexMatrix,
    /// `A − B·F`.
    pub closed_loop: ComplexMatrix,
    pub closed_loop_eigs: Vec<Complex64>,
    /// `‖XBR⁻¹B*X − XA − A*X − Q‖_F`.
    pub residual: f64,
    /// Newton steps taken by the sign iteration.
    pub iterations: usize,
}

impl CareSolution {
    /// `‖X‖` as the induced 2-norm, i.e. the largest eigenvalue of `X`.
    pub fn x_norm(&self) -> f64 {
        hermitian_eig(&self.x).map_or(f64::NAN, |e| e.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
    }

    pub fn gamma_decay(&self) -> f64 {
        gamma_decay(&self.closed_loop_eigs)
    }

    /// Residual bound `1e−8·(‖Q‖_F + ‖X‖_F·‖A‖_F)` that every solution must meet.
    pub fn residual_tolerance(&self, sys: &SystemSpec) -> f64 {
        1e-8 * (sys.q.frobenius_norm() + self.x.frobenius_norm() * sys.a.frobenius_norm())
    }
}

/// `X·B·R⁻¹·B*·X − X·A − A*·X − Q`.
pub fn care_residual(sys: &SystemSpec, x: &ComplexMatrix) -> Result<ComplexMatrix, RiccatiError> {
    let r_inv_bh = solve_linear(&sys.r, &sys.b.adjoint())?;
    let quad = &(&(x * &sys.b) * &r_inv_bh) * x;
    let xa = x * &sys.a;
    let ahx = &sys.a.adjoint() * x;
    Ok(&(&(&quad - &xa) - &ahx) - &sys.q)
}

/// Matrix sign function by scaled Newton iteration. Returns the sign and the
/// number of steps.
pub fn matrix_sign(h: &ComplexMatrix) -> Result<(ComplexMatrix, usize), RiccatiError> {
    let dim = h.rows();
    let mut z = h.clone();
    let mut scaling = true;
    let mut last_step = f64::INFINITY;
    for it in 1..=SIGN_MAX_ITERATIONS {
        let lu = Lu::new(&z)?;
        let c = if scaling {
            (-lu.log_abs_determinant() / dim as f64).exp()
        } else {
            1.0
        };
        let z_inv = lu.solve(&ComplexMatrix::identity(dim))?;
        let next = &z.scale_real(0.5 * c) + &z_inv.scale_real(0.5 / c);
        let step = (&next - &z).frobenius_norm() / z.frobenius_norm();
        z = next;
        if step <= SIGN_REL_TOL {
            return Ok((z, it));
        }
        if step < SIGN_SCALING_CUTOFF {
            scaling = false;
        }
        if step < SIGN_STAGNATION_TOL && step >= last_step {
            return Ok((z, it));
        }
        last_step = step;
    }
    Err(RiccatiError::NoConvergence {
        iterations: SIGN_MAX_ITERATIONS,
        last_step,
    })
}

/// Stabilizing solution of the CARE for `sys`.
pub fn solve_care(sys: &SystemSpec) -> Result<CareSolution, RiccatiError> {
    sys.validate()?;
    let n = sys.n();
    let r_inv_bh = solve_linear(&sys.r, &sys.b.adjoint())?;
    let g = &sys.b * &r_inv_bh;
    let ham = ComplexMatrix::from_blocks(&sys.a, &(-&g), &(-&sys.q), &(-&sys.a.adjoint()));
    let (sign, iterations) = matrix_sign(&ham)?;

    let id = ComplexMatrix::identity(n);
    let s11 = sign.block(0, 0, n, n);
    let s12 = sign.block(0, n, n, n);
    let s21 = sign.block(n, 0, n, n);
    let s22 = sign.block(n, n, n, n);
    let lhs = ComplexMatrix::vstack(&s12, &(&s22 + &id));
    let rhs = -&ComplexMatrix::vstack(&(&s11 + &id), &s21);
    let x = lstsq_qr(&lhs, &rhs)?.hermitian_part();

    let residual = care_residual(sys, &x)?.frobenius_norm();
    let feedback = &r_inv_bh * &x;
    let closed_loop = &sys.a - &(&sys.b * &feedback);
    let closed_loop_eigs = general_eig(&closed_loop)?;
    let max_real = closed_loop_eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_real >= 0.0 {
        return Err(RiccatiError::NotStabilizable { max_real });
    }
    Ok(CareSolution {
        x,
        feedback,
        closed_loop,
        closed_loop_eigs,
        residual,
        iterations,
    })
}

/// Solves `A*·W + W·A + C = 0` for stable `A` through the `n²` Kronecker system.
/// `W = ∫₀^∞ exp(A*t)·C·exp(At) dt`.
pub fn solve_lyapunov(a: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix, RiccatiError> {
    if !a.is_square() || (c.rows(), c.cols()) != (a.rows(), a.cols()) {
        return Err(RiccatiError::DimensionMismatch("Lyapunov operands must be square and conforming".into()));
    }
    let n = a.rows();
    if n > LYAPUNOV_MAX_DIM {
        return Err(RiccatiError::TooLarge { n });
    }
    let max_real = general_eig(a)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_real >= 0.0 {
        return Err(RiccatiError::UnstableLyapunov { max_real });
    }
    // Column-major vec: vec(A*W) = (I ⊗ A*)·vec W, vec(W·A) = (Aᵀ ⊗ I)·vec W.
    let nn = n * n;
    let ah = a.adjoint();
    let mut k = ComplexMatrix::zeros(nn, nn);
    for col in 0..n {
        for i in 0..n {
            for l in 0..n {
                k[(col * n + i, col * n + l)] += ah[(i, l)];
            }
        }
    }
    for col in 0..n {
        for l in 0..n {
            let alc = a[(l, col)];
            for i in 0..n {
                k[(col * n + i, l * n + i)] += alc;
            }
        }
    }
    let rhs = ComplexMatrix::from_fn(nn, 1, |idx, _| -c[(idx % n, idx / n)]);
    let w = solve_linear(&k, &rhs)?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| w[(j * n + i, 0)]).hermitian_part())
}

/// Outcome of the shifted regulator design: an LQR feedback computed for
/// `(A + τI, B)` and applied to the unshifted plant.
#[derive(Clone, Debug)]
pub struct ShiftedLqr {
    pub tau: f64,
    pub feedback: ComplexMatrix,
    pub closed_loop: ComplexMatrix,
    pub closed_loop_eigs: Vec<Complex64>,
    pub gamma_decay: f64,
    /// Cost matrix of the shifted feedback under the unshifted functional:
    /// `A_cl*X + X·A_cl + Q + F*RF = 0`.
    pub x_tau: ComplexMatrix,
    /// State-only cost matrix: `A_cl*X + X·A_cl + I = 0`.
    pub x0_tau: ComplexMatrix,
}

impl ShiftedLqr {
    pub fn x_tau_norm(&self) -> f64 {
        hermitian_norm(&self.x_tau)
    }

    pub fn x0_tau_norm(&self) -> f64 {
        hermitian_norm(&self.x0_tau)
    }
}

fn hermitian_norm(m: &ComplexMatrix) -> f64 {
    hermitian_eig(m).map_or(f64::NAN, |e| e.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

pub fn shifted_lqr(sys: &SystemSpec, tau: f64) -> Result<ShiftedLqr, RiccatiError> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(RiccatiError::InvalidSystem(format!("shift must be nonnegative, got {tau}")));
    }
    let shifted = SystemSpec {
        a: sys.a.shift_diagonal(Complex64::new(tau, 0.0)),
        ..sys.clone()
    };
    let care = solve_care(&shifted)?;
    let feedback = care.feedback;
    let closed_loop = &sys.a - &(&sys.b * &feedback);
    let closed_loop_eigs = general_eig(&closed_loop)?;
    let weight = &sys.q + &(&(&feedback.adjoint() * &sys.r) * &feedback);
    let x_tau = solve_lyapunov(&closed_loop, &weight)?;
    let x0_tau = solve_lyapunov(&closed_loop, &ComplexMatrix::identity(sys.n()))?;
    Ok(ShiftedLqr {
        tau,
        gamma_decay: gamma_decay(&closed_loop_eigs),
        feedback,
        closed_loop,
        closed_loop_eigs,
        x_tau,
        x0_tau,
    })
}

/// Minimal cost `x₀*·X·x₀` from initial state `x₀`.
pub fn optimal_cost(x: &ComplexMatrix, x0: &[Complex64]) -> Result<f64, RiccatiError> {
    if !x.is_square() || x.cols() != x0.len() {
        return Err(RiccatiError::DimensionMismatch(format!(
            "X is {}x{}, x0 has length {}",
            x.rows(),
            x.cols(),
            x0.len()
        )));
    }
    let xv = x.mul_vec(x0);
    Ok(crate::linalg::inner(x0, &xv).re)
}

pub fn is_positive_definite(m: &ComplexMatrix) -> bool {
    hermitian_eig(m).is_ok_and(|e| e.values[0] > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn skew_diag(lambdas: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diag(&lambdas.iter().map(|&l| c(0.0, l)).collect::<Vec<_>>())
    }

    #[test]
    fn full_rank_scaled_identity_input() {
        let beta = 2.5;
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(2.0, 1.0), c(0.0, 0.0)],
            vec![c(-2.0, 1.0), c(0.0, -3.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(-0.5, 0.0), c(0.0, 0.2)],
        ])
        .unwrap();
        assert!(a.skew_hermitian_defect() < 1e-15);
        let sys = SystemSpec::new(a.clone(), ComplexMatrix::identity(3).scale_real(beta), "beta-I").unwrap();
        let sol = solve_care(&sys).unwrap();
        assert!(sol.x.approx_eq(&ComplexMatrix::identity(3).scale_real(1.0 / beta), 1e-10));
        let expected_cl = a.shift_diagonal(c(-beta, 0.0));
        assert!(sol.closed_loop.approx_eq(&expected_cl, 1e-9));
        assert!((sol.gamma_decay() - beta).abs() < 1e-9);
    }

    #[test]
    fn scalar_system_matches_hand_formula() {
        let sys = SystemSpec::new(
            ComplexMatrix::from_diag(&[c(0.0, 3.0)]),
            ComplexMatrix::from_diag(&[c(-2.0, 0.0)]),
            "scalar",
        )
        .unwrap();
        let sol = solve_care(&sys).unwrap();
        assert!((sol.x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((sol.closed_loop_eigs[0] - c(-2.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn two_control_example_row_one() {
        let a = skew_diag(&[-45.0, -15.0, 15.0, 45.0]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let sys = SystemSpec::new(a, b, "row1").unwrap();
        let sol = solve_care(&sys).unwrap();
        assert!((sol.x_norm() - 1.0171).abs() < 1e-3);
        assert!((sol.gamma_decay() - 0.9999).abs() < 1e-3);
        assert!(sol.residual <= sol.residual_tolerance(&sys));
    }

    #[test]
    fn rejects_bad_systems() {
        let a = skew_diag(&[0.0, 1.0]);
        let wide = ComplexMatrix::zeros(2, 3);
        assert!(SystemSpec::new(a.clone(), wide, "wide").is_err());
        let rank_deficient = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(SystemSpec::new(a.clone(), rank_deficient, "kernel").is_err());
        let b = ComplexMatrix::identity(2);
        let bad_q = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(SystemSpec::with_weights(a, b.clone(), bad_q, b, "q").is_err());
    }

    #[test]
    fn uncontrollable_mode_is_reported() {
        // Mode 2 is invisible to B and sits on the imaginary axis.
        let a = skew_diag(&[0.0, 1.0]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]).unwrap();
        let sys = SystemSpec::new(a, b, "uncontrollable").unwrap();
        assert!(solve_care(&sys).is_err());
    }

    #[test]
    fn lyapunov_diagonal_cases() {
        let w = solve_lyapunov(&ComplexMatrix::identity(3).scale_real(-1.0), &ComplexMatrix::identity(3)).unwrap();
        assert!(w.approx_eq(&ComplexMatrix::identity(3).scale_real(0.5), 1e-14));
        let a = ComplexMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, -2.0]]).unwrap();
        let w = solve_lyapunov(&a, &ComplexMatrix::identity(2)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.25]]).unwrap();
        assert!(w.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn lyapunov_rejects_unstable_and_large() {
        let unstable = ComplexMatrix::identity(2);
        assert!(matches!(
            solve_lyapunov(&unstable, &ComplexMatrix::identity(2)),
            Err(RiccatiError::UnstableLyapunov { .. })
        ));
        let n = LYAPUNOV_MAX_DIM + 1;
        let big = ComplexMatrix::identity(n).scale_real(-1.0);
        assert!(matches!(
            solve_lyapunov(&big, &ComplexMatrix::identity(n)),
            Err(RiccatiError::TooLarge { .. })
        ));
    }

    #[test]
    fn optimal_cost_examples() {
        let x0 = [c(0.6, 0.0), c(0.0, 0.8)];
        assert!((optimal_cost(&ComplexMatrix::identity(2), &x0).unwrap() - 1.0).abs() < 1e-15);
        let beta = 4.0;
        let xb = ComplexMatrix::identity(2).scale_real(1.0 / beta);
        assert!((optimal_cost(&xb, &x0).unwrap() - 0.25).abs() < 1e-15);
        let x = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]]).unwrap();
        assert_eq!(optimal_cost(&x, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), 5.0);
        assert!(optimal_cost(&x, &[c(1.0, 0.0)]).is_err());
    }
}
