//! Mass-loaded string benchmark.
//!
//! `N` point masses `M` on a string under tension; actuators act on the
//! masses listed in `J`. The first-order system `(y, y')` conserves the
//! energy norm `⟨f, g⟩_E = g*·G·f`, so after the change of variables
//! `x̃ = Lᵀx` (with `G = L·Lᵀ`) the system matrix is skew-Hermitian and every
//! spectral quantity has a closed form.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky, solve_linear, ComplexMatrix, LinalgError};
use crate::riccati::{RiccatiError, SystemSpec};
use crate::spectral::SpectralData;

#[derive(Debug, Error)]
pub enum StringError {
    #[error("invalid string configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
}

/// Parameters of the string and, optionally, the actuator positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringConfig {
    #[serde(rename = "N")]
    pub n_masses: usize,
    pub m: usize,
    pub tau_over_h: f64,
    pub mass: f64,
    /// 1-based, strictly increasing; absent for search templates.
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<usize>>,
}

impl StringConfig {
    pub fn new(n_masses: usize, m: usize, tau_over_h: f64, mass: f64) -> Self {
        Self {
            n_masses,
            m,
            tau_over_h,
            mass,
            positions: None,
        }
    }

    pub fn with_positions(mut self, positions: Vec<usize>) -> Self {
        self.m = positions.len();
        self.positions = Some(positions);
        self
    }

    /// Checks everything except the presence of `J`.
    pub fn validate_template(&self) -> Result<(), StringError> {
        if self.n_masses == 0 {
            return Err(StringError::InvalidConfig("N must be at least 1".into()));
        }
        if self.m == 0 || self.m > self.n_masses {
            return Err(StringError::InvalidConfig(format!(
                "need 1 ≤ m ≤ N, got m = {}, N = {}",
                self.m, self.n_masses
            )));
        }
        if !(self.tau_over_h > 0.0 && self.tau_over_h.is_finite()) {
            return Err(StringError::InvalidConfig(format!("tau_over_h = {} must be positive", self.tau_over_h)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(StringError::InvalidConfig(format!("mass = {} must be positive", self.mass)));
        }
        if let Some(j) = &self.positions {
            validate_positions(j, self.n_masses)?;
            if j.len() != self.m {
                return Err(StringError::InvalidConfig(format!("J has {} entries but m = {}", j.len(), self.m)));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<&[usize], StringError> {
        self.validate_template()?;
        self.positions
            .as_deref()
            .ok_or_else(|| StringError::InvalidConfig("J is required".into()))
    }

    /// `τ/(hM)`.
    pub fn stiffness(&self) -> f64 {
        self.tau_over_h / self.mass
    }
}

pub fn validate_positions(j: &[usize], n_masses: usize) -> Result<(), StringError> {
    if j.is_empty() {
        return Err(StringError::InvalidConfig("J must not be empty".into()));
    }
    if j.iter().any(|&x| x == 0 || x > n_masses) {
        return Err(StringError::InvalidConfig(format!("J = {j:?} has an index outside 1..={n_masses}")));
    }
    if j.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StringError::InvalidConfig(format!("J = {j:?} must be strictly increasing")));
    }
    Ok(())
}

/// Tridiagonal `A₀` with 2 on the diagonal and −1 beside it.
pub fn a0(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            2.0
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })
}

/// Untransformed `[[0, I], [−c·A₀, 0]]`, `c = τ/(hM)`.
pub fn raw_a(cfg: &StringConfig) -> ComplexMatrix {
    let n = cfg.n_masses;
    let zero = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(
        &zero,
        &ComplexMatrix::identity(n),
        &a0(n).scale_real(-cfg.stiffness()),
        &zero,
    )
}

/// Untransformed `B`: column `l` is `e_{N + j_l}/M`.
pub fn raw_b(cfg: &StringConfig, positions: &[usize]) -> ComplexMatrix {
    let n = cfg.n_masses;
    let mut b = ComplexMatrix::zeros(2 * n, positions.len());
    for (l, &j) in positions.iter().enumerate() {
        b[(n + j - 1, l)] = Complex64::new(1.0 / cfg.mass, 0.0);
    }
    b
}

/// Energy Gram matrix `blockdiag(c·A₀, I)/(N + 1)`.
pub fn gram(cfg: &StringConfig) -> ComplexMatrix {
    let n = cfg.n_masses;
    let zero = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(&a0(n).scale_real(cfg.stiffness()), &zero, &zero, &ComplexMatrix::identity(n))
        .scale_real(1.0 / (n as f64 + 1.0))
}

/// `λ` for `k = N, …, 1, −1, …, −N`, which is ascending.
pub fn closed_form_lambdas(cfg: &StringConfig) -> Vec<(i64, f64)> {
    let n = cfg.n_masses as i64;
    let scale = -2.0 * cfg.stiffness().sqrt();
    (1..=n)
        .rev()
        .chain((1..=n).map(|k| -k))
        .map(|k| (k, scale * (k as f64 * PI / (2.0 * (n as f64 + 1.0))).sin()))
        .collect()
}

/// `sin(p·π/q)`, exactly zero on the nodes `p ≡ 0 (mod q)`.
fn sin_pi_ratio(p: i64, q: i64) -> f64 {
    let r = p.rem_euclid(2 * q);
    if r % q == 0 {
        0.0
    } else {
        (r as f64 * PI / q as f64).sin()
    }
}

/// `(b_k)_l = sin(j_l·kπ/(N+1))/(M(N+1))`.
pub fn closed_form_b(cfg: &StringConfig, positions: &[usize], k: i64) -> Vec<Complex64> {
    let np1 = cfg.n_masses as i64 + 1;
    positions
        .iter()
        .map(|&j| Complex64::new(sin_pi_ratio(j as i64 * k, np1) / (cfg.mass * np1 as f64), 0.0))
        .collect()
}

/// `1/(M·√(N+1))`, both `‖B‖` and `σ_m(B)`.
pub fn closed_form_b_norm(cfg: &StringConfig) -> f64 {
    1.0 / (cfg.mass * (cfg.n_masses as f64 + 1.0).sqrt())
}

/// Quantities known without any eigensolve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub lambdas: Vec<f64>,
    pub b_norms: Vec<f64>,
    pub b_norm: f64,
}

/// String without actuators: the transformed `A`, the Cholesky factor and
/// the closed-form eigenbasis, shared by every actuator configuration.
#[derive(Clone, Debug)]
pub struct StringBase {
    pub cfg: StringConfig,
    pub gram: ComplexMatrix,
    /// Lower factor, `G = L·Lᵀ`.
    pub cholesky_l: ComplexMatrix,
    /// `Lᵀ·A_raw·L⁻ᵀ`.
    pub a: ComplexMatrix,
    /// Wave numbers `k` in the order of `lambdas`.
    pub modes: Vec<i64>,
    pub lambdas: Vec<f64>,
    /// Orthonormal eigenvectors `Lᵀ·v_k` as columns.
    pub vectors: Arc<ComplexMatrix>,
}

impl StringBase {
    pub fn new(cfg: &StringConfig) -> Result<Self, StringError> {
        cfg.validate_template()?;
        let n = cfg.n_masses;
        let g = gram(cfg);
        let l = cholesky(&g)?;
        let lt = l.transpose();
        // (Lᵀ·A_raw)·L⁻ᵀ = (L⁻¹·(Lᵀ·A_raw)ᵀ)ᵀ; everything is real.
        let a = solve_linear(&l, &(&lt * &raw_a(cfg)).transpose())?.transpose();

        let (modes, lambdas): (Vec<i64>, Vec<f64>) = closed_form_lambdas(cfg).into_iter().unzip();
        let mut v = ComplexMatrix::zeros(2 * n, 2 * n);
        for (col, (&k, &lambda)) in modes.iter().zip(&lambdas).enumerate() {
            let inv = Complex64::new(0.0, lambda).inv();
            for i in 0..n {
                let w = sin_pi_ratio(k * (i as i64 + 1), n as i64 + 1);
                v[(i, col)] = inv * w;
                v[(n + i, col)] = Complex64::new(w, 0.0);
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            gram: g,
            a,
            modes,
            lambdas,
            vectors: Arc::new(&lt * &v),
            cholesky_l: l,
        })
    }

    /// Transformed control matrix `Lᵀ·B_raw`.
    pub fn b(&self, positions: &[usize]) -> Result<ComplexMatrix, StringError> {
        validate_positions(positions, self.cfg.n_masses)?;
        Ok(&self.cholesky_l.transpose() * &raw_b(&self.cfg, positions))
    }

    pub fn system(&self, positions: &[usize]) -> Result<SystemSpec, StringError> {
        let label = format!("string N={} J={:?}", self.cfg.n_masses, positions);
        Ok(SystemSpec::new(self.a.clone(), self.b(positions)?, label)?)
    }

    /// Spectral data for one configuration from the closed forms, in
    /// `O(N·m)` plus the cost of sharing the eigenbasis.
    pub fn spectral(&self, positions: &[usize]) -> Result<SpectralData, StringError> {
        validate_positions(positions, self.cfg.n_masses)?;
        let b_vectors = self
            .modes
            .iter()
            .map(|&k| closed_form_b(&self.cfg, positions, k))
            .collect();
        let s = closed_form_b_norm(&self.cfg);
        let m = positions.len();
        Ok(SpectralData::from_parts(
            self.lambdas.clone(),
            Arc::clone(&self.vectors),
            b_vectors,
            vec![s; m],
            s * (m as f64).sqrt(),
        ))
    }

    pub fn closed_form(&self, positions: &[usize]) -> Result<ClosedForm, StringError> {
        let data = self.spectral(positions)?;
        Ok(ClosedForm {
            lambdas: data.lambdas,
            b_norms: data.b_norms,
            b_norm: data.b_norm,
        })
    }
}

/// A fully specified string in energy-orthonormal coordinates.
#[derive(Clone, Debug)]
pub struct StringSystem {
    pub sys: SystemSpec,
    pub gram: ComplexMatrix,
    pub cholesky_l: ComplexMatrix,
    pub closed_form: ClosedForm,
}

pub fn build_string(cfg: &StringConfig) -> Result<StringSystem, StringError> {
    let positions = cfg.validate()?;
    let base = StringBase::new(cfg)?;
    Ok(StringSystem {
        sys: base.system(positions)?,
        closed_form: base.closed_form(positions)?,
        gram: base.gram,
        cholesky_l: base.cholesky_l,
    })
}

/// Closed-form spectral data for a configuration, no eigensolve involved.
pub fn closed_form_bounds(cfg: &StringConfig) -> Result<SpectralData, StringError> {
    let positions = cfg.validate()?;
    StringBase::new(cfg)?.spectral(positions)
}
