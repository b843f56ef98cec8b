//! Full analysis of one system: spectrum, Riccati solution, bounds and a
//! consistency check of the closed-loop spectrum against them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{check_spectrum_in_region, exclusion_geometry, summarize, BoundReport, ExclusionGeometry, RegionVerdict};
use crate::riccati::{solve_care, RiccatiError, SystemSpec};
use crate::spectral::{decompose, decompose_unchecked, SpectralData, SpectralError};

/// Absolute slack for the bound comparisons.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("precondition: {0}")]
    Spectral(#[from] SpectralError),
    #[error("riccati: {0}")]
    Riccati(#[from] RiccatiError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambdas: Vec<f64>,
    #[serde(with = "crate::serde_ext::f64")]
    pub delta: f64,
    #[serde(with = "crate::serde_ext::vec_f64")]
    pub delta_k: Vec<f64>,
    pub diameter: f64,
    /// `Δ_k` for `k = 1..n−1`.
    pub delta_table: Vec<f64>,
    pub b_norms: Vec<f64>,
    pub b_norm: f64,
    pub sigma_min: f64,
    /// False when the skew-Hermitian gate was bypassed; bounds are then not
    /// guaranteed.
    pub skew_hermitian: bool,
}

impl From<&SpectralData> for SpectralSummary {
    fn from(d: &SpectralData) -> Self {
        Self {
            lambdas: d.lambdas.clone(),
            delta: d.delta,
            delta_k: d.delta_k.clone(),
            diameter: d.diameter,
            delta_table: d.delta_table.clone(),
            b_norms: d.b_norms.clone(),
            b_norm: d.b_norm,
            sigma_min: d.sigma_min(),
            skew_hermitian: d.skew_hermitian,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CareSummary {
    pub x_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub gamma_decay: f64,
    pub closed_loop_eigs: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub label: String,
    pub spectral: SpectralSummary,
    pub care: CareSummary,
    pub bounds: BoundReport,
    pub geometry: ExclusionGeometry,
    pub region: Vec<RegionVerdict>,
    /// Every bound the computed spectrum contradicts. Empty for a
    /// skew-Hermitian system unless something is numerically wrong.
    pub violations: Vec<String>,
}

/// Runs decomposition, Riccati solve, bounds and the region check.
/// `allow_non_skew` evaluates the formulas for a non-normal `A` with
/// unit eigenvectors of `A`.
pub fn analyze(sys: &SystemSpec, allow_non_skew: bool) -> Result<AnalysisReport, AnalysisError> {
    sys.validate()?;
    let data = match decompose(&sys.a, &sys.b) {
        Ok(d) => d,
        Err(SpectralError::NotSkewHermitian { .. }) if allow_non_skew => decompose_unchecked(&sys.a, &sys.b)?,
        Err(e) => return Err(e.into()),
    };
    let sol = solve_care(sys)?;
    let bounds = summarize(&data);
    let geometry = exclusion_geometry(&data);
    let region = check_spectrum_in_region(&sol.closed_loop_eigs, &geometry);
    let gamma = sol.gamma_decay();
    let eigs = &sol.closed_loop_eigs;

    let mut violations = Vec::new();
    if gamma > bounds.upper_b_norm + BOUND_SLACK {
        violations.push(format!("upper bound ‖B‖ violated: γ = {gamma:e} > {:e}", bounds.upper_b_norm));
    }
    let uppers = [
        ("√3Δ", bounds.upper_sqrt3_delta),
        ("2√2Δ", bounds.upper_m1),
        ("Γ₊", bounds.gamma_plus),
    ];
    for (name, u) in uppers {
        if let Some(u) = u.filter(|&u| gamma > u + BOUND_SLACK) {
            violations.push(format!("upper bound {name} violated: γ = {gamma:e} > {u:e}"));
        }
    }
    let lowers = [
        ("ℓ_est", Some(bounds.ell_est)),
        ("ℓ_est¹", bounds.ell_est1),
        ("Γ₋", bounds.gamma_minus),
    ];
    for (name, l) in lowers {
        // Strict in theory; with n = 1 and δ₁ = ∞, Γ₋ = |b| = γ exactly.
        if let Some(l) = l.filter(|&l| gamma < l - BOUND_SLACK) {
            violations.push(format!("lower bound {name} violated: γ = {gamma:e} < {l:e}"));
        }
    }
    if let Some(rho) = bounds.rho.filter(|&r| gamma < r - BOUND_SLACK) {
        violations.push(format!("lower bound ρ violated: γ = {gamma:e} < {rho:e}"));
    }
    let easy = 1.0 / (2.0 * sol.x_norm());
    if gamma < easy - BOUND_SLACK {
        violations.push(format!("lower bound 1/(2‖X‖) violated: γ = {gamma:e} < {easy:e}"));
    }
    for v in region.iter().filter(|v| !v.ok()) {
        violations.push(format!("eigenvalue {} {}", v.eigenvalue, v.violations.join(", ")));
    }
    if let Some(split) = &bounds.band_split {
        let (inner, outer) = split.count(eigs, geometry.tol);
        if (inner, outer) != (split.inner_count, split.outer_count) {
            violations.push(format!(
                "band split violated: {inner} inner and {outer} outer eigenvalues, expected {} and {}",
                split.inner_count, split.outer_count
            ));
        }
    }
    for d in bounds.rouche_disks.iter().filter(|d| d.applicable) {
        let inside = eigs
            .iter()
            .filter(|z| (**z - d.center).norm() < d.radius + geometry.tol)
            .count();
        if inside != 1 {
            violations.push(format!("Rouché disk k={} holds {inside} eigenvalues", d.k));
        }
    }

    Ok(AnalysisReport {
        label: sys.label.clone(),
        spectral: SpectralSummary::from(&data),
        care: CareSummary {
            x_norm: sol.x_norm(),
            residual: sol.residual,
            iterations: sol.iterations,
            gamma_decay: gamma,
            closed_loop_eigs: sol.closed_loop_eigs.clone(),
        },
        bounds,
        geometry,
        region,
        violations,
    })
}
