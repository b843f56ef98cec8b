//! Decay-rate bounds and the closed-loop eigenvalue exclusion geometry.
//!
//! Everything here is a cheap function of [`SpectralData`]; no Riccati
//! equation is solved. Lower bounds are strict (`γ_decay > ℓ_est`), upper
//! bounds are the ones listed on [`BoundReport`].

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{singular_values, ComplexMatrix};
use crate::spectral::{duc_bounds, DucBounds, SpectralData};

/// `(2 − √2)²`.
const TWO_MINUS_SQRT2_SQ: f64 = (2.0 - SQRT_2) * (2.0 - SQRT_2);
/// Relative size under which the projection constant of the `Δ_m` bound is
/// taken to vanish.
const PROJECTION_RANK_TOL: f64 = 1e-12;
const BRACKET_DOUBLINGS: usize = 200;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("could not bracket the maximizer of f after {0} doublings")]
    Bracket(usize),
}

fn ratio_sq(b_norm: f64, delta_k: f64) -> f64 {
    if delta_k.is_infinite() {
        0.0
    } else {
        (b_norm / delta_k).powi(2)
    }
}

/// Disk radii `ρ_k = ‖b_k‖/(1 + 2‖B‖²/δ_k²)`. All zero when `A` has a
/// repeated eigenvalue.
pub fn disk_radii(data: &SpectralData) -> Vec<f64> {
    radii(data, |s| 1.0 + 2.0 * s)
}

/// Single-input radii `ρ¹_k = ‖b_k‖/√(1 + 2‖B‖²/δ_k²)`.
pub fn disk_radii_single(data: &SpectralData) -> Vec<f64> {
    radii(data, |s| (1.0 + 2.0 * s).sqrt())
}

fn radii(data: &SpectralData, denom: impl Fn(f64) -> f64) -> Vec<f64> {
    if data.has_repeated_eigenvalues() {
        return vec![0.0; data.n()];
    }
    data.b_norms
        .iter()
        .zip(&data.delta_k)
        .map(|(&bk, &dk)| bk / denom(ratio_sq(data.b_norm, dk)))
        .collect()
}

/// `(ℓ_est, ℓ_est¹)`; the second only for `m = 1`.
pub fn theorem1_bounds(data: &SpectralData) -> (f64, Option<f64>) {
    let min_over = |r: Vec<f64>| r.into_iter().fold(f64::INFINITY, f64::min) / SQRT_2;
    let ell = min_over(disk_radii(data));
    let ell1 = (data.m() == 1).then(|| min_over(disk_radii_single(data)));
    (ell, ell1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    /// 1-based: spans `iλ_k` and `iλ_{k+1}`.
    pub k: usize,
    pub vertices: [Complex64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub k: usize,
    pub center: Complex64,
    pub radius: f64,
}

/// Region that must contain no closed-loop eigenvalue, together with the
/// box that must contain all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExclusionGeometry {
    /// `−‖B‖`; the box is `[re_min, 0) × [im_min, im_max]`.
    pub re_min: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub triangles: Vec<Triangle>,
    pub disks: Vec<Disk>,
    /// Slack applied in favour of the eigenvalue by [`check_spectrum_in_region`].
    pub tol: f64,
}

pub fn exclusion_geometry(data: &SpectralData) -> ExclusionGeometry {
    let n = data.n();
    let l = &data.lambdas;
    let triangles = (0..n.saturating_sub(1))
        .filter(|&k| l[k + 1] - l[k] > 0.0 && data.delta_k[k].min(data.delta_k[k + 1]) > 0.0)
        .map(|k| {
            let gap = l[k + 1] - l[k];
            Triangle {
                k: k + 1,
                vertices: [
                    Complex64::new(0.0, l[k]),
                    Complex64::new(0.0, l[k + 1]),
                    Complex64::new(-gap / 2.0, (l[k + 1] + l[k]) / 2.0),
                ],
            }
        })
        .collect();
    let radii = if data.m() == 1 {
        disk_radii_single(data)
    } else {
        disk_radii(data)
    };
    let disks = radii
        .into_iter()
        .enumerate()
        .map(|(k, radius)| Disk {
            k: k + 1,
            center: Complex64::new(0.0, l[k]),
            radius,
        })
        .collect();
    ExclusionGeometry {
        re_min: -data.b_norm,
        im_min: l.first().copied().unwrap_or(0.0),
        im_max: l.last().copied().unwrap_or(0.0),
        triangles,
        disks,
        tol: 1e-7 * data.b_norm.max(data.diameter).max(1.0),
    }
}

/// Violations found for one eigenvalue; empty when it is where it belongs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub eigenvalue: Complex64,
    pub violations: Vec<String>,
}

impl RegionVerdict {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Signed distance of `p` from the closed triangle, positive inside.
fn depth_in_triangle(p: Complex64, t: &[Complex64; 3]) -> f64 {
    let orient = {
        let (a, b, c) = (t[0], t[1], t[2]);
        ((b - a).conj() * (c - a)).im.signum()
    };
    (0..3)
        .map(|i| {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            let e = b - a;
            orient * (e.conj() * (p - a)).im / e.norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Tests each eigenvalue against the box, the disks and the triangles. A
/// point on a boundary (within `geom.tol`) is accepted.
pub fn check_spectrum_in_region(eigs: &[Complex64], geom: &ExclusionGeometry) -> Vec<RegionVerdict> {
    let tol = geom.tol;
    eigs.iter()
        .map(|&nu| {
            let mut violations = Vec::new();
            let in_box = nu.re >= geom.re_min - tol
                && nu.re < 0.0
                && nu.im >= geom.im_min - tol
                && nu.im <= geom.im_max + tol;
            if !in_box {
                violations.push("not in box".to_string());
            }
            for d in &geom.disks {
                if (nu - d.center).norm() <= d.radius - tol {
                    violations.push(format!("inside disk k={}", d.k));
                }
            }
            for t in &geom.triangles {
                if depth_in_triangle(nu, &t.vertices) > tol {
                    violations.push(format!("inside triangle k={}", t.k));
                }
            }
            RegionVerdict {
                eigenvalue: nu,
                violations,
            }
        })
        .collect()
}

/// Split of the closed-loop spectrum into a fast and a slow band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSplit {
    /// `[−‖B‖, −(√6/4)σ_m]`, closed.
    pub inner_band: (f64, f64),
    /// `(−√3Δ, 0)`, open.
    pub outer_band: (f64, f64),
    pub inner_count: usize,
    pub outer_count: usize,
}

impl BandSplit {
    /// Counts of `eigs` in the inner and the outer band; the closed inner
    /// band is widened by `tol` on both ends.
    pub fn count(&self, eigs: &[Complex64], tol: f64) -> (usize, usize) {
        let inner = eigs
            .iter()
            .filter(|z| z.re >= self.inner_band.0 - tol && z.re <= self.inner_band.1 + tol)
            .count();
        let outer = eigs
            .iter()
            .filter(|z| z.re > self.outer_band.0 && z.re < self.outer_band.1)
            .count();
        (inner, outer)
    }
}

/// Present iff `σ_m > 2√2·Δ`.
pub fn band_split(data: &SpectralData) -> Option<BandSplit> {
    let sigma_m = data.sigma_min();
    (sigma_m > 2.0 * SQRT_2 * data.diameter).then(|| BandSplit {
        inner_band: (-data.b_norm, -(6f64.sqrt() / 4.0) * sigma_m),
        outer_band: (-3f64.sqrt() * data.diameter, 0.0),
        inner_count: data.m(),
        outer_count: data.n() - data.m(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBounds {
    /// `‖B‖`, always valid.
    pub b_norm: f64,
    /// `√3·Δ` when `σ_m > 2√2Δ` and `m < n`.
    pub sqrt3_delta: Option<f64>,
    /// `2√2·Δ` when `m = 1 < n`.
    pub single_input: Option<f64>,
}

pub fn corollary4_upper(data: &SpectralData) -> UpperBounds {
    let (n, m) = (data.n(), data.m());
    let split = data.sigma_min() > 2.0 * SQRT_2 * data.diameter;
    UpperBounds {
        b_norm: data.b_norm,
        sqrt3_delta: (split && m < n).then(|| 3f64.sqrt() * data.diameter),
        single_input: (m == 1 && m < n).then_some(2.0 * SQRT_2 * data.diameter),
    }
}

/// `φ_k = 2‖B‖²/((2 − √2)²·δ_k²)`.
pub fn phi_k(data: &SpectralData) -> Vec<f64> {
    data.delta_k
        .iter()
        .map(|&dk| {
            if dk == 0.0 {
                f64::INFINITY
            } else {
                2.0 * ratio_sq(data.b_norm, dk) / TWO_MINUS_SQRT2_SQ
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoucheDisk {
    pub k: usize,
    /// `−‖b_k‖ + iλ_k`.
    pub center: Complex64,
    #[serde(with = "crate::serde_ext::f64")]
    pub radius: f64,
    /// `‖B‖²/δ_k² < (2 − √2)²/2`: the open disk holds exactly one closed-loop eigenvalue.
    pub applicable: bool,
}

pub fn rouche_disks(data: &SpectralData) -> Vec<RoucheDisk> {
    phi_k(data)
        .into_iter()
        .enumerate()
        .map(|(k, phi)| RoucheDisk {
            k: k + 1,
            center: Complex64::new(-data.b_norms[k], data.lambdas[k]),
            radius: phi * data.b_norms[k],
            applicable: phi < 1.0,
        })
        .collect()
}

/// `(φ_k, Γ₋, Γ₊)`.
pub fn corollary6_gammas(data: &SpectralData) -> (Vec<f64>, Option<f64>, Option<f64>) {
    let phis = phi_k(data);
    let mut plus = None::<f64>;
    for (phi, bk) in phis.iter().zip(&data.b_norms) {
        if *phi < 1.0 {
            let v = (1.0 + phi) * bk;
            plus = Some(plus.map_or(v, |p| p.min(v)));
        }
    }
    let minus = phis.iter().all(|&p| p < 1.0).then(|| {
        phis.iter()
            .zip(&data.b_norms)
            .map(|(p, bk)| (1.0 - p) * bk)
            .fold(f64::INFINITY, f64::min)
    });
    (phis, minus, plus)
}

/// `f(σ) = (σ − θ)/(σ + σ² + … + σ^{m+1})`.
pub fn f_theta(sigma: f64, theta: f64, m: usize) -> f64 {
    let denom: f64 = (1..=m as i32 + 1).map(|j| sigma.powi(j)).sum();
    (sigma - theta) / denom
}

/// `P(σ) = σ + … + σ^{m+1} − (Σ_{j=0}^{m} (j+1)σ^j)(σ − θ)`; its root in
/// `(θ, ∞)` maximizes `f`.
pub fn p_theta(sigma: f64, theta: f64, m: usize) -> f64 {
    let s1: f64 = (1..=m as i32 + 1).map(|j| sigma.powi(j)).sum();
    let s2: f64 = (0..=m as i32).map(|j| (j + 1) as f64 * sigma.powi(j)).sum();
    s1 - s2 * (sigma - theta)
}

/// `(σ₀(θ), μ(θ))`: the maximizer of `f` on `(θ, ∞)` and the maximum.
pub fn sigma0_mu(theta: f64, m: usize) -> Result<(f64, f64), BoundsError> {
    if theta.is_nan() || theta < 1.0 || !theta.is_finite() {
        return Err(BoundsError::InvalidArgument(format!("θ = {theta} must be finite and ≥ 1")));
    }
    if m < 2 {
        return Err(BoundsError::InvalidArgument(format!("m = {m} must be ≥ 2")));
    }
    let mut lo = theta;
    let mut hi = 2.0 * theta;
    let mut doublings = 0;
    while p_theta(hi, theta, m) >= 0.0 {
        if doublings == BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(BoundsError::Bracket(doublings));
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    // P decreases on (θ, ∞): keep P(lo) > 0 ≥ P(hi).
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p_theta(mid, theta, m) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma0 = 0.5 * (lo + hi);
    Ok((sigma0, f_theta(sigma0, theta, m)))
}

/// Projection constant `min_k σ_min([b_k … b_{k+m−1}])` over consecutive
/// windows of `m` modes.
pub fn projection_constant(data: &SpectralData) -> f64 {
    let (n, m) = (data.n(), data.m());
    if m == 0 || m > n {
        return 0.0;
    }
    (0..=n - m)
        .map(|k| {
            let window = ComplexMatrix::from_columns(&data.b_vectors[k..k + m]);
            singular_values(&window).last().copied().unwrap_or(0.0)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Lower bound `ρ` from the `Δ_m` estimate; `None` unless `2 ≤ m < n`,
/// `Δ_m > 0` and the projection constant is positive.
pub fn theorem8_rho(data: &SpectralData) -> Option<f64> {
    let (n, m) = (data.n(), data.m());
    if m < 2 || m >= n {
        return None;
    }
    let delta_m = data.delta_m(m)?;
    if delta_m <= 0.0 {
        return None;
    }
    let k = data.b_norm;
    let gamma = projection_constant(data);
    if gamma <= PROJECTION_RANK_TOL * k {
        return None;
    }
    let theta = (k * k / (gamma * gamma)).max(1.0);
    let (sigma0, mu) = sigma0_mu(theta, m).ok()?;
    let geometric = 2.0 * (sigma0.powi(m as i32 + 1) - 1.0) / (sigma0 - 1.0) - 1.0;
    let first = delta_m / geometric.sqrt();
    let second = gamma * mu.sqrt();
    Some(0.5 * first.min(second))
}

/// Control matrix spread evenly over all modes (`w = e^{−2πi/n}`).
#[derive(Clone, Debug)]
pub struct SuboptimalB {
    pub b: ComplexMatrix,
    /// `δ² > (6/(2 − √2)²)·√(n/m)·β²`.
    pub half_optimal: bool,
    /// `(2/3)·β·√(m/n)`, a strict lower bound on `γ_decay(A, B̂)` when
    /// `half_optimal` holds.
    pub guaranteed_lower: Option<f64>,
}

/// `B̂ = V·(β/√n)·[w^{jl}]`; `delta` is the minimal separation of `A`.
pub fn suboptimal_b(v: &ComplexMatrix, m: usize, beta: f64, delta: f64) -> Result<SuboptimalB, BoundsError> {
    let n = v.rows();
    if !v.is_square() || m == 0 || m > n {
        return Err(BoundsError::InvalidArgument(format!("need 1 ≤ m ≤ n, got m = {m}, n = {n}")));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(BoundsError::InvalidArgument(format!("β = {beta} must be positive")));
    }
    let scale = beta / (n as f64).sqrt();
    let dft = ComplexMatrix::from_fn(n, m, |j, l| {
        let angle = -2.0 * PI * ((j * l) % n) as f64 / n as f64;
        Complex64::from_polar(scale, angle)
    });
    let ratio = (n as f64 / m as f64).sqrt();
    let half_optimal = delta * delta > 6.0 / TWO_MINUS_SQRT2_SQ * ratio * beta * beta;
    Ok(SuboptimalB {
        b: v * &dft,
        half_optimal,
        guaranteed_lower: half_optimal.then(|| 2.0 / 3.0 * beta / ratio),
    })
}

/// All bounds for one system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ell_est: f64,
    pub ell_est1: Option<f64>,
    pub rho_k: Vec<f64>,
    pub rho1_k: Option<Vec<f64>>,
    #[serde(with = "crate::serde_ext::vec_f64")]
    pub phi_k: Vec<f64>,
    pub gamma_minus: Option<f64>,
    pub gamma_plus: Option<f64>,
    pub rho: Option<f64>,
    pub upper_b_norm: f64,
    pub upper_sqrt3_delta: Option<f64>,
    pub upper_m1: Option<f64>,
    pub rouche_disks: Vec<RoucheDisk>,
    pub band_split: Option<BandSplit>,
    /// Distance-to-uncontrollability surrogate; not used in the best bounds.
    pub duc: Option<DucBounds>,
    /// Largest available strict lower bound.
    pub best_lower: f64,
    /// Smallest available upper bound.
    pub best_upper: f64,
}

pub fn summarize(data: &SpectralData) -> BoundReport {
    let (ell_est, ell_est1) = theorem1_bounds(data);
    let (phi_k, gamma_minus, gamma_plus) = corollary6_gammas(data);
    let rho = theorem8_rho(data);
    let upper = corollary4_upper(data);

    let best_lower = [Some(ell_est), ell_est1, rho, gamma_minus]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    let best_upper = [Some(upper.b_norm), upper.sqrt3_delta, upper.single_input, gamma_plus]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);

    BoundReport {
        ell_est,
        ell_est1,
        rho_k: disk_radii(data),
        rho1_k: (data.m() == 1).then(|| disk_radii_single(data)),
        phi_k,
        gamma_minus,
        gamma_plus,
        rho,
        upper_b_norm: upper.b_norm,
        upper_sqrt3_delta: upper.sqrt3_delta,
        upper_m1: upper.single_input,
        rouche_disks: rouche_disks(data),
        band_split: band_split(data),
        duc: duc_bounds(data),
        best_lower,
        best_upper,
    }
}

/// Plain-text plot primitives, one per line: `circle cx cy r`,
/// `segment x1 y1 x2 y2`, `point x y label`.
pub fn plot_script(geom: &ExclusionGeometry, eigs: &[Complex64]) -> String {
    let mut out = String::new();
    let corners = [
        (geom.re_min, geom.im_min),
        (0.0, geom.im_min),
        (0.0, geom.im_max),
        (geom.re_min, geom.im_max),
    ];
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let _ = writeln!(out, "segment {} {} {} {}", a.0, a.1, b.0, b.1);
    }
    for t in &geom.triangles {
        for i in 0..3 {
            let (a, b) = (t.vertices[i], t.vertices[(i + 1) % 3]);
            let _ = writeln!(out, "segment {} {} {} {}", a.re, a.im, b.re, b.im);
        }
    }
    for d in &geom.disks {
        let _ = writeln!(out, "circle {} {} {}", d.center.re, d.center.im, d.radius);
    }
    for (j, z) in eigs.iter().enumerate() {
        let _ = writeln!(out, "point {} {} nu{}", z.re, z.im, j + 1);
    }
    out
}
