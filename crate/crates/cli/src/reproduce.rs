//! Built-in experiments printed as CSV or plot primitives.

use std::fmt::Write as _;

use anyhow::Result;
use lqrdecay::bounds::plot_script;
use lqrdecay::report::analyze;
use lqrdecay::riccati::shifted_lqr;
use lqrdecay::search::{pruned_search, SearchOptions};
use lqrdecay::systems::{benchmark_string, pair_system, shifted_lqr_system, PAIR_ROWS, SHIFTS};

/// Six significant digits, plain notation for moderate magnitudes.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..5).contains(&mag) {
        format!("{:.*}", (5 - mag) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_else(|| "-".into())
}

pub fn pairs() -> Result<String> {
    let mut out = String::from("row,a,b,x_norm,gamma,gamma_minus,gamma_plus,ell_est,rho\n");
    for (i, &(a, b)) in PAIR_ROWS.iter().enumerate() {
        let r = analyze(&pair_system(a, b), false)?;
        let _ = writeln!(
            out,
            "{},{a},{b},{},{},{},{},{},{}",
            i + 1,
            sig(r.care.x_norm),
            sig(r.care.gamma_decay),
            opt(r.bounds.gamma_minus),
            opt(r.bounds.gamma_plus),
            sig(r.bounds.ell_est),
            opt(r.bounds.rho),
        );
    }
    Ok(out)
}

pub fn strings(max_m: usize, opts: &SearchOptions) -> Result<String> {
    let mut out = String::from("m,gamma,lqr_solved,total,percent,best_configs\n");
    for m in 1..=max_m {
        let r = pruned_search(&benchmark_string(m), opts)?;
        let best: Vec<String> = r
            .best_configs
            .iter()
            .map(|j| j.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = writeln!(
            out,
            "{m},{},{},{},{:.2},{}",
            sig(r.gamma_star),
            r.lqr_solved,
            r.total_configs,
            100.0 * r.lqr_solved as f64 / r.total_configs as f64,
            best.join(";"),
        );
    }
    Ok(out)
}

pub fn shifts() -> Result<String> {
    let sys = shifted_lqr_system();
    let mut out = String::from("tau,gamma,x_tau_norm,x0_tau_norm\n");
    for tau in SHIFTS {
        let s = shifted_lqr(&sys, tau)?;
        let _ = writeln!(
            out,
            "{tau},{},{},{}",
            sig(s.gamma_decay),
            sig(s.x_tau_norm()),
            sig(s.x0_tau_norm())
        );
    }
    Ok(out)
}

/// Exclusion region and closed-loop spectrum of one of the pair systems.
pub fn region(row: usize) -> Result<String> {
    let (a, b) = PAIR_ROWS
        .get(row.wrapping_sub(1))
        .copied()
        .ok_or_else(|| anyhow::anyhow!("input: row must be in 1..={}", PAIR_ROWS.len()))?;
    let r = analyze(&pair_system(a, b), false)?;
    Ok(plot_script(&r.geometry, &r.care.closed_loop_eigs))
}
