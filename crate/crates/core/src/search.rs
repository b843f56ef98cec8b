//! Actuator placement on the string: bound-pruned search and brute force.
//!
//! Every configuration `J` gets a cheap upper bound `U_J` and lower bound
//! `L_J` on its decay rate from the closed-form spectral data. The pruned
//! search solves the Riccati equation for the configuration with the best
//! `L_J`, then for configurations in order of decreasing `U_J` until every
//! remaining `U_J` falls below the best decay rate found.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::summarize;
use crate::riccati::{solve_care, RiccatiError};
use crate::string_model::{StringBase, StringConfig, StringError};

/// Default refusal threshold for brute force.
pub const BRUTE_FORCE_CAP: usize = 5000;
/// Decay rates within this relative distance of the optimum count as optimal.
/// Mirror-image placements differ by about 1e-9 after the Riccati solve.
pub const OPTIMAL_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("brute force refused: {count} configurations exceed the cap of {cap}")]
    TooMany { count: u128, cap: usize },
    #[error("Riccati solve failed for J = {config:?}: {source}")]
    Solve {
        config: Vec<usize>,
        #[source]
        source: RiccatiError,
    },
    #[error(transparent)]
    String(#[from] StringError),
}

/// One configuration's bounds and, if solved, its decay rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub config: Vec<usize>,
    /// `U_J`; `‖B‖` is always available so this is finite.
    pub upper: f64,
    pub lower: f64,
    pub gamma: Option<f64>,
    /// Position in the sequence of Riccati solves, from 1.
    pub solve_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub gamma_star: f64,
    /// Every configuration whose decay rate is within [`OPTIMAL_REL_TOL`] of
    /// `gamma_star`, in lexicographic order.
    pub best_configs: Vec<Vec<usize>>,
    pub lqr_solved: usize,
    pub total_configs: usize,
    /// Lexicographic by configuration.
    pub evaluation_log: Vec<LogEntry>,
}

impl SearchResult {
    /// `config,upper,lower,gamma,solve_order`; `J` joined by spaces, unsolved
    /// entries left empty.
    pub fn log_csv(&self) -> String {
        let mut out = String::from("config,upper,lower,gamma,solve_order\n");
        for e in &self.evaluation_log {
            let j: Vec<String> = e.config.iter().map(usize::to_string).collect();
            let gamma = e.gamma.map(|g| format!("{g:e}")).unwrap_or_default();
            let order = e.solve_order.map(|o| o.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{:e},{},{}", j.join(" "), e.upper, e.lower, gamma, order);
        }
        out
    }

    /// Configurations that were never solved.
    pub fn skipped(&self) -> impl Iterator<Item = &LogEntry> {
        self.evaluation_log.iter().filter(|e| e.gamma.is_none())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Configurations solved concurrently per pruned step; 1 is the
    /// sequential algorithm.
    pub batch: usize,
    pub brute_force_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            batch: 1,
            brute_force_cap: BRUTE_FORCE_CAP,
        }
    }
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All strictly increasing `m`-subsets of `1..=n`, lexicographic.
pub fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 || m > n {
        return out;
    }
    let mut c: Vec<usize> = (1..=m).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..m).rev().find(|&i| c[i] < n - m + i + 1) else {
            return out;
        };
        c[i] += 1;
        for t in i + 1..m {
            c[t] = c[t - 1] + 1;
        }
    }
}

/// `(U_J, L_J)` from the closed-form spectral data. A configuration with
/// an actuator-free mode (all actuators on its nodes) has decay rate 0.
pub fn config_bounds(base: &StringBase, config: &[usize]) -> Result<(f64, f64), StringError> {
    let data = base.spectral(config)?;
    if data.b_norms.contains(&0.0) {
        return Ok((0.0, 0.0));
    }
    let report = summarize(&data);
    Ok((report.best_upper, report.best_lower))
}

/// Decay rate of the optimal feedback for one configuration. A mode the
/// actuators cannot reach stays on the imaginary axis, so the rate is 0 and
/// no Riccati equation is solved.
pub fn config_gamma(base: &StringBase, config: &[usize]) -> Result<f64, SearchError> {
    if base.spectral(config)?.b_norms.contains(&0.0) {
        return Ok(0.0);
    }
    let sys = base.system(config)?;
    solve_care(&sys)
        .map(|s| s.gamma_decay())
        .map_err(|source| SearchError::Solve {
            config: config.to_vec(),
            source,
        })
}

fn prepare(template: &StringConfig) -> Result<(StringBase, Vec<LogEntry>), SearchError> {
    let base = StringBase::new(template)?;
    let configs = combinations(template.n_masses, template.m);
    let log = configs
        .into_par_iter()
        .map(|config| {
            let (upper, lower) = config_bounds(&base, &config)?;
            Ok(LogEntry {
                config,
                upper,
                lower,
                gamma: None,
                solve_order: None,
            })
        })
        .collect::<Result<Vec<_>, StringError>>()?;
    Ok((base, log))
}

fn finish(log: Vec<LogEntry>, lqr_solved: usize) -> SearchResult {
    let gamma_star = log.iter().filter_map(|e| e.gamma).fold(f64::NEG_INFINITY, f64::max);
    let best_configs = log
        .iter()
        .filter(|e| e.gamma.is_some_and(|g| g >= gamma_star * (1.0 - OPTIMAL_REL_TOL)))
        .map(|e| e.config.clone())
        .collect();
    SearchResult {
        gamma_star,
        best_configs,
        lqr_solved,
        total_configs: log.len(),
        evaluation_log: log,
    }
}

/// Bound-pruned search over all placements of `template.m` actuators.
pub fn pruned_search(template: &StringConfig, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    let (base, mut log) = prepare(template)?;
    let batch = opts.batch.max(1);
    let mut solved = 0;

    // Largest L_J first; ties go to the lexicographically smallest J,
    // which is the first in `log`.
    let first = (0..log.len())
        .reduce(|best, i| if log[i].lower > log[best].lower { i } else { best })
        .expect("at least one configuration");
    solved += 1;
    log[first].gamma = Some(config_gamma(&base, &log[first].config)?);
    log[first].solve_order = Some(solved);
    let mut gamma = log[first].gamma.unwrap_or(0.0);

    // Unsolved candidates by U_J descending, then J ascending.
    let mut order: Vec<usize> = (0..log.len()).filter(|&i| i != first).collect();
    order.sort_by(|&a, &b| log[b].upper.total_cmp(&log[a].upper).then(a.cmp(&b)));

    let mut cursor = 0;
    while cursor < order.len() {
        let threshold = gamma * (1.0 - OPTIMAL_REL_TOL);
        let end = (cursor + batch).min(order.len());
        let take: Vec<usize> = order[cursor..end]
            .iter()
            .copied()
            .take_while(|&i| log[i].upper >= threshold)
            .collect();
        if take.is_empty() {
            break;
        }
        let gammas = take
            .par_iter()
            .map(|&i| config_gamma(&base, &log[i].config))
            .collect::<Result<Vec<_>, _>>()?;
        for (&i, g) in take.iter().zip(gammas) {
            solved += 1;
            log[i].gamma = Some(g);
            log[i].solve_order = Some(solved);
            gamma = gamma.max(g);
        }
        cursor += take.len();
    }
    Ok(finish(log, solved))
}

/// Solves every configuration; refuses when there are more than
/// `opts.brute_force_cap`.
pub fn brute_force_search(template: &StringConfig, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    template.validate_template()?;
    let count = binomial(template.n_masses, template.m);
    if count > opts.brute_force_cap as u128 {
        return Err(SearchError::TooMany {
            count,
            cap: opts.brute_force_cap,
        });
    }
    let (base, mut log) = prepare(template)?;
    let gammas = log
        .par_iter()
        .map(|e| config_gamma(&base, &e.config))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, (e, g)) in log.iter_mut().zip(gammas).enumerate() {
        e.gamma = Some(g);
        e.solve_order = Some(i + 1);
    }
    let n = log.len();
    Ok(finish(log, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 2), 435);
        assert_eq!(binomial(30, 8), 5_852_925);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c = combinations(4, 2);
        assert_eq!(c, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(combinations(3, 3), vec![vec![1, 2, 3]]);
        assert_eq!(combinations(7, 3).len(), 35);
    }

    #[test]
    fn full_actuation_is_one_solve() {
        let t = StringConfig::new(4, 4, 10.0, 50.0);
        let p = pruned_search(&t, &SearchOptions::default()).unwrap();
        assert_eq!((p.lqr_solved, p.total_configs), (1, 1));
        let b = brute_force_search(&t, &SearchOptions::default()).unwrap();
        assert_eq!(p.gamma_star, b.gamma_star);
    }

    #[test]
    fn pruned_agrees_with_brute_force() {
        let t = StringConfig::new(6, 2, 10.0, 50.0);
        let p = pruned_search(&t, &SearchOptions::default()).unwrap();
        let b = brute_force_search(&t, &SearchOptions::default()).unwrap();
        assert_eq!(p.best_configs, b.best_configs);
        assert!((p.gamma_star - b.gamma_star).abs() <= 1e-12);
        for e in p.skipped() {
            assert!(e.upper < p.gamma_star);
        }
        for e in &b.evaluation_log {
            assert!(e.lower <= e.upper);
            assert!(e.gamma.unwrap() <= e.upper + 1e-9);
        }
        let batched = pruned_search(&t, &SearchOptions { batch: 4, ..Default::default() }).unwrap();
        assert_eq!(batched.best_configs, b.best_configs);
    }

    #[test]
    fn cap_is_enforced() {
        let t = StringConfig::new(30, 5, 10.0, 50.0);
        match brute_force_search(&t, &SearchOptions::default()) {
            Err(SearchError::TooMany { count, cap }) => assert_eq!((count, cap), (142_506, 5000)),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn csv_log() {
        let t = StringConfig::new(3, 1, 10.0, 50.0);
        let r = brute_force_search(&t, &SearchOptions::default()).unwrap();
        let csv = r.log_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,"));
        // The middle mass sits on a node of the second mode.
        assert_eq!(r.evaluation_log[1].gamma, Some(0.0));
        assert_eq!(r.best_configs, vec![vec![1], vec![3]]);
    }
}
