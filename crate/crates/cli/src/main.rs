use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lqrdecay::bounds::{exclusion_geometry, plot_script, summarize};
use lqrdecay::linalg::spectral_norm;
use lqrdecay::report::analyze;
use lqrdecay::search::{brute_force_search, pruned_search, SearchOptions, BRUTE_FORCE_CAP};
use lqrdecay::spectral::{decompose, decompose_unchecked, SpectralError};
use lqrdecay::riccati::solve_care;
use lqrdecay::string_model::{build_string, gram, raw_a, ClosedForm, StringBase, StringConfig};
use serde::Serialize;

mod input;
mod reproduce;

/// Decay rates of optimal regulators for conservative systems.
#[derive(Parser)]
#[command(name = "lqrdecay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the regulator problem and check the spectrum against every bound.
    /// Exits with 2 when a bound is violated.
    Analyze {
        input: PathBuf,
        /// Accept a non-skew-Hermitian A; bounds are then evaluated but not guaranteed.
        #[arg(long)]
        allow_non_skew: bool,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Regenerate one of the built-in experiments.
    Reproduce {
        target: Target,
        /// Largest actuator count for the string table.
        #[arg(long, default_value_t = 2)]
        max_m: usize,
        /// Pair system shown by the region plot (1-7).
        #[arg(long, default_value_t = 3)]
        row: usize,
    },
    /// Find the actuator placement with the largest decay rate.
    Search {
        /// String template: {"N", "m", "tau_over_h", "mass"}.
        config: PathBuf,
        /// Solve every configuration.
        #[arg(long, conflicts_with = "pruned")]
        brute: bool,
        /// Bound-pruned search (the default).
        #[arg(long)]
        pruned: bool,
        /// Also run brute force and compare.
        #[arg(long)]
        verify: bool,
        /// Solve this many candidates concurrently in the pruned search.
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        cap: usize,
        /// Write the evaluation log as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build one string configuration and compare closed forms with numerics.
    String { config: PathBuf },
    /// Bounds and exclusion geometry without solving the Riccati equation.
    Bounds {
        input: PathBuf,
        #[arg(long)]
        allow_non_skew: bool,
        /// Emit plot primitives instead of JSON.
        #[arg(long)]
        plot: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Table1,
    Table2,
    Remark2,
    Figure1,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("output: cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LQRDECAY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| anyhow!("input: LQRDECAY_THREADS must be a non-negative integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            input,
            allow_non_skew,
            output,
        } => {
            let sys = input::system(&input)?;
            let report = analyze(&sys, allow_non_skew)?;
            emit(&to_json(&report)?, output.as_deref())?;
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            Ok(if report.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Reproduce { target, max_m, row } => {
            let text = match target {
                Target::Table1 => reproduce::pairs()?,
                Target::Table2 => reproduce::strings(max_m, &SearchOptions::default())?,
                Target::Remark2 => reproduce::shifts()?,
                Target::Figure1 => reproduce::region(row)?,
            };
            emit(&text, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Search {
            config,
            brute,
            pruned: _,
            verify,
            batch,
            cap,
            csv,
        } => {
            let template = input::string_config(&config)?;
            let opts = SearchOptions {
                batch,
                brute_force_cap: cap,
            };
            let result = if brute {
                brute_force_search(&template, &opts)?
            } else {
                pruned_search(&template, &opts)?
            };
            emit(&to_json(&result)?, None)?;
            if let Some(p) = csv {
                emit(&result.log_csv(), Some(&p))?;
            }
            if verify && !brute {
                let oracle = brute_force_search(&template, &opts)?;
                let same = oracle.best_configs == result.best_configs
                    && (oracle.gamma_star - result.gamma_star).abs() <= 1e-12;
                let sound = result.skipped().all(|e| e.upper < result.gamma_star);
                if same && sound {
                    eprintln!(
                        "verify: pruned search matches brute force (gamma_star {:e}, {} of {} solved)",
                        result.gamma_star, result.lqr_solved, result.total_configs
                    );
                } else {
                    eprintln!(
                        "verify: MISMATCH pruned {:e} {:?} vs brute force {:e} {:?}",
                        result.gamma_star, result.best_configs, oracle.gamma_star, oracle.best_configs
                    );
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::String { config } => {
            let cfg = input::string_config(&config)?;
            let s = build_string(&cfg)?;
            let numeric = decompose(&s.sys.a, &s.sys.b)?;
            let positions = cfg.validate()?;
            let closed = StringBase::new(&cfg)?.spectral(positions)?;
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
            let lambda_dev = numeric
                .lambdas
                .iter()
                .zip(&closed.lambdas)
                .map(|(x, y)| rel(*x, *y))
                .fold(0.0, f64::max);
            let b_dev = numeric
                .b_norms
                .iter()
                .zip(&closed.b_norms)
                .map(|(x, y)| (x - y).abs() / closed.b_norm)
                .fold(0.0, f64::max);
            let ga = &gram(&cfg) * &raw_a(&cfg);
            let sol = solve_care(&s.sys)?;
            #[derive(Serialize)]
            struct StringSummary<'a> {
                config: &'a StringConfig,
                closed_form: &'a ClosedForm,
                numeric_b_norm: f64,
                max_rel_lambda_deviation: f64,
                max_rel_b_norm_deviation: f64,
                energy_defect: f64,
                gamma_decay: f64,
                x_norm: f64,
            }
            let summary = StringSummary {
                config: &cfg,
                closed_form: &s.closed_form,
                numeric_b_norm: spectral_norm(&s.sys.b),
                max_rel_lambda_deviation: lambda_dev,
                max_rel_b_norm_deviation: b_dev,
                energy_defect: (&ga + &ga.adjoint()).frobenius_norm(),
                gamma_decay: sol.gamma_decay(),
                x_norm: sol.x_norm(),
            };
            emit(&to_json(&summary)?, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds {
            input,
            allow_non_skew,
            plot,
        } => {
            let sys = input::system(&input)?;
            let data = match decompose(&sys.a, &sys.b) {
                Ok(d) => d,
                Err(SpectralError::NotSkewHermitian { .. }) if allow_non_skew => decompose_unchecked(&sys.a, &sys.b)?,
                Err(e) => return Err(anyhow!("precondition: {e}")),
            };
            let text = if plot {
                plot_script(&exclusion_geometry(&data), &[])
            } else {
                to_json(&summarize(&data))?
            };
            emit(&text, None)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
