//! `mixjsd`: sweeps, bounds, urn simulation and verification for the
//! symmetric JS divergence between two-component mixtures.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use mixjsd::bounds::{bayes_error_exact, RNG_NAME};
use mixjsd::io::{emit_csv, emit_json, load_scenario, write_csv, write_json};
use mixjsd::sweep::{DEFAULT_RESOLUTION, EPSILON};
use mixjsd::{
    bounds_report, delta_scan, epsilon_scan, find_grid_minimizer, line_eval, simulate_urn_game,
    sweep_grid, verify_observations, ClassificationProblem, EpsilonFamily, Line, MixtureScenario,
    SweepResult, UrnGameConfig, Weight,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mixjsd",
    version,
    about = "Symmetric JS divergence between two-component discrete mixtures"
)]
struct Cli {
    /// Scenario JSON file; defaults to the six-face epsilon family.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Epsilon of the six-face family, used when no scenario file is given.
    #[arg(long, global = true, default_value_t = EpsilonFamily::DEFAULT_EPSILON)]
    epsilon: f64,

    /// Replace q by the uniform distribution on {3,4,5,6} (disjoint supports).
    #[arg(long, global = true)]
    disjoint_q: bool,

    /// Grid intervals per axis.
    #[arg(long, global = true, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full (lambda_1, lambda_2) grid.
    Sweep,
    /// One-dimensional slice of the grid.
    Line {
        /// `lambda_1`, `lambda_2` or `diagonal`.
        #[arg(long)]
        fixed: String,
        /// Value of the fixed proportion.
        #[arg(long)]
        value: Option<f64>,
    },
    /// Scan epsilon of the six-face family at fixed proportions.
    EpsScan {
        #[arg(long, default_value_t = 0.3)]
        lambda_1: f64,
        #[arg(long, default_value_t = 0.7)]
        lambda_2: f64,
    },
    /// Scan lambda_1 over [0, lambda_2] at fixed lambda_2.
    DeltaScan {
        #[arg(long, default_value_t = 0.7)]
        lambda_2: f64,
    },
    /// JS value, error bounds and exact Bayes error for urn A vs urn B.
    Bounds {
        #[arg(long)]
        lambda_1: Option<f64>,
        #[arg(long)]
        lambda_2: Option<f64>,
        /// Prior of urn A.
        #[arg(long, default_value_t = 0.5)]
        pi: f64,
        /// Also run the urn game with this many trials.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Monte Carlo urn game with MAP guessing.
    UrnSim {
        #[arg(long)]
        lambda_1: Option<f64>,
        #[arg(long)]
        lambda_2: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        pi: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Run the observation checks; exits 1 if any fails.
    Verify {
        /// Random scenarios per randomized check.
        #[arg(long, default_value_t = 1000)]
        n_random: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Components from the scenario file, or the six-face family.
fn template(cli: &Cli) -> CliResult<(MixtureScenario, String)> {
    if let Some(path) = &cli.scenario {
        if cli.disjoint_q {
            return Err(Failure::Input(
                "--disjoint-q only applies to the built-in family".into(),
            ));
        }
        return Ok((load_scenario(path)?, path.display().to_string()));
    }
    let fam = EpsilonFamily::new(cli.epsilon)?;
    let (s, kind) = if cli.disjoint_q {
        (
            fam.disjoint_scenario(Weight::ZERO, Weight::ZERO),
            "six-face, q uniform on {3,4,5,6}",
        )
    } else {
        (fam.scenario(Weight::ZERO, Weight::ZERO), "six-face")
    };
    Ok((s, format!("{kind}, epsilon={}", fam.epsilon())))
}

/// Scenario proportions, overridden by explicit flags.
fn with_overrides(
    s: MixtureScenario,
    l1: Option<f64>,
    l2: Option<f64>,
    from_file: bool,
) -> CliResult<MixtureScenario> {
    let pick = |flag: Option<f64>, current: Weight, default: f64| -> CliResult<Weight> {
        match flag {
            Some(v) => Ok(Weight::new(v)?),
            None if from_file => Ok(current),
            None => Ok(Weight::new(default)?),
        }
    };
    let l1 = pick(l1, s.lambda_1(), 0.3)?;
    let l2 = pick(l2, s.lambda_2(), 0.7)?;
    Ok(s.with_lambdas(l1, l2))
}

fn write_sweep(cli: &Cli, result: &SweepResult) -> CliResult<()> {
    match &cli.out {
        Some(path) => {
            emit_csv(result, path)?;
            emit_json(&result.metadata, meta_path(path))?;
        }
        None => write_csv(result, io::stdout().lock())?,
    }
    Ok(())
}

fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_report<T: Serialize>(cli: &Cli, value: &T) -> CliResult<()> {
    match &cli.out {
        Some(path) => emit_json(value, path)?,
        None => write_json(value, io::stdout().lock())?,
    }
    Ok(())
}

fn report_minimizer(result: &SweepResult, axis: &str) -> CliResult<()> {
    let m = find_grid_minimizer(result, axis)?;
    eprintln!(
        "grid minimum {:.17e} at {} = {} (step {})",
        m.grid_min_value, m.free_param, m.grid_min_location, m.resolution
    );
    Ok(())
}

#[derive(Serialize)]
struct UrnSimOutput {
    empirical: f64,
    stderr: f64,
    errors: u64,
    exact: f64,
    seed: u64,
    n_trials: u64,
    rng: &'static str,
    lambda_1: f64,
    lambda_2: f64,
    pi: f64,
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sweep => {
            let (s, label) = template(cli)?;
            write_sweep(cli, &sweep_grid(&s, &label, cli.resolution)?)
        }
        Command::Line { fixed, value } => {
            let (s, label) = template(cli)?;
            let line = Line::parse(fixed, *value)?;
            let result = line_eval(&s, &label, line, cli.resolution)?;
            report_minimizer(&result, line.free_axis())?;
            write_sweep(cli, &result)
        }
        Command::EpsScan { lambda_1, lambda_2 } => {
            if cli.scenario.is_some() || cli.disjoint_q {
                return Err(Failure::Input(
                    "eps-scan always uses the six-face family".into(),
                ));
            }
            let result = epsilon_scan(
                Weight::new(*lambda_1)?,
                Weight::new(*lambda_2)?,
                cli.resolution,
            )?;
            report_minimizer(&result, EPSILON)?;
            write_sweep(cli, &result)
        }
        Command::DeltaScan { lambda_2 } => {
            let (s, label) = template(cli)?;
            let result = delta_scan(&s, &label, Weight::new(*lambda_2)?, cli.resolution)?;
            report_minimizer(&result, "lambda_1")?;
            write_sweep(cli, &result)
        }
        Command::Bounds {
            lambda_1,
            lambda_2,
            pi,
            trials,
        } => {
            let (s, _) = template(cli)?;
            let s = with_overrides(s, *lambda_1, *lambda_2, cli.scenario.is_some())?;
            let pi = Weight::new(*pi)?;
            let problem = ClassificationProblem::from_scenario(&s, pi);
            let sim = trials
                .map(|n| UrnGameConfig::new(s.clone(), pi, n, cli.seed))
                .transpose()?;
            write_report(cli, &bounds_report(&problem, sim.as_ref())?)
        }
        Command::UrnSim {
            lambda_1,
            lambda_2,
            pi,
            trials,
        } => {
            let (s, _) = template(cli)?;
            let s = with_overrides(s, *lambda_1, *lambda_2, cli.scenario.is_some())?;
            let pi = Weight::new(*pi)?;
            let cfg = UrnGameConfig::new(s.clone(), pi, *trials, cli.seed)?;
            let out = simulate_urn_game(&cfg)?;
            write_report(
                cli,
                &UrnSimOutput {
                    empirical: out.empirical_error,
                    stderr: out.stderr,
                    errors: out.errors,
                    exact: bayes_error_exact(&cfg.problem()),
                    seed: out.seed,
                    n_trials: out.n_trials,
                    rng: RNG_NAME,
                    lambda_1: s.lambda_1().get(),
                    lambda_2: s.lambda_2().get(),
                    pi: pi.get(),
                },
            )
        }
        Command::Verify { n_random } => {
            let report = verify_observations(cli.seed, *n_random)?;
            write_report(cli, &report)?;
            for (name, obs) in [
                ("observation_1", &report.observation_1),
                ("observation_2", &report.observation_2),
                ("observation_3", &report.observation_3),
                ("observation_4", &report.observation_4),
            ] {
                let status = if obs.pass { "pass" } else { "FAIL" };
                eprintln!(
                    "{name}: {status} ({} cases, {} failures)",
                    obs.cases, obs.failures
                );
                for note in &obs.notes {
                    eprintln!("  {note}");
                }
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    };
    let _ = io::stdout().flush();
    code
}
