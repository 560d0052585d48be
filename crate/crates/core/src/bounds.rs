//! Binary classification with discrete features: exact Bayes (MAP) error,
//! the JS-divergence error bounds, and a seeded Monte Carlo version of the
//! two-urn dice game.
//!
//! The bounds are `(h2(pi) - JS)^2 / 4 <= P_e <= (h2(pi) - JS) / 2`. They
//! only bracket the Bayes error when the information quantities are measured
//! in bits; in nats the upper bound already fails for identical class
//! distributions (`ln 2 / 2 < 1/2`). [`js_error_bounds`] therefore converts
//! to bits, and [`js_error_bounds_in`] exposes both conventions.

use std::f64::consts::LN_2;

use rand::distr::{weighted::WeightedIndex, Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::{build_p1, build_p2, MixtureScenario};
use crate::pmf::{binary_entropy, js_divergence, Pmf, Weight};

/// Name of the generator recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Trials per independently seeded shard of the urn simulation.
pub const SHARD_TRIALS: u64 = 1 << 16;

/// Slack allowed when asserting `lower <= exact <= upper`.
pub const BRACKET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogUnit {
    Nats,
    Bits,
}

impl LogUnit {
    /// Converts a quantity measured in nats into this unit.
    pub fn from_nats(self, value: f64) -> f64 {
        match self {
            LogUnit::Nats => value,
            LogUnit::Bits => value / LN_2,
        }
    }
}

/// Unit in which the error bounds hold.
pub const BOUNDS_UNIT: LogUnit = LogUnit::Bits;

/// Two classes with prior `pi` for class 1 and feature distributions `r1`, `r2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationProblem {
    pi: Weight,
    r1: Pmf,
    r2: Pmf,
}

impl ClassificationProblem {
    pub fn new(pi: Weight, r1: Pmf, r2: Pmf) -> Result<Self> {
        r1.check_alphabet(&r2)?;
        Ok(Self { pi, r1, r2 })
    }

    /// Urn A rolls from `p1`, urn B from `p2`.
    pub fn from_scenario(s: &MixtureScenario, pi: Weight) -> Self {
        Self {
            pi,
            r1: build_p1(s),
            r2: build_p2(s),
        }
    }

    pub fn pi(&self) -> Weight {
        self.pi
    }

    pub fn r1(&self) -> &Pmf {
        &self.r1
    }

    pub fn r2(&self) -> &Pmf {
        &self.r2
    }

    /// MAP decision per symbol: `true` means class 1. Ties go to class 1.
    fn decisions(&self) -> Vec<bool> {
        let (a, b) = (self.pi.get(), self.pi.complement());
        self.r1
            .mass()
            .iter()
            .zip(self.r2.mass())
            .map(|(&x, &y)| a * x >= b * y)
            .collect()
    }
}

/// `sum_x min(pi r1(x), (1 - pi) r2(x))`.
pub fn bayes_error_exact(p: &ClassificationProblem) -> f64 {
    let (a, b) = (p.pi.get(), p.pi.complement());
    p.r1.mass()
        .iter()
        .zip(p.r2.mass())
        .map(|(&x, &y)| (a * x).min(b * y))
        .sum()
}

/// Lower and upper bound on the Bayes error in the given unit convention.
pub fn js_error_bounds_in(p: &ClassificationProblem, unit: LogUnit) -> (f64, f64) {
    let js = js_divergence(&p.r1, &p.r2, p.pi).expect("alphabets checked at construction");
    let h = binary_entropy(p.pi.get()).expect("weight is in [0, 1]");
    let gap = h - js;
    debug_assert!(gap >= -1e-12, "h2(pi) - JS = {gap}");
    let d = unit.from_nats(gap.max(0.0));
    (d * d / 4.0, d / 2.0)
}

/// Lower and upper bound on the Bayes error, in bits.
pub fn js_error_bounds(p: &ClassificationProblem) -> (f64, f64) {
    js_error_bounds_in(p, BOUNDS_UNIT)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnGameConfig {
    pub scenario: MixtureScenario,
    /// Probability of picking urn A.
    pub pi: Weight,
    pub n_trials: u64,
    pub seed: u64,
}

impl UrnGameConfig {
    pub fn new(scenario: MixtureScenario, pi: Weight, n_trials: u64, seed: u64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
        }
        Ok(Self {
            scenario,
            pi,
            n_trials,
            seed,
        })
    }

    pub fn problem(&self) -> ClassificationProblem {
        ClassificationProblem::from_scenario(&self.scenario, self.pi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UrnGameOutcome {
    pub empirical_error: f64,
    pub stderr: f64,
    pub errors: u64,
    pub n_trials: u64,
    pub seed: u64,
    pub rng: &'static str,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of shard `index`, a function of the run seed and the index only.
pub fn shard_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

struct Sampler {
    urn: Bernoulli,
    roll_a: Option<WeightedIndex<f64>>,
    roll_b: Option<WeightedIndex<f64>>,
    guess_a: Vec<bool>,
}

impl Sampler {
    fn new(cfg: &UrnGameConfig) -> Result<Self> {
        let problem = cfg.problem();
        let urn = Bernoulli::new(cfg.pi.get())
            .map_err(|e| Error::InvalidArgument(format!("urn prior: {e}")))?;
        // A roll distribution is only needed if its urn can be drawn.
        let roll = |p: &Pmf, live: bool| -> Result<Option<WeightedIndex<f64>>> {
            if !live {
                return Ok(None);
            }
            WeightedIndex::new(p.mass())
                .map(Some)
                .map_err(|e| Error::InvalidArgument(format!("roll distribution: {e}")))
        };
        Ok(Self {
            urn,
            roll_a: roll(problem.r1(), cfg.pi.get() > 0.0)?,
            roll_b: roll(problem.r2(), cfg.pi.complement() > 0.0)?,
            guess_a: problem.decisions(),
        })
    }

    fn shard_errors(&self, seed: u64, trials: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut errors = 0;
        for _ in 0..trials {
            let from_a = self.urn.sample(&mut rng);
            let roll = if from_a { &self.roll_a } else { &self.roll_b };
            let x = roll
                .as_ref()
                .expect("drawn urn has a roll distribution")
                .sample(&mut rng);
            if self.guess_a[x] != from_a {
                errors += 1;
            }
        }
        errors
    }
}

fn shard_plan(n_trials: u64) -> Vec<(u64, u64)> {
    let shards = n_trials.div_ceil(SHARD_TRIALS);
    (0..shards)
        .map(|i| (i, SHARD_TRIALS.min(n_trials - i * SHARD_TRIALS)))
        .collect()
}

fn outcome(cfg: &UrnGameConfig, errors: u64) -> UrnGameOutcome {
    let n = cfg.n_trials as f64;
    let p = errors as f64 / n;
    UrnGameOutcome {
        empirical_error: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        errors,
        n_trials: cfg.n_trials,
        seed: cfg.seed,
        rng: RNG_NAME,
    }
}

/// Plays the urn game `n_trials` times with MAP guessing and reports the
/// error fraction with its binomial standard error.
///
/// Shards run in parallel; the result depends only on the configuration.
pub fn simulate_urn_game(cfg: &UrnGameConfig) -> Result<UrnGameOutcome> {
    let sampler = Sampler::new(cfg)?;
    let errors = shard_plan(cfg.n_trials)
        .into_par_iter()
        .map(|(i, trials)| sampler.shard_errors(shard_seed(cfg.seed, i), trials))
        .sum();
    Ok(outcome(cfg, errors))
}

/// Single-threaded reference path of [`simulate_urn_game`].
pub fn simulate_urn_game_sequential(cfg: &UrnGameConfig) -> Result<UrnGameOutcome> {
    let sampler = Sampler::new(cfg)?;
    let errors = shard_plan(cfg.n_trials)
        .into_iter()
        .map(|(i, trials)| sampler.shard_errors(shard_seed(cfg.seed, i), trials))
        .sum();
    Ok(outcome(cfg, errors))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    #[serde(rename = "js_nats")]
    pub js_value: f64,
    #[serde(rename = "lower")]
    pub lower_bound: f64,
    #[serde(rename = "upper")]
    pub upper_bound: f64,
    #[serde(rename = "exact")]
    pub exact_error: f64,
    #[serde(rename = "empirical")]
    pub empirical_error: Option<f64>,
    #[serde(rename = "stderr")]
    pub empirical_stderr: Option<f64>,
    pub seed: Option<u64>,
    pub n_trials: Option<u64>,
    pub bound_units: LogUnit,
    pub rng: Option<&'static str>,
}

/// Collects JS value, bounds, exact error and (optionally) a simulated error.
///
/// Fails if the bounds do not bracket the exact error, or if the simulation
/// config describes a different problem.
pub fn bounds_report(
    p: &ClassificationProblem,
    sim: Option<&UrnGameConfig>,
) -> Result<BoundsReport> {
    let js_value = js_divergence(&p.r1, &p.r2, p.pi)?;
    let (lower, upper) = js_error_bounds(p);
    let exact = bayes_error_exact(p);
    if !(lower <= exact + BRACKET_TOLERANCE && exact <= upper + BRACKET_TOLERANCE) {
        return Err(Error::Bracketing {
            lower,
            exact,
            upper,
        });
    }
    let mut report = BoundsReport {
        js_value,
        lower_bound: lower,
        upper_bound: upper,
        exact_error: exact,
        empirical_error: None,
        empirical_stderr: None,
        seed: None,
        n_trials: None,
        bound_units: BOUNDS_UNIT,
        rng: None,
    };
    if let Some(cfg) = sim {
        if cfg.problem() != *p {
            return Err(Error::InvalidArgument(
                "simulation config describes a different classification problem".into(),
            ));
        }
        let out = simulate_urn_game(cfg)?;
        report.empirical_error = Some(out.empirical_error);
        report.empirical_stderr = Some(out.stderr);
        report.seed = Some(out.seed);
        report.n_trials = Some(out.n_trials);
        report.rng = Some(RNG_NAME);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::EpsilonFamily;

    fn pmf(m: &[f64]) -> Pmf {
        Pmf::from_masses(m.to_vec()).unwrap()
    }

    fn w(x: f64) -> Weight {
        Weight::new(x).unwrap()
    }

    #[test]
    fn exact_error_examples() {
        let a = pmf(&[0.3, 0.7]);
        let same = ClassificationProblem::new(w(0.5), a.clone(), a).unwrap();
        assert_eq!(bayes_error_exact(&same), 0.5);

        let disjoint =
            ClassificationProblem::new(w(0.37), pmf(&[1.0, 0.0]), pmf(&[0.0, 1.0])).unwrap();
        assert_eq!(bayes_error_exact(&disjoint), 0.0);

        let p = ClassificationProblem::new(w(0.5), pmf(&[1.0, 0.0]), pmf(&[0.5, 0.5])).unwrap();
        assert_eq!(bayes_error_exact(&p), 0.25);
    }

    #[test]
    fn identical_classes_separate_the_unit_conventions() {
        let a = pmf(&[0.3, 0.7]);
        let p = ClassificationProblem::new(w(0.5), a.clone(), a).unwrap();
        let (lo_n, up_n) = js_error_bounds_in(&p, LogUnit::Nats);
        assert!((lo_n - LN_2 * LN_2 / 4.0).abs() < 1e-15);
        assert!((up_n - LN_2 / 2.0).abs() < 1e-15);
        // exact error 0.5 escapes the nat bounds
        assert!(up_n < bayes_error_exact(&p));

        let (lo, up) = js_error_bounds(&p);
        assert!((lo - 0.25).abs() < 1e-15);
        assert!((up - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disjoint_bounds_are_zero() {
        let p = ClassificationProblem::new(w(0.5), pmf(&[1.0, 0.0]), pmf(&[0.0, 1.0])).unwrap();
        let r = bounds_report(&p, None).unwrap();
        assert!(r.lower_bound.abs() < 1e-12 && r.upper_bound.abs() < 1e-12);
        assert_eq!(r.exact_error, 0.0);
        assert!((r.js_value - LN_2).abs() < 1e-15);
    }

    #[test]
    fn table1_bounds_bracket_exact() {
        let s = EpsilonFamily::default().scenario(w(0.3), w(0.7));
        let p = ClassificationProblem::from_scenario(&s, Weight::HALF);
        let exact = bayes_error_exact(&p);
        assert!((exact - 0.475).abs() < 1e-15);
        let (lo, up) = js_error_bounds(&p);
        assert!(lo <= exact && exact <= up, "{lo} {exact} {up}");
    }

    #[test]
    fn report_for_identical_classes() {
        let a = pmf(&[0.3, 0.7]);
        let p = ClassificationProblem::new(w(0.5), a.clone(), a).unwrap();
        let r = bounds_report(&p, None).unwrap();
        assert_eq!(r.js_value, 0.0);
        assert_eq!(r.exact_error, 0.5);
        assert_eq!(r.empirical_error, None);
    }

    #[test]
    fn urn_game_degenerate_cases() {
        let fam = EpsilonFamily::default();
        let (a, _, q) = fam.triple();
        let same = MixtureScenario::new(a.clone(), a.clone(), q.clone(), w(0.4), w(0.4)).unwrap();
        let cfg = UrnGameConfig::new(same, Weight::ONE, 10_000, 9).unwrap();
        assert_eq!(simulate_urn_game(&cfg).unwrap().empirical_error, 0.0);

        let disjoint = fam.disjoint_scenario(w(1.0), w(0.0));
        for seed in 0..3 {
            let cfg = UrnGameConfig::new(disjoint.clone(), Weight::HALF, 5_000, seed).unwrap();
            let out = simulate_urn_game(&cfg).unwrap();
            assert_eq!(out.errors, 0);
            assert_eq!(out.stderr, 0.0);
        }
        assert!(UrnGameConfig::new(fam.scenario(w(0.1), w(0.1)), Weight::HALF, 0, 1).is_err());
    }

    #[test]
    fn sharded_and_sequential_agree() {
        let s = EpsilonFamily::default().scenario(w(0.3), w(0.7));
        let cfg = UrnGameConfig::new(s, Weight::HALF, 3 * SHARD_TRIALS + 17, 42).unwrap();
        let par = simulate_urn_game(&cfg).unwrap();
        let seq = simulate_urn_game_sequential(&cfg).unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.n_trials, 3 * SHARD_TRIALS + 17);
    }

    #[test]
    fn report_rejects_foreign_simulation() {
        let fam = EpsilonFamily::default();
        let p = ClassificationProblem::from_scenario(&fam.scenario(w(0.3), w(0.7)), Weight::HALF);
        let cfg = UrnGameConfig::new(fam.scenario(w(0.3), w(0.6)), Weight::HALF, 100, 1).unwrap();
        assert!(matches!(
            bounds_report(&p, Some(&cfg)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
