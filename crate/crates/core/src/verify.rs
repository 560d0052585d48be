//! Randomized and fixed-case checks of the four structural facts about the
//! symmetric JS divergence between mixtures:
//!
//! 1. it is not monotone in the proportions, their gap, or the component
//!    divergence (interior minimizers on the six-face example);
//! 2. it is nondecreasing along rays `(lambda, alpha lambda)`;
//! 3. with equal distinguishing components it is nondecreasing in `|l1 - l2|`;
//! 4. under disjoint supports it splits into a proportion term and a
//!    content term that does not involve `q`.
//!
//! Random PMFs are flat-Dirichlet draws (normalized unit exponentials) on six
//! symbols; disjoint scenarios split the alphabet 3/3.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::bounds::{shard_seed, RNG_NAME};
use crate::calculus::{
    check_rlog_convexity, delta_sjsd_derivative, entropy_derivative, finite_difference,
    ray_sjsd_derivative, DeltaSpec, RaySpec,
};
use crate::error::Result;
use crate::mixture::{
    disjoint_decomposition, scenario_sjsd, DisjointDecomposition, EpsilonFamily, MixtureScenario,
};
use crate::pmf::{blend, entropy_of, sym_js, Alphabet, Pmf, Weight};
use crate::sweep::{
    delta_scan, epsilon_scan, find_grid_minimizer, line_eval, Line, DEFAULT_RESOLUTION, EPSILON,
    LAMBDA_1, LAMBDA_2,
};

pub const RANDOM_ALPHABET_SIZE: usize = 6;
/// Points per ray / gap grid.
pub const MONOTONE_GRID_POINTS: usize = 201;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const DERIVATIVE_SLACK: f64 = 1e-12;
pub const FD_STEP: f64 = 1e-6;
pub const FD_TOLERANCE: f64 = 1e-4;
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-12;
/// Allowed distance between grid minimizers and the reported approximate locations.
pub const MINIMIZER_TOLERANCE: f64 = 0.05;
const INTERIOR_POINTS: usize = 3;
const MAX_NOTES: usize = 5;

/// Flat Dirichlet draw on `alphabet`.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, alphabet: &Arc<Alphabet>) -> Pmf {
    let draws: Vec<f64> = (0..alphabet.size()).map(|_| rng.sample(Exp1)).collect();
    Pmf::normalized(alphabet.clone(), draws).expect("exponential draws are positive")
}

fn uniform_weight<R: Rng + ?Sized>(rng: &mut R) -> Weight {
    Weight(rng.random::<f64>())
}

pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R) -> MixtureScenario {
    let ab = Arc::new(Alphabet::indexed(RANDOM_ALPHABET_SIZE).expect("nonempty"));
    let (a, b, q) = (
        random_pmf(rng, &ab),
        random_pmf(rng, &ab),
        random_pmf(rng, &ab),
    );
    MixtureScenario::new(a, b, q, uniform_weight(rng), uniform_weight(rng))
        .expect("shared alphabet")
}

/// Distinguishing components on the first half of the alphabet, `q` on the second.
pub fn random_disjoint_scenario<R: Rng + ?Sized>(rng: &mut R) -> MixtureScenario {
    let ab = Arc::new(Alphabet::indexed(RANDOM_ALPHABET_SIZE).expect("nonempty"));
    let half = RANDOM_ALPHABET_SIZE / 2;
    let mut on = |lo: usize| {
        let mut m = vec![0.0; RANDOM_ALPHABET_SIZE];
        let draws: Vec<f64> = (0..half).map(|_| rng.sample(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        for (i, d) in draws.into_iter().enumerate() {
            m[lo + i] = d / total;
        }
        Pmf::normalized(ab.clone(), m).expect("positive draws")
    };
    let (a, b, q) = (on(0), on(0), on(half));
    MixtureScenario::new(a, b, q, uniform_weight(rng), uniform_weight(rng))
        .expect("shared alphabet")
}

/// Slope of a ray, log-uniform on `[0.1, 10]`.
fn random_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    10f64.powf(rng.random_range(-1.0..=1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationReport {
    pub pass: bool,
    pub cases: usize,
    pub failures: usize,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    metrics: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Tally {
    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < MAX_NOTES {
                self.notes.push(describe());
            }
        }
    }

    fn track_max(&mut self, key: &str, value: f64) {
        let slot = self
            .metrics
            .entry(key.to_string())
            .or_insert(f64::NEG_INFINITY);
        *slot = slot.max(value);
    }

    fn track_min(&mut self, key: &str, value: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(f64::INFINITY);
        *slot = slot.min(value);
    }

    fn set(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn finish(self) -> ObservationReport {
        ObservationReport {
            pass: self.failures == 0,
            cases: self.cases,
            failures: self.failures,
            metrics: self.metrics,
            notes: self.notes,
        }
    }
}

/// Largest drop between consecutive values.
fn max_decrease(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Interior minimizers on the six-face example with `epsilon = 0.3`.
pub fn check_observation_1() -> Result<ObservationReport> {
    let mut t = Tally::default();
    let table = EpsilonFamily::default().scenario(Weight::ZERO, Weight::ZERO);
    let n = DEFAULT_RESOLUTION;

    let slices = [
        (
            "lambda_2_given_lambda_1_0.3",
            Line::FixedLambda1(Weight(0.3)),
            LAMBDA_2,
            0.5,
        ),
        (
            "lambda_1_given_lambda_2_0.7",
            Line::FixedLambda2(Weight(0.7)),
            LAMBDA_1,
            0.3,
        ),
    ];
    for (key, line, axis, approx) in slices {
        let r = line_eval(&table, "six-face epsilon=0.3", line, n)?;
        let m = find_grid_minimizer(&r, axis)?;
        let first = r.records.first().expect("nonempty").sjsd;
        let last = r.records.last().expect("nonempty").sjsd;
        t.set(&format!("argmin_{key}"), m.grid_min_location);
        t.case(m.grid_min_value < first && m.grid_min_value < last, || {
            format!("{key}: minimum {} is not interior", m.grid_min_location)
        });
        t.case(
            (m.grid_min_location - approx).abs() <= MINIMIZER_TOLERANCE,
            || {
                format!(
                    "{key}: argmin {} not within {MINIMIZER_TOLERANCE} of {approx}",
                    m.grid_min_location
                )
            },
        );
    }

    let eps = epsilon_scan(Weight(0.3), Weight(0.7), n)?;
    let m = find_grid_minimizer(&eps, EPSILON)?;
    t.set("argmin_epsilon_at_0.3_0.7", m.grid_min_location);
    t.case(eps.records[0].sjsd > m.grid_min_value, || {
        "epsilon scan: minimum attained at epsilon = 0".to_string()
    });
    t.case(
        (m.grid_min_location - 0.2).abs() <= MINIMIZER_TOLERANCE,
        || {
            format!(
                "epsilon scan: argmin {} not within {MINIMIZER_TOLERANCE} of 0.2",
                m.grid_min_location
            )
        },
    );

    let gap = delta_scan(&table, "six-face epsilon=0.3", Weight(0.7), n)?;
    let m = find_grid_minimizer(&gap, LAMBDA_1)?;
    t.set("argmin_lambda_1_in_0_0.7", m.grid_min_location);
    t.case(
        gap.records.last().expect("nonempty").sjsd > m.grid_min_value,
        || "gap scan: minimum attained at equal proportions".to_string(),
    );
    t.case(
        (m.grid_min_location - 0.3).abs() <= MINIMIZER_TOLERANCE,
        || {
            format!(
                "gap scan: argmin {} not within {MINIMIZER_TOLERANCE} of 0.3",
                m.grid_min_location
            )
        },
    );
    Ok(t.finish())
}

/// Ray monotonicity on random scenarios, plus the entropy-derivative and
/// `r ln(lambda r + q)` convexity kernels it rests on.
pub fn check_observation_2<R: Rng + ?Sized>(
    rng: &mut R,
    n_random: usize,
) -> Result<ObservationReport> {
    let mut t = Tally::default();
    for case in 0..n_random {
        let s = random_scenario(rng);
        let alpha = random_alpha(rng);
        let end = RaySpec::end_for(alpha);
        let steps = MONOTONE_GRID_POINTS - 1;
        let values: Vec<f64> = (0..=steps)
            .map(|k| {
                let ray =
                    RaySpec::new(alpha, (end * k as f64 / steps as f64).min(end)).expect("on ray");
                let (l1, l2) = ray.lambdas();
                scenario_sjsd(&s.with_lambdas(l1, l2))
            })
            .collect();
        let drop = max_decrease(&values);
        t.track_max("max_grid_decrease", drop);
        t.case(drop <= MONOTONE_SLACK, || {
            format!("case {case}: ray grid drops by {drop:e} (alpha {alpha})")
        });

        for _ in 0..INTERIOR_POINTS {
            let lambda = end * rng.random_range(0.02..0.98);
            let analytic = ray_sjsd_derivative(&s, RaySpec::new(alpha, lambda)?)?;
            let fd = finite_difference(
                |l| {
                    let (l1, l2) = RaySpec::new(alpha, l)?.lambdas();
                    Ok(scenario_sjsd(&s.with_lambdas(l1, l2)))
                },
                lambda,
                FD_STEP,
            )?;
            t.track_min("min_ray_derivative", analytic);
            t.track_max("max_ray_fd_error", (analytic - fd).abs());
            t.case(analytic >= -DERIVATIVE_SLACK, || {
                format!(
                    "case {case}: ray derivative {analytic:e} at lambda {lambda} (alpha {alpha})"
                )
            });
            t.case((analytic - fd).abs() < FD_TOLERANCE, || {
                format!("case {case}: ray derivative {analytic} vs finite difference {fd}")
            });
        }

        let (a, b) = (s.p_tilde_1(), s.q());
        let l = rng.random_range(0.02..0.98);
        let analytic = entropy_derivative(a, b, Weight(l))?;
        let fd = finite_difference(
            |x| Ok(entropy_of(&blend(a.mass(), b.mass(), x))),
            l,
            FD_STEP,
        )?;
        t.track_max("max_entropy_fd_error", (analytic - fd).abs());
        t.case((analytic - fd).abs() < FD_TOLERANCE, || {
            format!("case {case}: entropy derivative {analytic} vs finite difference {fd}")
        });

        let lam = uniform_weight(rng);
        let q_val = 1.0 - rng.random::<f64>();
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let convex = check_rlog_convexity(lam, q_val, &grid)?;
        t.case(convex, || {
            format!("case {case}: r ln({} r + {q_val}) not convex", lam.get())
        });
    }
    Ok(t.finish())
}

/// Gap monotonicity with equal distinguishing components.
pub fn check_observation_3<R: Rng + ?Sized>(
    rng: &mut R,
    n_random: usize,
) -> Result<ObservationReport> {
    let mut t = Tally::default();
    let ab = Arc::new(Alphabet::indexed(RANDOM_ALPHABET_SIZE).expect("nonempty"));
    for case in 0..n_random {
        let pt = random_pmf(rng, &ab);
        let q = random_pmf(rng, &ab);
        let lambda = rng.random_range(0.01..0.99);
        let s = MixtureScenario::new(
            pt.clone(),
            pt.clone(),
            q.clone(),
            Weight(lambda),
            Weight(lambda),
        )?;
        let room = 1.0 - lambda;
        let steps = MONOTONE_GRID_POINTS - 1;
        let at =
            |d: f64| scenario_sjsd(&s.with_lambdas(Weight(lambda), Weight((lambda + d).min(1.0))));
        let values: Vec<f64> = (0..=steps)
            .map(|k| at(room * k as f64 / steps as f64))
            .collect();
        let drop = max_decrease(&values);
        t.track_max("max_grid_decrease", drop);
        t.case(drop <= MONOTONE_SLACK, || {
            format!("case {case}: gap grid drops by {drop:e}")
        });

        // mirrored orientation: l1 above l2
        let mirrored: Vec<f64> = (0..=steps)
            .map(|k| {
                let d = room * k as f64 / steps as f64;
                scenario_sjsd(&s.with_lambdas(Weight((lambda + d).min(1.0)), Weight(lambda)))
            })
            .collect();
        let drop = max_decrease(&mirrored);
        t.track_max("max_grid_decrease", drop);
        t.case(drop <= MONOTONE_SLACK, || {
            format!("case {case}: mirrored gap grid drops by {drop:e}")
        });

        for _ in 0..INTERIOR_POINTS {
            let d = room * rng.random_range(0.02..0.98);
            let analytic = delta_sjsd_derivative(&pt, &q, DeltaSpec::new(lambda, d)?)?;
            let fd = finite_difference(|x| Ok(at(x)), d, FD_STEP)?;
            t.track_min("min_delta_derivative", analytic);
            t.track_max("max_delta_fd_error", (analytic - fd).abs());
            t.case(analytic >= -DERIVATIVE_SLACK, || {
                format!("case {case}: gap derivative {analytic:e} at lambda {lambda}, delta {d}")
            });
            t.case((analytic - fd).abs() < FD_TOLERANCE, || {
                format!("case {case}: gap derivative {analytic} vs finite difference {fd}")
            });
        }
    }
    Ok(t.finish())
}

/// Disjoint-support decomposition against the direct divergence, using
/// `decompose` as the implementation under test.
pub fn check_observation_4_with<R, F>(
    rng: &mut R,
    n_random: usize,
    decompose: F,
) -> Result<ObservationReport>
where
    R: Rng + ?Sized,
    F: Fn(&MixtureScenario) -> Result<DisjointDecomposition>,
{
    let mut t = Tally::default();
    for case in 0..n_random {
        let s = random_disjoint_scenario(rng);
        let d = decompose(&s)?;
        let err = (d.total - scenario_sjsd(&s)).abs();
        t.track_max("max_identity_error", err);
        t.case(err < DECOMPOSITION_TOLERANCE, || {
            format!(
                "case {case}: decomposition {} vs direct {}",
                d.total,
                scenario_sjsd(&s)
            )
        });

        let corner = decompose(&s.with_lambdas(Weight::ONE, Weight::ZERO))?;
        let err = (corner.total - LN_2).abs();
        t.track_max("max_corner_error", err);
        t.case(err < DECOMPOSITION_TOLERANCE, || {
            format!("case {case}: (1,0) corner gives {}", corner.total)
        });

        let lambda = uniform_weight(rng);
        let diag = decompose(&s.with_lambdas(lambda, lambda))?;
        let expected = lambda.get() * sym_js(s.p_tilde_1(), s.p_tilde_2())?;
        let err = (diag.total - expected).abs();
        t.track_max("max_diagonal_error", err);
        t.case(err < DECOMPOSITION_TOLERANCE, || {
            format!(
                "case {case}: diagonal {} vs lambda * JS {}",
                diag.total, expected
            )
        });
    }
    Ok(t.finish())
}

pub fn check_observation_4<R: Rng + ?Sized>(
    rng: &mut R,
    n_random: usize,
) -> Result<ObservationReport> {
    check_observation_4_with(rng, n_random, disjoint_decomposition)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub observation_1: ObservationReport,
    pub observation_2: ObservationReport,
    pub observation_3: ObservationReport,
    pub observation_4: ObservationReport,
    pub seed: u64,
    pub n_random: usize,
    pub rng: &'static str,
    pub pass: bool,
}

/// Runs all four checks. Each randomized check draws from its own stream
/// derived from `seed`, so the report is a pure function of `(seed, n_random)`.
pub fn verify_observations(seed: u64, n_random: usize) -> Result<VerifyReport> {
    let stream = |k: u64| ChaCha8Rng::seed_from_u64(shard_seed(seed, k));
    let observation_1 = check_observation_1()?;
    let observation_2 = check_observation_2(&mut stream(2), n_random)?;
    let observation_3 = check_observation_3(&mut stream(3), n_random)?;
    let observation_4 = check_observation_4(&mut stream(4), n_random)?;
    let pass = observation_1.pass && observation_2.pass && observation_3.pass && observation_4.pass;
    Ok(VerifyReport {
        observation_1,
        observation_2,
        observation_3,
        observation_4,
        seed,
        n_random,
        rng: RNG_NAME,
        pass,
    })
}
