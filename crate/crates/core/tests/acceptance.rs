//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! The randomized checks here are written against the public primitives
//! (`scenario_sjsd`, the derivative functions, `finite_difference`) rather
//! than reusing the `verify` module, so they double as an independent
//! re-implementation of the verification logic.

use std::f64::consts::LN_2;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixjsd::sweep::{DEFAULT_RESOLUTION, EPSILON, LAMBDA_1, LAMBDA_2};
use mixjsd::verify::{random_disjoint_scenario, random_pmf, random_scenario};
use mixjsd::{
    bayes_error_exact, check_rlog_convexity, delta_scan, delta_sjsd_derivative,
    disjoint_decomposition, entropy, entropy_derivative, epsilon_scan, find_grid_minimizer,
    finite_difference, js_error_bounds, line_eval, ray_sjsd_derivative, scenario_sjsd,
    simulate_urn_game, sym_js, Alphabet, ClassificationProblem, DeltaSpec, EpsilonFamily, Line,
    MixtureScenario, Pmf, RaySpec, UrnGameConfig, Weight,
};

const MINIMIZER_TOL: f64 = 0.05;
const IDENTITY_TOL: f64 = 1e-12;
const SLACK: f64 = 1e-12;
const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn w(x: f64) -> Weight {
    Weight::new(x).unwrap()
}

fn table1() -> MixtureScenario {
    EpsilonFamily::new(0.3)
        .unwrap()
        .scenario(Weight::ZERO, Weight::ZERO)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn slice_minimizer(line: Line, axis: &str, target: f64) -> Outcome {
    let (m, elapsed) = timed(|| {
        let r = line_eval(&table1(), "six-face", line, DEFAULT_RESOLUTION).unwrap();
        find_grid_minimizer(&r, axis).unwrap()
    });
    let ok = (m.grid_min_location - target).abs() <= MINIMIZER_TOL
        && (m.resolution - 0.005).abs() < 1e-9
        && elapsed < Duration::from_secs(1);
    check(
        ok,
        format!(
            "argmin {axis} = {} (target {target} +- {MINIMIZER_TOL}), {elapsed:?}",
            m.grid_min_location
        ),
    )
}

fn criterion_1() -> Outcome {
    slice_minimizer(Line::FixedLambda1(w(0.3)), LAMBDA_2, 0.5)
}

fn criterion_2() -> Outcome {
    slice_minimizer(Line::FixedLambda2(w(0.7)), LAMBDA_1, 0.3)
}

fn criterion_3() -> Outcome {
    let r = epsilon_scan(w(0.3), w(0.7), DEFAULT_RESOLUTION).unwrap();
    let m = find_grid_minimizer(&r, EPSILON).unwrap();
    let at_zero = r.records[0].sjsd;
    let ok = (m.grid_min_location - 0.2).abs() <= MINIMIZER_TOL && at_zero > m.grid_min_value;
    check(
        ok,
        format!(
            "argmin epsilon = {} (target 0.2 +- {MINIMIZER_TOL}); sjsd(0) = {at_zero:.6e} > min {:.6e}",
            m.grid_min_location, m.grid_min_value
        ),
    )
}

fn criterion_4() -> Outcome {
    let r = delta_scan(&table1(), "six-face", w(0.7), DEFAULT_RESOLUTION).unwrap();
    let m = find_grid_minimizer(&r, LAMBDA_1).unwrap();
    let covers =
        r.records.first().unwrap().params[0] == 0.0 && r.records.last().unwrap().params[0] == 0.7;
    let ok = covers && (m.grid_min_location - 0.3).abs() <= MINIMIZER_TOL;
    check(
        ok,
        format!(
            "argmin lambda_1 in [0, 0.7] = {} (target 0.3 +- {MINIMIZER_TOL})",
            m.grid_min_location
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let s = random_disjoint_scenario(&mut rng);
        let d = disjoint_decomposition(&s).unwrap();
        worst = worst.max((d.total - scenario_sjsd(&s)).abs());
    }
    let fam = EpsilonFamily::new(0.3).unwrap();
    let corner = disjoint_decomposition(&fam.disjoint_scenario(Weight::ONE, Weight::ZERO))
        .unwrap()
        .total;
    let corner_err = (corner - LN_2).abs();
    let (a, b, _) = fam.disjoint_triple();
    let js = sym_js(&a, &b).unwrap();
    let mut diag_err = 0.0f64;
    for k in 0..=100 {
        let l = k as f64 / 100.0;
        let d = disjoint_decomposition(&fam.disjoint_scenario(w(l), w(l))).unwrap();
        diag_err = diag_err.max((d.total - l * js).abs());
    }
    let ok = worst < IDENTITY_TOL && corner_err < IDENTITY_TOL && diag_err < IDENTITY_TOL;
    check(
        ok,
        format!("max identity error {worst:.2e} over 1e4; (1,0) corner error {corner_err:.2e}; diagonal error {diag_err:.2e}"),
    )
}

fn ray_value(s: &MixtureScenario, alpha: f64, l: f64) -> f64 {
    let l2 = (alpha * l).min(1.0);
    scenario_sjsd(&s.with_lambdas(w(l), w(l2)))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut grid_drop, mut min_deriv, mut fd_err) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for _ in 0..1000 {
        let s = random_scenario(&mut rng);
        let alpha = 10f64.powf(rng.random_range(-1.0..=1.0));
        let end = 1.0f64.min(1.0 / alpha);
        let values: Vec<f64> = (0..=200)
            .map(|k| ray_value(&s, alpha, (end * k as f64 / 200.0).min(end)))
            .collect();
        for pair in values.windows(2) {
            grid_drop = grid_drop.max(pair[0] - pair[1]);
        }
        for _ in 0..5 {
            let l = end * rng.random_range(0.01..0.99);
            let analytic = ray_sjsd_derivative(&s, RaySpec::new(alpha, l).unwrap()).unwrap();
            let fd = finite_difference(|x| Ok(ray_value(&s, alpha, x)), l, FD_STEP).unwrap();
            min_deriv = min_deriv.min(analytic);
            fd_err = fd_err.max((analytic - fd).abs());
        }
    }
    let ok = grid_drop <= SLACK && min_deriv >= -SLACK && fd_err < FD_TOL;
    check(
        ok,
        format!("max grid drop {grid_drop:.2e}; min derivative {min_deriv:.2e}; max |analytic - fd| {fd_err:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ab = Arc::new(Alphabet::indexed(6).unwrap());
    let (mut grid_drop, mut min_deriv, mut fd_err) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for _ in 0..1000 {
        let pt = random_pmf(&mut rng, &ab);
        let q = random_pmf(&mut rng, &ab);
        let lambda = rng.random_range(0.01..0.99);
        let s =
            MixtureScenario::new(pt.clone(), pt.clone(), q.clone(), w(lambda), w(lambda)).unwrap();
        let room = 1.0 - lambda;
        let at = |d: f64| scenario_sjsd(&s.with_lambdas(w(lambda), w((lambda + d).min(1.0))));
        let values: Vec<f64> = (0..=200).map(|k| at(room * k as f64 / 200.0)).collect();
        for pair in values.windows(2) {
            grid_drop = grid_drop.max(pair[0] - pair[1]);
        }
        let d = room * rng.random_range(0.01..0.99);
        let analytic = delta_sjsd_derivative(&pt, &q, DeltaSpec::new(lambda, d).unwrap()).unwrap();
        let fd = finite_difference(|x| Ok(at(x)), d, FD_STEP).unwrap();
        min_deriv = min_deriv.min(analytic);
        fd_err = fd_err.max((analytic - fd).abs());
    }
    let ok = grid_drop <= SLACK && min_deriv >= -SLACK && fd_err < FD_TOL;
    check(
        ok,
        format!("max grid drop {grid_drop:.2e}; min derivative {min_deriv:.2e}; max |analytic - fd| {fd_err:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ab = Arc::new(Alphabet::indexed(6).unwrap());
    let mut fd_err = 0.0f64;
    for _ in 0..1000 {
        let a = random_pmf(&mut rng, &ab);
        let b = random_pmf(&mut rng, &ab);
        let l = rng.random_range(0.01..0.99);
        let analytic = entropy_derivative(&a, &b, w(l)).unwrap();
        let segment = |x: f64| {
            let m = a
                .mass()
                .iter()
                .zip(b.mass())
                .map(|(p, q)| x * p + (1.0 - x) * q)
                .collect();
            Ok(entropy(&Pmf::new(ab.clone(), m).unwrap()))
        };
        let fd = finite_difference(segment, l, FD_STEP).unwrap();
        fd_err = fd_err.max((analytic - fd).abs());
    }
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut convex_failures = 0;
    for _ in 0..1000 {
        let lam = w(rng.random::<f64>());
        let q_val = 1.0 - rng.random::<f64>();
        if !check_rlog_convexity(lam, q_val, &grid).unwrap() {
            convex_failures += 1;
        }
    }
    check(
        fd_err < FD_TOL && convex_failures == 0,
        format!("max entropy-derivative fd error {fd_err:.2e}; convexity failures {convex_failures}/1000"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..1000 {
        let ab = Arc::new(Alphabet::indexed(rng.random_range(2..8)).unwrap());
        let p = ClassificationProblem::new(
            w(rng.random::<f64>()),
            random_pmf(&mut rng, &ab),
            random_pmf(&mut rng, &ab),
        )
        .unwrap();
        let (lo, up) = js_error_bounds(&p);
        let e = bayes_error_exact(&p);
        if !(lo <= e + 1e-12 && e <= up + 1e-12) {
            violations += 1;
        }
    }
    let disjoint = ClassificationProblem::new(
        Weight::HALF,
        Pmf::from_masses(vec![0.6, 0.4, 0.0, 0.0]).unwrap(),
        Pmf::from_masses(vec![0.0, 0.0, 0.3, 0.7]).unwrap(),
    )
    .unwrap();
    let (lo, up) = js_error_bounds(&disjoint);
    let e = bayes_error_exact(&disjoint);
    let zero = lo.abs() < 1e-12 && up.abs() < 1e-12 && e == 0.0;
    check(
        violations == 0 && zero,
        format!("bits convention: {violations}/1000 bracketing violations; disjoint case ({lo:.1e}, {e}, {up:.1e})"),
    )
}

fn criterion_10() -> Outcome {
    let s = EpsilonFamily::new(0.3).unwrap().scenario(w(0.3), w(0.7));
    let cfg = UrnGameConfig::new(s, Weight::HALF, 1_000_000, 20_240_601).unwrap();
    let (first, elapsed) = timed(|| simulate_urn_game(&cfg).unwrap());
    let second = simulate_urn_game(&cfg).unwrap();
    let exact = bayes_error_exact(&cfg.problem());
    let z = (first.empirical_error - exact).abs() / first.stderr;
    let identical = serde_json::to_vec(&first).unwrap() == serde_json::to_vec(&second).unwrap();
    check(
        z <= 3.0 && identical && elapsed < Duration::from_secs(5),
        format!(
            "empirical {} vs exact {exact:.6} ({z:.2} stderr); rerun identical: {identical}; {elapsed:?}",
            first.empirical_error
        ),
    )
}

fn criterion_11() -> Outcome {
    let (out, elapsed) = timed(|| {
        Command::new(env!("CARGO_BIN_EXE_mixjsd"))
            .args(["verify", "--seed", "11"])
            .output()
            .expect("mixjsd runs")
    });
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let code = out.status.code();
    check(
        code == Some(0) && v["pass"] == true && elapsed < Duration::from_secs(60),
        format!("exit {code:?}, pass = {}, {elapsed:?}", v["pass"]),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 minimizer lambda_2 | lambda_1 = 0.3", criterion_1),
        ("2 minimizer lambda_1 | lambda_2 = 0.7", criterion_2),
        ("3 epsilon compensation", criterion_3),
        ("4 gap compensation", criterion_4),
        ("5 disjoint-support decomposition", criterion_5),
        ("6 ray monotonicity", criterion_6),
        ("7 gap monotonicity", criterion_7),
        ("8 derivative kernel", criterion_8),
        ("9 error bound bracketing", criterion_9),
        ("10 urn game convergence", criterion_10),
        ("11 verify suite", criterion_11),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS  criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
