//! Grid and line evaluations of the symmetric JS divergence over mixture
//! proportions and over the epsilon family, and grid argmin extraction.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::{scenario_sjsd, EpsilonFamily, MixtureScenario};
use crate::pmf::Weight;

/// 201 points per axis, step 0.005.
pub const DEFAULT_RESOLUTION: usize = 200;

pub const LAMBDA_1: &str = "lambda_1";
pub const LAMBDA_2: &str = "lambda_2";
pub const EPSILON: &str = "epsilon";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub params: Vec<f64>,
    pub sjsd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub kind: String,
    pub scenario: String,
    pub resolution: usize,
    pub fixed: BTreeMap<String, f64>,
    pub tool_version: String,
}

/// Evaluations on a grid, stored row-major by the first axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis_names: Vec<String>,
    pub records: Vec<SweepRecord>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axis_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }
}

fn metadata(kind: &str, scenario: &str, resolution: usize, fixed: &[(&str, f64)]) -> SweepMetadata {
    SweepMetadata {
        kind: kind.to_string(),
        scenario: scenario.to_string(),
        resolution,
        fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution {n} must be at least 2"
        )));
    }
    Ok(())
}

/// `i / n` for `i = 0..=n`; exact at both endpoints.
fn unit_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..=n).map(move |i| i as f64 / n as f64)
}

/// Weight from a grid point that may overshoot 1 by roundoff.
fn weight(x: f64) -> Weight {
    Weight(x.clamp(0.0, 1.0))
}

/// Symmetric JS divergence on the `(n+1) x (n+1)` grid over `[0,1]^2`.
pub fn sweep_grid(template: &MixtureScenario, label: &str, n: usize) -> Result<SweepResult> {
    check_resolution(n)?;
    let rows: Vec<Vec<SweepRecord>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let l1 = i as f64 / n as f64;
            unit_grid(n)
                .map(|l2| SweepRecord {
                    params: vec![l1, l2],
                    sjsd: scenario_sjsd(&template.with_lambdas(weight(l1), weight(l2))),
                })
                .collect()
        })
        .collect();
    Ok(SweepResult {
        axis_names: vec![LAMBDA_1.into(), LAMBDA_2.into()],
        records: rows.into_iter().flatten().collect(),
        metadata: metadata("grid", label, n, &[]),
    })
}

/// Which one-dimensional slice of the `(l1, l2)` square to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Line {
    FixedLambda1(Weight),
    FixedLambda2(Weight),
    Diagonal,
}

impl Line {
    /// Parses `lambda_1`, `lambda_2` (with a value) or `diagonal`.
    pub fn parse(name: &str, value: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>| -> Result<Weight> {
            let v =
                v.ok_or_else(|| Error::InvalidArgument(format!("line `{name}` needs a value")))?;
            Weight::new(v)
        };
        match name {
            LAMBDA_1 => Ok(Line::FixedLambda1(need(value)?)),
            LAMBDA_2 => Ok(Line::FixedLambda2(need(value)?)),
            "diagonal" => Ok(Line::Diagonal),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }

    pub fn free_axis(&self) -> &'static str {
        match self {
            Line::FixedLambda1(_) => LAMBDA_2,
            Line::FixedLambda2(_) | Line::Diagonal => LAMBDA_1,
        }
    }

    fn point(&self, t: f64) -> (f64, f64) {
        match *self {
            Line::FixedLambda1(l1) => (l1.get(), t),
            Line::FixedLambda2(l2) => (t, l2.get()),
            Line::Diagonal => (t, t),
        }
    }
}

fn line_records(template: &MixtureScenario, points: Vec<(f64, f64)>) -> Vec<SweepRecord> {
    points
        .into_par_iter()
        .map(|(l1, l2)| SweepRecord {
            params: vec![l1, l2],
            sjsd: scenario_sjsd(&template.with_lambdas(weight(l1), weight(l2))),
        })
        .collect()
}

/// One-dimensional slice on a uniform grid of `n + 1` points over `[0, 1]`.
pub fn line_eval(
    template: &MixtureScenario,
    label: &str,
    line: Line,
    n: usize,
) -> Result<SweepResult> {
    check_resolution(n)?;
    let points = unit_grid(n).map(|t| line.point(t)).collect();
    let fixed: Vec<(&str, f64)> = match line {
        Line::FixedLambda1(w) => vec![(LAMBDA_1, w.get())],
        Line::FixedLambda2(w) => vec![(LAMBDA_2, w.get())],
        Line::Diagonal => vec![],
    };
    let kind = match line {
        Line::Diagonal => "line:diagonal".to_string(),
        _ => format!("line:{}", line.free_axis()),
    };
    Ok(SweepResult {
        axis_names: vec![LAMBDA_1.into(), LAMBDA_2.into()],
        records: line_records(template, points),
        metadata: metadata(&kind, label, n, &fixed),
    })
}

/// Symmetric JS divergence of the epsilon family at fixed proportions, for
/// `epsilon = i / n`.
pub fn epsilon_scan(lambda_1: Weight, lambda_2: Weight, n: usize) -> Result<SweepResult> {
    check_resolution(n)?;
    let records = unit_grid(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|eps| {
            let fam = EpsilonFamily::new(eps.min(1.0)).expect("grid point in [0, 1]");
            SweepRecord {
                params: vec![eps],
                sjsd: scenario_sjsd(&fam.scenario(lambda_1, lambda_2)),
            }
        })
        .collect();
    Ok(SweepResult {
        axis_names: vec![EPSILON.into()],
        records,
        metadata: metadata(
            "epsilon-scan",
            "six-face epsilon family",
            n,
            &[(LAMBDA_1, lambda_1.get()), (LAMBDA_2, lambda_2.get())],
        ),
    })
}

/// Slice at fixed `l2` with `l1 = l2 * i / n`, `i = 0..=n`, so that the
/// `l1 = l2` endpoint is on the grid.
pub fn delta_scan(
    template: &MixtureScenario,
    label: &str,
    lambda_2: Weight,
    n: usize,
) -> Result<SweepResult> {
    check_resolution(n)?;
    let l2 = lambda_2.get();
    let points = (0..=n)
        .map(|i| {
            if i == n {
                (l2, l2)
            } else {
                (l2 * i as f64 / n as f64, l2)
            }
        })
        .collect();
    Ok(SweepResult {
        axis_names: vec![LAMBDA_1.into(), LAMBDA_2.into()],
        records: line_records(template, points),
        metadata: metadata("delta-scan", label, n, &[(LAMBDA_2, l2)]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub fixed_params: BTreeMap<String, f64>,
    pub free_param: String,
    pub grid_min_location: f64,
    pub grid_min_value: f64,
    /// Spacing of the free-axis grid around the minimizer.
    pub resolution: f64,
}

/// Grid argmin along `free_axis`. Ties go to the smallest parameter value.
pub fn find_grid_minimizer(result: &SweepResult, free_axis: &str) -> Result<MinimizerReport> {
    let axis = result.axis_index(free_axis)?;
    let best = result
        .records
        .iter()
        .min_by(|a, b| {
            a.sjsd
                .total_cmp(&b.sjsd)
                .then(a.params[axis].total_cmp(&b.params[axis]))
        })
        .ok_or(Error::EmptySweep)?;
    let fixed_params = result
        .axis_names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != axis)
        .map(|(i, name)| (name.clone(), best.params[i]))
        .collect();

    let mut free: Vec<f64> = result.records.iter().map(|r| r.params[axis]).collect();
    free.sort_by(f64::total_cmp);
    free.dedup();
    let loc = best.params[axis];
    let resolution = free
        .windows(2)
        .filter(|w| w[0] == loc || w[1] == loc)
        .map(|w| w[1] - w[0])
        .fold(f64::NAN, f64::min);

    Ok(MinimizerReport {
        fixed_params,
        free_param: free_axis.to_string(),
        grid_min_location: loc,
        grid_min_value: best.sjsd,
        resolution: if resolution.is_nan() { 0.0 } else { resolution },
    })
}
