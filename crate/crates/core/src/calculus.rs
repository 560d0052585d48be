//! Analytic derivatives of entropy and of the symmetric JS divergence along
//! the two monotone directions (rays through the origin, and the gap
//! between equal-component proportions), plus the numeric tools used to
//! check them.

use crate::error::{Error, Result};
use crate::mixture::MixtureScenario;
use crate::pmf::{blend, Pmf, Weight};

/// A point on the ray `(l1, l2) = (lambda, alpha * lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySpec {
    alpha: f64,
    lambda: f64,
}

impl RaySpec {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidRay(format!("slope {alpha} must be positive")));
        }
        let end = Self::end_for(alpha);
        if !(0.0..=end).contains(&lambda) {
            return Err(Error::InvalidRay(format!(
                "lambda {lambda} outside [0, {end}] for slope {alpha}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    /// Largest `lambda` keeping both proportions in `[0, 1]`.
    pub fn end_for(alpha: f64) -> f64 {
        1.0f64.min(1.0 / alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn end(&self) -> f64 {
        Self::end_for(self.alpha)
    }

    /// `(l1, l2)` on the ray; `l2` is clamped to 1 against roundoff in `alpha * (1/alpha)`.
    pub fn lambdas(&self) -> (Weight, Weight) {
        let l2 = (self.alpha * self.lambda).min(1.0);
        (Weight(self.lambda), Weight(l2))
    }
}

/// Interior point `(l1, l2) = (lambda_min, lambda_min + delta_lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSpec {
    lambda_min: f64,
    delta_lambda: f64,
}

impl DeltaSpec {
    pub fn new(lambda_min: f64, delta_lambda: f64) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_min < 1.0) {
            return Err(Error::InvalidDelta(format!(
                "lambda {lambda_min} outside (0, 1)"
            )));
        }
        if !(0.0..=1.0 - lambda_min).contains(&delta_lambda) {
            return Err(Error::InvalidDelta(format!(
                "delta {delta_lambda} outside [0, {}]",
                1.0 - lambda_min
            )));
        }
        Ok(Self {
            lambda_min,
            delta_lambda,
        })
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn delta_lambda(&self) -> f64 {
        self.delta_lambda
    }
}

/// `d/dl H(l a + (1 - l) b) = -sum (a - b)(1 + ln r)` over `r > 0`.
pub fn entropy_derivative(a: &Pmf, b: &Pmf, lambda: Weight) -> Result<f64> {
    a.check_alphabet(b)?;
    let r = blend(a.mass(), b.mass(), lambda.get());
    let mut acc = 0.0;
    for (index, ((&ra, &rb), &rx)) in a.mass().iter().zip(b.mass()).zip(&r).enumerate() {
        let slope = ra - rb;
        if rx > 0.0 {
            acc -= slope * (1.0 + rx.ln());
        } else if slope != 0.0 {
            return Err(Error::UnboundedDerivative { index });
        }
    }
    Ok(acc)
}

/// `sum coeff * ln p`, skipping zero coefficients; a zero `p` under a nonzero
/// coefficient makes the derivative unbounded.
fn weighted_log_sum(coeff: &[f64], p: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (index, (&c, &px)) in coeff.iter().zip(p).enumerate() {
        if c == 0.0 {
            continue;
        }
        if px <= 0.0 {
            return Err(Error::UnboundedDerivative { index });
        }
        acc += c * px.ln();
    }
    Ok(acc)
}

/// Analytic `d/d lambda` of the symmetric JS divergence along
/// `(l1, l2) = (lambda, alpha lambda)`, using the components of `template`.
///
/// Only defined strictly inside the ray.
pub fn ray_sjsd_derivative(template: &MixtureScenario, ray: RaySpec) -> Result<f64> {
    let (lambda, alpha) = (ray.lambda(), ray.alpha());
    if !(lambda > 0.0 && lambda < ray.end()) {
        return Err(Error::InvalidRay(format!(
            "derivative needs lambda strictly inside (0, {})",
            ray.end()
        )));
    }
    let (l1, l2) = ray.lambdas();
    let s = template.with_lambdas(l1, l2);
    let (pt1, pt2, q) = (s.p_tilde_1().mass(), s.p_tilde_2().mass(), s.q().mass());
    let p1 = s.p1_mass();
    let p2 = s.p2_mass();
    let pm = blend(&p1, &p2, 0.5);

    let d1: Vec<f64> = pt1.iter().zip(q).map(|(&a, &c)| a - c).collect();
    let d2: Vec<f64> = pt2
        .iter()
        .zip(q)
        .map(|(&b, &c)| alpha * b - alpha * c)
        .collect();
    let dm: Vec<f64> = pt1
        .iter()
        .zip(pt2)
        .zip(q)
        .map(|((&a, &b), &c)| a / 2.0 + alpha * b / 2.0 - (1.0 + alpha) / 2.0 * c)
        .collect();

    // This is minus the derivative; every symbol's contribution is <= 0.
    let neg = weighted_log_sum(&dm, &pm)?
        - 0.5 * weighted_log_sum(&d1, &p1)?
        - 0.5 * weighted_log_sum(&d2, &p2)?;
    Ok(-neg)
}

/// Analytic `d/d(delta)` of the symmetric JS divergence when both mixtures
/// share the distinguishing component `p_tilde`, with `l1 = lambda_min` and
/// `l2 = lambda_min + delta`:
/// `sum (pt - q)/2 * ln(1 + delta/2 * (pt - q) / p_M)`.
pub fn delta_sjsd_derivative(p_tilde: &Pmf, q: &Pmf, spec: DeltaSpec) -> Result<f64> {
    p_tilde.check_alphabet(q)?;
    let half_gap = spec.delta_lambda() / 2.0;
    let wm = spec.lambda_min() + half_gap;
    let mut acc = 0.0;
    for (index, (&pt, &qx)) in p_tilde.mass().iter().zip(q.mass()).enumerate() {
        let diff = pt - qx;
        if diff == 0.0 {
            continue;
        }
        let pm = wm * pt + (1.0 - wm) * qx;
        if pm <= 0.0 {
            return Err(Error::UnboundedDerivative { index });
        }
        let arg = 1.0 + half_gap * diff / pm;
        if arg <= 0.0 {
            return Err(Error::UnboundedDerivative { index });
        }
        acc += diff / 2.0 * arg.ln();
    }
    Ok(acc)
}

/// Numerically checks convexity of `r -> r ln(lambda r + q_val)` over an
/// ascending grid: every second difference must be `>= -1e-12`.
///
/// On non-uniform grids the second difference is the slope increment scaled
/// by the mean spacing, which reduces to `f0 - 2 f1 + f2` on uniform grids.
pub fn check_rlog_convexity(lambda: Weight, q_val: f64, r_grid: &[f64]) -> Result<bool> {
    if r_grid.len() < 3 {
        return Err(Error::GridTooShort(r_grid.len()));
    }
    if !(q_val >= 0.0 && q_val.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "q value {q_val} must be nonnegative"
        )));
    }
    if r_grid.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument(
            "grid values must be nonnegative".into(),
        ));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "grid must be strictly ascending".into(),
        ));
    }
    let f = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let arg = lambda.get() * r + q_val;
        if arg <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lambda * r + q is not positive at r = {r}"
            )));
        }
        Ok(r * arg.ln())
    };
    let values = r_grid.iter().map(|&r| f(r)).collect::<Result<Vec<_>>>()?;
    let convex = r_grid.windows(3).zip(values.windows(3)).all(|(r, v)| {
        let left = (v[1] - v[0]) / (r[1] - r[0]);
        let right = (v[2] - v[1]) / (r[2] - r[1]);
        (right - left) * (r[2] - r[0]) / 2.0 >= -1e-12
    });
    Ok(convex)
}

/// Central difference `(f(x + h) - f(x - h)) / 2h`.
pub fn finite_difference<F>(mut f: F, x: f64, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step {step} must be positive"
        )));
    }
    let hi = f(x + step)?;
    let lo = f(x - step)?;
    Ok((hi - lo) / (2.0 * step))
}
