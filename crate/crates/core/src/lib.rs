//! Jensen-Shannon divergence between discrete mixtures that share a common
//! component.
//!
//! Two distributions `p1 = l1 pt1 + (1 - l1) q` and `p2 = l2 pt2 + (1 - l2) q`
//! are compared with the symmetric JS divergence (natural log, nats). The
//! crate provides:
//!
//! - [`pmf`]: PMFs, entropy, KL and JS divergence, binary entropy.
//! - [`mixture`]: the mixture scenario, its midpoint, the six-face epsilon
//!   family and the disjoint-support decomposition.
//! - [`calculus`]: analytic derivatives along rays and along the proportion
//!   gap, with finite-difference and convexity checks.
//! - [`bounds`]: exact Bayes error, JS error bounds, and a seeded urn game.
//! - [`sweep`], [`io`], [`verify`]: grid sweeps, CSV/JSON output and the
//!   randomized verification suite behind the `mixjsd` CLI.

pub mod bounds;
pub mod calculus;
pub mod error;
pub mod io;
pub mod mixture;
pub mod pmf;
pub mod sweep;
pub mod verify;

pub use bounds::{
    bayes_error_exact, bounds_report, js_error_bounds, js_error_bounds_in, simulate_urn_game,
    BoundsReport, ClassificationProblem, LogUnit, UrnGameConfig, UrnGameOutcome,
};
pub use calculus::{
    check_rlog_convexity, delta_sjsd_derivative, entropy_derivative, finite_difference,
    ray_sjsd_derivative, DeltaSpec, RaySpec,
};
pub use error::{Error, Result};
pub use mixture::{
    build_p1, build_p2, build_pm, build_pm_expanded, disjoint_decomposition, scenario_sjsd,
    supports_disjoint, DisjointDecomposition, EpsilonFamily, MixtureScenario,
};
pub use pmf::{
    binary_entropy, convex_combine, entropy, js_divergence, js_divergence_entropy_form,
    kl_divergence, support, sym_js, Alphabet, Label, Pmf, Weight,
};
pub use sweep::{
    delta_scan, epsilon_scan, find_grid_minimizer, line_eval, sweep_grid, Line, MinimizerReport,
    SweepResult,
};
pub use verify::{verify_observations, VerifyReport};
