//! Exhaustive, exact computations on short paths.
//!
//! [`three_step`] evaluates the law of the first coordinate after three steps in an
//! arbitrary cookie field, once from closed-form sums over the relevant sites and
//! once by brute force over all `(2d)^3` paths. [`expansion`] enumerates the
//! expansion coefficients of the velocity and the truncated velocity series.

pub mod expansion;
pub mod three_step;

pub use expansion::{
    delta_weight, expansion_coefficient, partial_speed, CoefficientEntry, ExpansionCoefficient, PartialSpeed, TermSummary,
};
pub use three_step::{
    brute_force_three_step, monotonicity_in_cookie, three_step_distribution, three_step_law, three_step_law_brute_force,
    three_step_paths, CookieMonotonicity, Drifts, ThreeStepLaw, Weight,
};
