//! Monte Carlo estimation of the velocity's first coordinate.
//!
//! Every estimate averages the endpoint `omega_n^{[1]} / n` over independent walks.
//! Walk `i` of an estimate with seed `s` draws from ChaCha8 stream `i` of `s`, and
//! sums are accumulated exactly in integers, so results do not depend on how the
//! walks are scheduled.

mod root;
mod sweep;
mod velocity;

pub use root::{find_beta0, find_beta0_with, RootBudget, RootResult, RootStatus};
pub use sweep::{phase_sweep, phase_sweep_with, uniform_grid, GridRow, PhaseGrid, RowShape};
pub use velocity::{
    endpoint_samples, estimate_velocity, estimate_velocity_with, summarize, EstimatorConfig, SignVerdict,
    VelocityEstimate, DEFAULT_Z,
};
