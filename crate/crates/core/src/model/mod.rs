//! The walk itself: parameters, lattice sites, cookie fields, the step kernel and
//! seeded trajectory sampling.

mod cookie;
mod kernel;
mod lattice;
mod params;
mod visited;
mod walk;

pub use cookie::CookieField;
pub use kernel::{step_distribution, StepDistribution};
pub use lattice::{Direction, LatticePoint};
pub use params::WalkParams;
pub use walk::{endpoint_first_coord, run_walk, sample_step, Trajectory, Walker};

