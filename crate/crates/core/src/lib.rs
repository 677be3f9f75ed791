//! Excited random walk with opposing drifts (ERWD).
//!
//! The walk steps with drift `beta/d` along the first axis whenever it stands on a
//! site it has never visited before, and with drift `-mu/d` on every later visit.
//! This crate provides
//!
//! * seeded simulation of the walk ([`model`]),
//! * exact enumeration of short-time laws and of the expansion coefficients of the
//!   velocity ([`enumeration`]),
//! * the monotone cookie-replacement coupling ([`coupling`]),
//! * simple-random-walk Green's function convolution powers by two independent
//!   methods ([`greens`]),
//! * the closed-form expansion bounds and the certificates derived from them
//!   ([`bounds`]),
//! * Monte Carlo velocity estimation, phase sweeps and stochastic bisection for the
//!   zero-speed curve ([`estimator`]).
//!
//! Monte Carlo loops run on rayon when the default `parallel` feature is enabled and
//! fall back to plain iterators otherwise. Results are bit-identical either way.

pub mod bounds;
pub mod coupling;
pub mod enumeration;
pub mod error;
pub mod estimator;
pub mod greens;
pub mod model;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
pub use model::{CookieField, LatticePoint, StepDistribution, Trajectory, WalkParams};
