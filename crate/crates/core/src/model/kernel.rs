use serde::Serialize;

use super::lattice::Direction;
use super::params::WalkParams;

/// Law of one step: probability of each of the `2d` displacements, indexed by
/// [`Direction`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDistribution {
    probs: Vec<f64>,
}

impl StepDistribution {
    pub fn prob(&self, dir: Direction) -> f64 {
        self.probs[usize::from(dir.0)]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, &p)| (Direction(i as u16), p))
    }

    /// Expected first-coordinate increment.
    pub fn mean_first(&self) -> f64 {
        self.probs[0] - self.probs[1]
    }

    /// Inverse-transform draw for `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Direction {
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Direction(i as u16);
            }
        }
        // u landed in the rounding gap at the top of the last bin
        let last = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Direction(last as u16)
    }
}

/// Step law at a site with (`has_cookie = true`) or without its cookie:
/// `p(x) = (1 + (e1 . x) * drift) / (2d)` with `drift = beta` or `-mu`.
pub fn step_distribution(params: &WalkParams, has_cookie: bool) -> StepDistribution {
    let two_d = 2.0 * params.d() as f64;
    let drift = params.drift(has_cookie);
    let probs = Direction::all(params.d())
        .map(|dir| (1.0 + f64::from(dir.first_component()) * drift) / two_d)
        .collect();
    StepDistribution { probs }
}

/// Precomputed inverse-transform thresholds for the simulation hot loop.
///
/// A uniform `u` below `plus[c]` is a `+e1` step, below `1/d` a `-e1` step, and
/// anything above selects one of the `2d - 2` perpendicular directions uniformly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FastKernel {
    plus: [f64; 2],
    axis_mass: f64,
    perp_scale: f64,
    n_perp: u16,
}

impl FastKernel {
    pub(crate) fn new(params: &WalkParams) -> Self {
        let d = params.d() as f64;
        let two_d = 2.0 * d;
        FastKernel {
            plus: [(1.0 - params.mu()) / two_d, (1.0 + params.beta()) / two_d],
            axis_mass: 1.0 / d,
            perp_scale: two_d,
            n_perp: (2 * params.d() - 2) as u16,
        }
    }

    #[inline(always)]
    pub(crate) fn draw(&self, has_cookie: bool, u: f64) -> Direction {
        if u < self.plus[usize::from(has_cookie)] {
            Direction::PLUS_E1
        } else if u < self.axis_mass {
            Direction::MINUS_E1
        } else {
            let k = ((u - self.axis_mass) * self.perp_scale) as u16;
            Direction(2 + k.min(self.n_perp - 1))
        }
    }
}
