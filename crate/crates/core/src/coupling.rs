//! Cookie-replacement coupling of the walk with an i.i.d. block walk.
//!
//! `omega` is the walk itself. `nu` is a sum of independent three-step blocks, each
//! distributed as the first three steps of the walk in a field where every cookie is
//! present. For every cookie field the law of a three-step block of `omega` is
//! stochastically smaller than that of `nu`, so drawing both first coordinates from
//! one uniform by inverse transform gives `nu_block >= omega_block` block by block.
//!
//! A uniform that falls within `1e-9` of a breakpoint of either distribution function
//! is resolved in exact rational arithmetic, so the ordering holds exactly rather than
//! up to rounding. The three steps of `omega` are then chosen among the paths with the
//! drawn displacement, proportionally to their probability, using a second uniform.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::RngCore;
use serde::Serialize;

use crate::enumeration::{three_step_law, Drifts, Weight};
use crate::error::{Error, Result};
use crate::model::{CookieField, Direction, LatticePoint, Trajectory, WalkParams};
use crate::rng::{stream_rng, unit_f64};

const TIE_WINDOW: f64 = 1e-9;
const MAX_BLOCKS: usize = 1 << 28;

/// One coupled realization of `omega` and `nu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledPair {
    pub params: WalkParams,
    /// `3 * n_blocks` steps of the walk.
    pub omega_path: Trajectory,
    /// First-coordinate increments of the `nu` blocks.
    pub nu_blocks: Vec<i8>,
    pub coupling_seed: u64,
    /// Blocks whose displacements were decided in exact arithmetic.
    pub exact_draws: usize,
}

impl CoupledPair {
    pub fn n_blocks(&self) -> usize {
        self.nu_blocks.len()
    }

    /// `omega^{[1]}_{3n} - omega^{[1]}_{3(n-1)}` for each block.
    pub fn omega_blocks(&self) -> Vec<i64> {
        let path = self.omega_path.first_coord_path();
        (0..self.n_blocks()).map(|n| path[3 * n + 3] - path[3 * n]).collect()
    }

    /// `nu^{[1]}_{3n} - omega^{[1]}_{3n}` for `n = 0..=n_blocks`.
    pub fn gaps(&self) -> Vec<i64> {
        let omega = self.omega_path.first_coord_path();
        let mut nu = 0i64;
        let mut out = Vec::with_capacity(self.nu_blocks.len() + 1);
        out.push(0);
        for (n, &x) in self.nu_blocks.iter().enumerate() {
            nu += i64::from(x);
            out.push(nu - omega[3 * (n + 1)]);
        }
        out
    }

    /// The gap sequence is nonnegative and nondecreasing.
    pub fn is_dominated(&self) -> bool {
        let gaps = self.gaps();
        gaps.iter().all(|&g| g >= 0) && gaps.windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, Copy)]
struct PathShape {
    dirs: [Direction; 3],
    /// Ball indices of the sites before the second and third step.
    sites: [usize; 2],
    jump: i8,
}

/// Every three-step path, with sites indexed into the radius-2 ball around the start.
#[derive(Debug, Clone)]
struct PathTemplate {
    ball: Vec<LatticePoint>,
    origin: usize,
    paths: Vec<PathShape>,
}

impl PathTemplate {
    fn new(d: usize) -> Self {
        let ball = LatticePoint::ball(d, 2);
        let index: HashMap<LatticePoint, usize> = ball.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let origin_point = LatticePoint::origin(d);
        let mut paths = Vec::with_capacity((2 * d).pow(3));
        for s0 in Direction::all(d) {
            let x1 = origin_point.step(s0);
            for s1 in Direction::all(d) {
                let x2 = x1.step(s1);
                for s2 in Direction::all(d) {
                    let jump = (s0.first_component() + s1.first_component() + s2.first_component()) as i8;
                    paths.push(PathShape { dirs: [s0, s1, s2], sites: [index[&x1], index[&x2]], jump });
                }
            }
        }
        PathTemplate { origin: index[&origin_point], ball, paths }
    }

    /// Unnormalized path weights (numerator products; they sum to `(2d)^3`).
    fn weights<W: Weight>(&self, drifts: &Drifts<W>, cookies: &[bool]) -> Vec<W> {
        self.paths
            .iter()
            .map(|p| {
                let [i1, i2] = p.sites;
                let c0 = cookies[self.origin];
                let c1 = i1 != self.origin && cookies[i1];
                let c2 = i2 != self.origin && i2 != i1 && cookies[i2];
                drifts.numerator(c0, p.dirs[0]) * drifts.numerator(c1, p.dirs[1]) * drifts.numerator(c2, p.dirs[2])
            })
            .collect()
    }

    fn cdf<W: Weight>(&self, weights: &[W]) -> [W; 7] {
        let mut probs: [W; 7] = std::array::from_fn(|_| W::zero());
        for (p, w) in self.paths.iter().zip(weights) {
            let slot = &mut probs[(p.jump + 3) as usize];
            *slot = slot.clone() + w.clone();
        }
        let mut acc = W::zero();
        probs.map(|w| {
            acc = acc.clone() + w;
            acc.clone()
        })
    }
}

/// Smallest `k` with `u < F(k)`, as a displacement in `-3..=3`.
fn quantile<W: PartialOrd>(cdf: &[W; 7], u: &W) -> i8 {
    cdf.iter().position(|f| u < f).unwrap_or(6) as i8 - 3
}

fn near_breakpoint(cdf: &[f64; 7], u: f64) -> bool {
    cdf[..6].iter().any(|&f| (u - f).abs() < TIE_WINDOW)
}

/// Runs `n_blocks` coupled blocks from a fresh environment.
pub fn run_coupled(params: &WalkParams, n_blocks: usize, seed: u64) -> Result<CoupledPair> {
    let d = params.d();
    if d < 2 {
        return Err(Error::domain("the coupling needs d >= 2"));
    }
    if n_blocks > MAX_BLOCKS {
        return Err(Error::Resource(format!("{n_blocks} blocks exceeds the limit of {MAX_BLOCKS}")));
    }
    let template = PathTemplate::new(d);
    let drifts = Drifts::<f64>::from(params);
    let exact = Drifts::exact_from(params);
    let norm = (2 * d).pow(3) as f64;
    let norm_exact = BigRational::from_integer(BigInt::from((2 * d).pow(3)));

    let full = vec![true; template.ball.len()];
    let nu_cdf = template.cdf(&template.weights(&drifts, &full)).map(|f| f / norm);
    let nu_cdf_exact = template.cdf(&template.weights(&exact, &full)).map(|f| f / norm_exact.clone());

    let mut rng = stream_rng(seed, 0);
    let mut field = CookieField::new();
    let mut pos = LatticePoint::origin(d);
    let mut steps = Vec::with_capacity(3 * n_blocks);
    let mut nu_blocks = Vec::with_capacity(n_blocks);
    let mut exact_draws = 0;
    let mut cookies = vec![true; template.ball.len()];

    for _ in 0..n_blocks {
        let u_bits = rng.next_u64();
        let v = unit_f64(rng.next_u64());
        let u = unit_f64(u_bits);
        for (c, offset) in cookies.iter_mut().zip(&template.ball) {
            *c = field.has_cookie(&pos.offset(offset));
        }
        let weights = template.weights(&drifts, &cookies);
        let omega_cdf = template.cdf(&weights).map(|f| f / norm);

        let (omega_jump, nu_jump) = if near_breakpoint(&omega_cdf, u) || near_breakpoint(&nu_cdf, u) {
            exact_draws += 1;
            let u_exact = BigRational::new(BigInt::from(u_bits >> 11), BigInt::from(1u64 << 53));
            let omega_exact = template.cdf(&template.weights(&exact, &cookies)).map(|f| f / norm_exact.clone());
            (quantile(&omega_exact, &u_exact), quantile(&nu_cdf_exact, &u_exact))
        } else {
            (quantile(&omega_cdf, &u), quantile(&nu_cdf, &u))
        };

        let candidates: Vec<usize> =
            (0..template.paths.len()).filter(|&i| template.paths[i].jump == omega_jump && weights[i] > 0.0).collect();
        let total: f64 = candidates.iter().map(|&i| weights[i]).sum();
        let target = v * total;
        let mut acc = 0.0;
        let mut chosen = *candidates.last().expect("the drawn displacement has positive probability");
        for &i in &candidates {
            acc += weights[i];
            if target < acc {
                chosen = i;
                break;
            }
        }
        for dir in template.paths[chosen].dirs {
            field.eat(&pos);
            pos = pos.step(dir);
            steps.push(dir);
        }
        nu_blocks.push(nu_jump);
    }

    Ok(CoupledPair {
        params: *params,
        omega_path: Trajectory::from_steps(d, steps),
        nu_blocks,
        coupling_seed: seed,
        exact_draws,
    })
}

/// Mean first coordinate of three steps with every cookie present.
pub fn full_cookie_mean(d: usize, beta: f64, mu: f64) -> Result<f64> {
    let params = WalkParams::new(d, beta, mu)?;
    Ok(*three_step_law(&Drifts::from(&params), &CookieField::new())?.mean())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaStar {
    pub d: usize,
    pub mu: f64,
    /// Every `beta <= beta_star` has full-cookie block mean at most `-delta`.
    pub beta_star: f64,
    pub delta: f64,
    /// Block mean at `beta = 0`, `-4 d mu / (2d)^3`.
    pub mean_at_zero: f64,
}

/// Largest `beta` (to bisection precision) at which the full-cookie block mean is
/// still at most `-delta`, with `delta` half the magnitude of the mean at `beta = 0`.
pub fn beta_star_bound(d: usize, mu: f64) -> Result<BetaStar> {
    if d < 2 {
        return Err(Error::domain("beta_star_bound needs d >= 2"));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("mu must lie in (0, 1]: without reverse drift there is no negative regime (got {mu})")));
    }
    let mean = |beta: f64| full_cookie_mean(d, beta, mu);
    let mean_at_zero = mean(0.0)?;
    let delta = 0.5 * mean_at_zero.abs();
    let ok = |beta: f64| mean(beta).map(|m| m <= -delta);
    if ok(1.0)? {
        return Ok(BetaStar { d, mu, beta_star: 1.0, delta, mean_at_zero });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BetaStar { d, mu, beta_star: lo, delta, mean_at_zero })
}
