use std::collections::HashSet;

use rand::RngCore;
use serde::Serialize;

use super::cookie::CookieField;
use super::kernel::{step_distribution, FastKernel};
use super::lattice::{Direction, LatticePoint};
use super::params::WalkParams;
use super::visited::{PackedSet, SiteKey, BIAS, MAX_PACKED_STEPS};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, unit_f64};

/// Hard ceiling on a single trajectory; beyond it the step log alone needs tens of GB.
const MAX_TRAJECTORY_STEPS: usize = 1 << 32;

/// A sampled path started at the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    start: LatticePoint,
    steps: Vec<Direction>,
    /// `first_coord_path[i]` is the first coordinate after `i` steps.
    first_coord_path: Vec<i64>,
}

impl Trajectory {
    /// The path from the origin of `Z^d` taking `steps`.
    pub fn from_steps(d: usize, steps: Vec<Direction>) -> Self {
        let mut first_coord_path = Vec::with_capacity(steps.len() + 1);
        let mut x1 = 0i64;
        first_coord_path.push(0);
        for dir in &steps {
            x1 += i64::from(dir.first_component());
            first_coord_path.push(x1);
        }
        Trajectory { start: LatticePoint::origin(d), steps, first_coord_path }
    }

    pub fn start(&self) -> &LatticePoint {
        &self.start
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    pub fn first_coord_path(&self) -> &[i64] {
        &self.first_coord_path
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first_coord_end(&self) -> i64 {
        *self.first_coord_path.last().expect("path holds the start")
    }

    /// Sites `omega_0, ..., omega_n`.
    pub fn sites(&self) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for &dir in &self.steps {
            cur = cur.step(dir);
            out.push(cur.clone());
        }
        out
    }

    pub fn endpoint(&self) -> LatticePoint {
        self.steps.iter().fold(self.start.clone(), |p, &dir| p.step(dir))
    }
}

/// One step of the walk from `position` in environment `field`.
///
/// The cookie at the current site decides the kernel; the site is then marked as
/// visited. Consumes exactly one `u64` from `rng`, like every step of [`run_walk`].
pub fn sample_step<R: RngCore + ?Sized>(
    params: &WalkParams,
    field: &mut CookieField,
    position: &LatticePoint,
    rng: &mut R,
) -> LatticePoint {
    let has_cookie = field.eat(position);
    let dir = step_distribution(params, has_cookie).sample(unit_f64(rng.next_u64()));
    position.step(dir)
}

/// Samples an `n_steps`-step trajectory from stream 0 of `seed`.
pub fn run_walk(params: &WalkParams, n_steps: usize, seed: u64) -> Result<Trajectory> {
    let mut walker = Walker::new(*params, n_steps);
    let mut rng = stream_rng(seed, 0);
    walker.trajectory(n_steps, &mut rng)
}

/// First coordinate after `n_steps` steps of replica `stream` under `seed`.
pub fn endpoint_first_coord(params: &WalkParams, n_steps: usize, seed: u64, stream: u64) -> i64 {
    let mut walker = Walker::new(*params, n_steps);
    walker.endpoint_first_coord(n_steps, &mut stream_rng(seed, stream))
}

trait Lattice {
    type Site: Clone;
    fn origin(&self) -> Self::Site;
    fn advance(&self, site: &mut Self::Site, dir: Direction);
    fn first(&self, site: &Self::Site) -> i64;
    /// Marks `site` visited; `true` if its cookie was still there.
    fn eat(&mut self, site: &Self::Site) -> bool;
    fn reset(&mut self);
}

struct Packed<K: SiteKey> {
    origin: K,
    deltas: Vec<K>,
    visited: PackedSet<K>,
}

impl<K: SiteKey> Packed<K> {
    fn new(d: usize, expected: usize) -> Self {
        debug_assert!(d <= K::FIELDS);
        let deltas = Direction::all(d)
            .map(|dir| {
                let unit = K::unit(dir.axis());
                if dir.sign() > 0 {
                    unit
                } else {
                    unit.negate()
                }
            })
            .collect();
        Packed { origin: K::packed_origin(d), deltas, visited: PackedSet::with_capacity(expected) }
    }
}

impl<K: SiteKey> Lattice for Packed<K> {
    type Site = K;

    fn origin(&self) -> K {
        self.origin
    }

    #[inline(always)]
    fn advance(&self, site: &mut K, dir: Direction) {
        *site = site.wrapping_add(self.deltas[usize::from(dir.0)]);
    }

    #[inline(always)]
    fn first(&self, site: &K) -> i64 {
        site.low_field() - BIAS
    }

    #[inline(always)]
    fn eat(&mut self, site: &K) -> bool {
        self.visited.insert(*site)
    }

    fn reset(&mut self) {
        self.visited.clear();
    }
}

struct General {
    d: usize,
    visited: HashSet<Vec<i32>>,
}

impl Lattice for General {
    type Site = Vec<i32>;

    fn origin(&self) -> Vec<i32> {
        vec![0; self.d]
    }

    fn advance(&self, site: &mut Vec<i32>, dir: Direction) {
        site[dir.axis()] += dir.sign();
    }

    fn first(&self, site: &Vec<i32>) -> i64 {
        i64::from(site[0])
    }

    fn eat(&mut self, site: &Vec<i32>) -> bool {
        if self.visited.contains(site) {
            false
        } else {
            self.visited.insert(site.clone());
            true
        }
    }

    fn reset(&mut self) {
        self.visited.clear();
    }
}

enum Backend {
    Narrow(Packed<u64>),
    Wide(Packed<u128>),
    General(General),
}

/// Reusable simulation state for repeated walks with fixed parameters.
///
/// Sites are packed into `u64` keys for `d <= 4`, `u128` keys for `d <= 8`, and
/// stored as coordinate vectors otherwise or when a walk is long enough to leave
/// the 16-bit coordinate range.
pub struct Walker {
    params: WalkParams,
    kernel: FastKernel,
    backend: Backend,
    max_steps: usize,
}

impl Walker {
    /// `max_steps` sizes the visited set and selects the site encoding.
    pub fn new(params: WalkParams, max_steps: usize) -> Self {
        let d = params.d();
        let expected = max_steps.min(1 << 20);
        let backend = if (2..=u64::FIELDS).contains(&d) && max_steps <= MAX_PACKED_STEPS {
            Backend::Narrow(Packed::new(d, expected))
        } else if (2..=u128::FIELDS).contains(&d) && max_steps <= MAX_PACKED_STEPS {
            Backend::Wide(Packed::new(d, expected))
        } else {
            Backend::General(General { d, visited: HashSet::with_capacity(expected) })
        };
        Walker { params, kernel: FastKernel::new(&params), backend, max_steps }
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    fn drive<R: RngCore + ?Sized>(&mut self, n_steps: usize, rng: &mut R, mut record: impl FnMut(Direction)) -> i64 {
        if n_steps > self.max_steps {
            *self = Walker::new(self.params, n_steps);
        }
        let kernel = self.kernel;
        match &mut self.backend {
            Backend::Narrow(l) => drive(l, &kernel, n_steps, rng, &mut record),
            Backend::Wide(l) => drive(l, &kernel, n_steps, rng, &mut record),
            Backend::General(l) => drive(l, &kernel, n_steps, rng, &mut record),
        }
    }

    /// Runs a fresh walk and returns only its final first coordinate.
    pub fn endpoint_first_coord<R: RngCore + ?Sized>(&mut self, n_steps: usize, rng: &mut R) -> i64 {
        self.drive(n_steps, rng, |_| {})
    }

    /// Runs a fresh walk and keeps the whole path.
    pub fn trajectory<R: RngCore + ?Sized>(&mut self, n_steps: usize, rng: &mut R) -> Result<Trajectory> {
        if n_steps > MAX_TRAJECTORY_STEPS {
            return Err(Error::Resource(format!(
                "{n_steps} steps exceeds the trajectory limit of {MAX_TRAJECTORY_STEPS}"
            )));
        }
        let mut steps = Vec::new();
        let mut first_coord_path = Vec::new();
        steps
            .try_reserve_exact(n_steps)
            .and_then(|_| first_coord_path.try_reserve_exact(n_steps + 1))
            .map_err(|e| Error::Resource(format!("cannot allocate a {n_steps}-step trajectory: {e}")))?;
        first_coord_path.push(0);
        let mut x1 = 0i64;
        self.drive(n_steps, rng, |dir| {
            x1 += i64::from(dir.first_component());
            steps.push(dir);
            first_coord_path.push(x1);
        });
        Ok(Trajectory { start: LatticePoint::origin(self.params.d()), steps, first_coord_path })
    }
}

#[inline]
fn drive<L: Lattice, R: RngCore + ?Sized>(
    lattice: &mut L,
    kernel: &FastKernel,
    n_steps: usize,
    rng: &mut R,
    record: &mut impl FnMut(Direction),
) -> i64 {
    lattice.reset();
    let mut site = lattice.origin();
    for _ in 0..n_steps {
        let fresh = lattice.eat(&site);
        let dir = kernel.draw(fresh, unit_f64(rng.next_u64()));
        lattice.advance(&mut site, dir);
        record(dir);
    }
    lattice.first(&site)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_steps_stays_at_origin() {
        let p = WalkParams::new(3, 0.5, 0.5).unwrap();
        let t = run_walk(&p, 0, 1).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.first_coord_path(), &[0]);
        assert_eq!(t.endpoint(), LatticePoint::origin(3));
    }

    #[test]
    fn replay_is_identical() {
        let p = WalkParams::new(2, 0.3, 0.6).unwrap();
        assert_eq!(run_walk(&p, 5000, 42).unwrap(), run_walk(&p, 5000, 42).unwrap());
        assert_ne!(run_walk(&p, 5000, 42).unwrap(), run_walk(&p, 5000, 43).unwrap());
    }

    #[test]
    fn steps_are_nearest_neighbour() {
        let p = WalkParams::new(5, 0.7, 0.2).unwrap();
        let t = run_walk(&p, 2000, 3).unwrap();
        let sites = t.sites();
        for pair in sites.windows(2) {
            assert!(pair[0].direction_to(&pair[1]).is_some());
        }
        for (i, s) in sites.iter().enumerate() {
            assert_eq!(i64::from(s.first()), t.first_coord_path()[i]);
        }
    }

    #[test]
    fn beta_one_never_steps_left_from_fresh_site() {
        let p = WalkParams::new(2, 1.0, 0.4).unwrap();
        let t = run_walk(&p, 20_000, 9).unwrap();
        let sites = t.sites();
        let mut seen = HashSet::new();
        for (i, &dir) in t.steps().iter().enumerate() {
            if seen.insert(sites[i].clone()) {
                assert_ne!(dir, Direction::MINUS_E1);
            }
        }
    }

    #[test]
    fn mu_one_never_steps_right_from_visited_site() {
        let p = WalkParams::new(2, 0.0, 1.0).unwrap();
        let t = run_walk(&p, 20_000, 10).unwrap();
        let sites = t.sites();
        let mut seen = HashSet::new();
        for (i, &dir) in t.steps().iter().enumerate() {
            if !seen.insert(sites[i].clone()) {
                assert_ne!(dir, Direction::PLUS_E1);
            }
        }
    }

    #[test]
    fn absurd_length_is_a_resource_error() {
        let p = WalkParams::new(2, 0.0, 0.0).unwrap();
        let mut w = Walker::new(p, 10);
        let err = w.trajectory(MAX_TRAJECTORY_STEPS + 1, &mut stream_rng(0, 0)).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn backends_agree() {
        // same stream through the packed and the general encodings
        for d in [2, 4, 6, 9] {
            let p = WalkParams::new(d, 0.6, 0.8).unwrap();
            let packed = Walker::new(p, 3000).trajectory(3000, &mut stream_rng(5, 1)).unwrap();
            let mut general = Walker { params: p, kernel: FastKernel::new(&p), backend: Backend::General(General { d, visited: HashSet::new() }), max_steps: 3000 };
            let slow = general.trajectory(3000, &mut stream_rng(5, 1)).unwrap();
            assert_eq!(packed, slow, "d = {d}");
        }
    }

    /// Naive reference: visited sites kept in a list, kernel from `step_distribution`.
    fn reference_walk(params: &WalkParams, n: usize, seed: u64) -> Vec<Direction> {
        let mut rng = stream_rng(seed, 0);
        let mut visited: Vec<LatticePoint> = Vec::new();
        let mut pos = LatticePoint::origin(params.d());
        let mut out = Vec::new();
        for _ in 0..n {
            let fresh = !visited.contains(&pos);
            if fresh {
                visited.push(pos.clone());
            }
            let dir = step_distribution(params, fresh).sample(unit_f64(rng.next_u64()));
            pos = pos.step(dir);
            out.push(dir);
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_list_reference(d in 2usize..7, beta in 0.0..=1.0f64, mu in 0.0..=1.0f64, seed: u64, n in 0usize..300) {
            let p = WalkParams::new(d, beta, mu).unwrap();
            let fast = run_walk(&p, n, seed).unwrap();
            prop_assert_eq!(fast.steps(), &reference_walk(&p, n, seed)[..]);
        }

        #[test]
        fn sample_step_reproduces_run_walk(d in 2usize..5, beta in 0.0..=1.0f64, mu in 0.0..=1.0f64, seed: u64) {
            let p = WalkParams::new(d, beta, mu).unwrap();
            let t = run_walk(&p, 200, seed).unwrap();
            let mut rng = stream_rng(seed, 0);
            let mut field = CookieField::new();
            let mut pos = LatticePoint::origin(d);
            for expected in t.sites().into_iter().skip(1) {
                pos = sample_step(&p, &mut field, &pos, &mut rng);
                prop_assert_eq!(&pos, &expected);
            }
        }
    }
}
