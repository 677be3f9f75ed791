//! Law of `omega_3^{[1]}` in a prescribed cookie field.
//!
//! With `I_x` the indicator that the cookie at `x` is present, the `+e1` and `-e1`
//! kernel numerators at `x` are
//!
//! ```text
//! A_x = 1 - mu + (beta + mu) I_x,     B_x = 1 + mu - (beta + mu) I_x,
//! ```
//!
//! and every perpendicular step has numerator 1. Multiplying `(2d)^3` by the
//! probability of each first-coordinate displacement gives a short polynomial in
//! the `A`s and `B`s of sites within distance two of the origin.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CookieField, Direction, LatticePoint, WalkParams};

/// Arithmetic the three-step computations run in: `f64`, or `BigRational` for
/// exact identities.
pub trait Weight: Clone + Debug + PartialOrd + Num + Signed {
    fn from_int(v: i64) -> Self;
    fn as_f64(&self) -> f64;
}

impl Weight for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `(d, beta, mu)` in a chosen arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Drifts<W> {
    pub d: usize,
    pub beta: W,
    pub mu: W,
}

impl From<&WalkParams> for Drifts<f64> {
    fn from(p: &WalkParams) -> Self {
        Drifts { d: p.d(), beta: p.beta(), mu: p.mu() }
    }
}

impl Drifts<BigRational> {
    /// Exact rational parameters; rejects values outside `[0, 1]`.
    pub fn exact(d: usize, beta: BigRational, mu: BigRational) -> Result<Self> {
        let unit = |v: &BigRational| *v >= BigRational::zero() && *v <= BigRational::one();
        if d == 0 || !unit(&beta) || !unit(&mu) {
            return Err(Error::Domain(format!("need d >= 1 and beta, mu in [0, 1]; got d = {d}, beta = {beta}, mu = {mu}")));
        }
        Ok(Drifts { d, beta, mu })
    }

    /// The binary values of `params` converted without rounding.
    pub fn exact_from(params: &WalkParams) -> Self {
        let conv = |v: f64| BigRational::from_f64(v).expect("finite parameter");
        Drifts { d: params.d(), beta: conv(params.beta()), mu: conv(params.mu()) }
    }
}

impl<W: Weight> Drifts<W> {
    /// `A_x` for cookie state `present`.
    fn a(&self, present: bool) -> W {
        if present {
            W::one() + self.beta.clone()
        } else {
            W::one() - self.mu.clone()
        }
    }

    fn b(&self, present: bool) -> W {
        if present {
            W::one() - self.beta.clone()
        } else {
            W::one() + self.mu.clone()
        }
    }

    /// Kernel numerator `1 + (e1 . x) * drift` for a step in direction `dir`.
    pub(crate) fn numerator(&self, present: bool, dir: Direction) -> W {
        match dir.first_component() {
            1 => self.a(present),
            -1 => self.b(present),
            _ => W::one(),
        }
    }
}

/// Law of the first-coordinate displacement after three steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStepLaw<W> {
    /// `probs[k + 3]` = P(omega_3^{[1]} = k).
    probs: [W; 7],
    mean_first_coord: W,
}

impl<W: Weight> ThreeStepLaw<W> {
    fn from_probs(probs: [W; 7]) -> Self {
        let mean_first_coord = probs
            .iter()
            .enumerate()
            .fold(W::zero(), |acc, (i, p)| acc + W::from_int(i as i64 - 3) * p.clone());
        ThreeStepLaw { probs, mean_first_coord }
    }

    pub fn prob(&self, k: i32) -> W {
        if (-3..=3).contains(&k) {
            self.probs[(k + 3) as usize].clone()
        } else {
            W::zero()
        }
    }

    pub fn probs(&self) -> &[W; 7] {
        &self.probs
    }

    pub fn mean(&self) -> &W {
        &self.mean_first_coord
    }

    pub fn prob_positive(&self) -> W {
        self.probs[4..].iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    pub fn prob_negative(&self) -> W {
        self.probs[..3].iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    /// P(omega_3^{[1]} <= k) for k = -3..=3.
    pub fn cdf(&self) -> [W; 7] {
        let mut acc = W::zero();
        std::array::from_fn(|i| {
            acc = acc.clone() + self.probs[i].clone();
            acc.clone()
        })
    }

    pub fn to_f64(&self) -> ThreeStepLaw<f64> {
        ThreeStepLaw {
            probs: std::array::from_fn(|i| self.probs[i].as_f64()),
            mean_first_coord: self.mean_first_coord.as_f64(),
        }
    }
}

impl<W: Weight> Serialize for ThreeStepLaw<W> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThreeStepLaw", 2)?;
        let probs: Vec<(i32, f64)> = (0..7).map(|i| (i as i32 - 3, self.probs[i].as_f64())).collect();
        st.serialize_field("probs", &probs)?;
        st.serialize_field("mean_first_coord", &self.mean_first_coord.as_f64())?;
        st.end()
    }
}

fn require_d2(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::Domain(format!("three-step formulas need d >= 2 (got d = {d})")))
    } else {
        Ok(())
    }
}

/// Closed-form three-step law in the cookie field `field`, `f64` arithmetic.
pub fn three_step_distribution(params: &WalkParams, field: &CookieField) -> Result<ThreeStepLaw<f64>> {
    three_step_law(&Drifts::from(params), field)
}

/// Closed-form three-step law in any [`Weight`] arithmetic.
///
/// The mass at displacement 0 is whatever the six other displacements leave over.
pub fn three_step_law<W: Weight>(drifts: &Drifts<W>, field: &CookieField) -> Result<ThreeStepLaw<W>> {
    let d = drifts.d;
    require_d2(d)?;
    let int = |v: i64| W::from_int(v);
    let on_axis = |k: i32| LatticePoint::from_coords((0..d).map(|i| if i == 0 { k } else { 0 }).collect());
    let cookie = |x: &LatticePoint| field.has_cookie(x);
    let a = |x: &LatticePoint| drifts.a(cookie(x));
    let b = |x: &LatticePoint| drifts.b(cookie(x));

    let origin = LatticePoint::origin(d);
    let e1 = on_axis(1);
    let two_e1 = on_axis(2);
    let m_e1 = on_axis(-1);
    let m_two_e1 = on_axis(-2);
    let perps: Vec<LatticePoint> = Direction::all(d).skip(2).map(|dir| origin.step(dir)).collect();
    let off = int(2 * d as i64 - 2);
    let one_minus_mu = W::one() - drifts.mu.clone();
    let one_plus_mu = W::one() + drifts.mu.clone();

    // two perpendicular steps that do not return to the origin, counted per path
    let sum_two_perp = |f: &dyn Fn(&LatticePoint) -> W| {
        let mut acc = W::zero();
        for p in &perps {
            for q in &perps {
                let v = p.offset(q);
                if v != origin {
                    acc = acc + f(&v);
                }
            }
        }
        acc
    };
    let sum_perp = |f: &dyn Fn(&LatticePoint) -> W| perps.iter().fold(W::zero(), |acc, u| acc + f(u));

    let (a0, b0) = (a(&origin), b(&origin));

    let plus3 = a0.clone() * a(&e1) * a(&two_e1);
    let plus2 = a0.clone() * a(&e1) * off.clone()
        + a0.clone() * sum_perp(&|u| a(&e1.offset(u)))
        + sum_perp(&|u| a(u) * a(&u.offset(&e1)));
    let plus1 = a0.clone() * a(&e1) * b(&two_e1)
        + a0.clone() * b(&e1) * one_minus_mu.clone()
        + b0.clone() * a(&m_e1) * one_minus_mu.clone()
        + a0.clone() * off.clone() * off.clone()
        + sum_perp(&|u| a(u)) * off.clone()
        + off.clone() * one_minus_mu
        + sum_two_perp(&|v| a(v));

    let minus3 = b0.clone() * b(&m_e1) * b(&m_two_e1);
    let minus2 = b0.clone() * b(&m_e1) * off.clone()
        + b0.clone() * sum_perp(&|u| b(&m_e1.offset(u)))
        + sum_perp(&|u| b(u) * b(&u.offset(&m_e1)));
    let minus1 = b0.clone() * b(&m_e1) * a(&m_two_e1)
        + b0.clone() * a(&m_e1) * one_plus_mu.clone()
        + a0.clone() * b(&e1) * one_plus_mu.clone()
        + b0.clone() * off.clone() * off.clone()
        + sum_perp(&|u| b(u)) * off.clone()
        + off * one_plus_mu
        + sum_two_perp(&|v| b(v));

    let norm = int((2 * d as i64).pow(3));
    let scaled = [minus3, minus2, minus1, W::zero(), plus1, plus2, plus3].map(|w| w / norm.clone());
    let listed = scaled.iter().cloned().fold(W::zero(), |acc, w| acc + w);
    let mut probs = scaled;
    probs[3] = W::one() - listed;
    Ok(ThreeStepLaw::from_probs(probs))
}

/// Every three-step path from `start` with its probability, given the cookie
/// state of each site before the walk begins.
///
/// Sites visited along the path lose their cookie as the path goes.
pub fn three_step_paths<W: Weight>(
    drifts: &Drifts<W>,
    start: &LatticePoint,
    has_cookie: impl Fn(&LatticePoint) -> bool,
) -> Vec<([Direction; 3], W)> {
    let d = drifts.d;
    let norm = W::from_int((2 * d as i64).pow(3));
    let mut out = Vec::with_capacity((2 * d).pow(3));
    for s0 in Direction::all(d) {
        let x1 = start.step(s0);
        let w0 = drifts.numerator(has_cookie(start), s0);
        for s1 in Direction::all(d) {
            let x2 = x1.step(s1);
            let c1 = x1 != *start && has_cookie(&x1);
            let w1 = w0.clone() * drifts.numerator(c1, s1);
            for s2 in Direction::all(d) {
                let c2 = x2 != *start && x2 != x1 && has_cookie(&x2);
                let w = w1.clone() * drifts.numerator(c2, s2) / norm.clone();
                out.push(([s0, s1, s2], w));
            }
        }
    }
    out
}

/// Brute-force three-step law: sums all `(2d)^3` paths with online cookie updates.
pub fn brute_force_three_step(params: &WalkParams, field: &CookieField) -> Result<ThreeStepLaw<f64>> {
    three_step_law_brute_force(&Drifts::from(params), field)
}

pub fn three_step_law_brute_force<W: Weight>(drifts: &Drifts<W>, field: &CookieField) -> Result<ThreeStepLaw<W>> {
    require_d2(drifts.d)?;
    let origin = LatticePoint::origin(drifts.d);
    let mut probs: [W; 7] = std::array::from_fn(|_| W::zero());
    for (dirs, w) in three_step_paths(drifts, &origin, |x| field.has_cookie(x)) {
        let k: i32 = dirs.iter().map(|d| d.first_component()).sum();
        let slot = &mut probs[(k + 3) as usize];
        *slot = slot.clone() + w;
    }
    Ok(ThreeStepLaw::from_probs(probs))
}

/// Effect of the cookie at one site on the sign probabilities of `omega_3^{[1]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CookieMonotonicity {
    pub site: LatticePoint,
    /// P(omega_3^{[1]} > 0) with `I_x = 0` and `I_x = 1`.
    pub positive: (f64, f64),
    /// P(omega_3^{[1]} < 0) with `I_x = 0` and `I_x = 1`.
    pub negative: (f64, f64),
    /// Exact `P(>0 | I_x=1) - P(>0 | I_x=0)`, rounded for display.
    pub delta_positive: f64,
    pub delta_negative: f64,
    /// `delta_positive >= 0` and `delta_negative <= 0`, decided in exact arithmetic.
    pub holds: bool,
}

/// Toggles the cookie at `x` (everything else as in `field`) and compares the
/// probabilities of a positive and a negative three-step displacement.
///
/// Evaluated in exact rational arithmetic on the binary values of the parameters,
/// so a zero difference is reported as exactly zero.
pub fn monotonicity_in_cookie(params: &WalkParams, field: &CookieField, x: &LatticePoint) -> Result<CookieMonotonicity> {
    let drifts = Drifts::exact_from(params);
    let mut without = field.clone();
    without.set_cookie(x, false);
    let mut with = field.clone();
    with.set_cookie(x, true);
    let law0 = three_step_law(&drifts, &without)?;
    let law1 = three_step_law(&drifts, &with)?;
    let dpos = law1.prob_positive() - law0.prob_positive();
    let dneg = law1.prob_negative() - law0.prob_negative();
    let holds = !dpos.is_negative() && !dneg.is_positive();
    Ok(CookieMonotonicity {
        site: x.clone(),
        positive: (law0.prob_positive().as_f64(), law1.prob_positive().as_f64()),
        negative: (law0.prob_negative().as_f64(), law1.prob_negative().as_f64()),
        delta_positive: Weight::as_f64(&dpos),
        delta_negative: Weight::as_f64(&dneg),
        holds,
    })
}
