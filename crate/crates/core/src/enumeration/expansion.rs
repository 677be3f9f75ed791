//! Expansion coefficients of the velocity.
//!
//! A term of order `N` and length `m` is a chain of walks `omega^(0), ..., omega^(N)`:
//! `omega^(0)` is the first step, and `omega^(n)` takes `j_n + 1` steps from the end
//! of `omega^(n-1)`, with `j_1 + ... + j_N = m - N - 1`. Inside `omega^(n)` the kernel
//! remembers `omega^(n-1)` and its own past but nothing earlier. The final step of
//! each `omega^(n)` is weighted not by the kernel but by the difference `Delta_n`
//! between the kernel with and without the memory of `omega^(n-1)`.
//!
//! `Delta_n` vanishes unless the site it is evaluated at was visited by
//! `omega^(n-1)` and not yet by `omega^(n)`; in that case it is `-(beta+mu)/(2d)` for
//! a `+e1` step, `+(beta+mu)/(2d)` for `-e1`, and zero otherwise. The enumeration
//! prunes every branch on which a `Delta` vanishes.

use std::collections::HashMap;

use serde::Serialize;

use crate::bounds::pi_bound_totals;
use crate::error::{Error, Result};
use crate::greens::GreensTable;
use crate::model::{Direction, LatticePoint, WalkParams};

/// Cap on `(2d)^m * C(m, N)` for a single coefficient.
pub const WORK_BUDGET: f64 = 1e9;

/// Coordinates are packed in 8-bit fields of a `u128`.
const MAX_DIM: usize = 16;
const FIELD: u32 = 8;
const BIAS: i32 = 128;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientEntry {
    pub x: LatticePoint,
    pub y: LatticePoint,
    pub value: f64,
}

/// `pi_m^(N)(x, y)` for all nearest-neighbour pairs `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCoefficient {
    pub m: usize,
    pub order: usize,
    /// Nonzero entries sorted by `(x, y)`.
    pub value_by_displacement: Vec<CoefficientEntry>,
    /// `sum_{x,y} |pi_m^(N)(x, y)|`.
    pub abs_total: f64,
    /// `sum_{x,y} (y - x)^{[1]} pi_m^(N)(x, y)`.
    pub signed_drift: f64,
}

/// `Delta` for a step `step` taken from the last site of `cur`.
///
/// `prev` is the whole previous walk (its last site is the first site of `cur`).
/// The result is the step probability with memory `prev o cur` minus the step
/// probability with memory `cur` alone.
pub fn delta_weight(params: &WalkParams, prev: &[LatticePoint], cur: &[LatticePoint], step: &LatticePoint) -> Result<f64> {
    let d = params.d();
    let dir = LatticePoint::origin(d)
        .direction_to(step)
        .ok_or_else(|| Error::Domain(format!("step {step} is not a nearest-neighbour displacement")))?;
    check_path(prev, d, "previous walk")?;
    check_path(cur, d, "current walk")?;
    if prev.last() != cur.first() {
        return Err(Error::domain("current walk must start where the previous walk ends"));
    }
    let (x, own_past) = cur.split_last().expect("checked nonempty");
    let prev_past = &prev[..prev.len() - 1];
    let cookie_own = !own_past.contains(x);
    let cookie_concat = cookie_own && !prev_past.contains(x);
    let p = |cookie: bool| (1.0 + f64::from(dir.first_component()) * params.drift(cookie)) / (2.0 * d as f64);
    Ok(p(cookie_concat) - p(cookie_own))
}

fn check_path(path: &[LatticePoint], d: usize, what: &str) -> Result<()> {
    if path.is_empty() {
        return Err(Error::Domain(format!("{what} is empty")));
    }
    if path.iter().any(|p| p.dim() != d) {
        return Err(Error::Domain(format!("{what} has sites of the wrong dimension")));
    }
    if path.windows(2).any(|w| w[0].direction_to(&w[1]).is_none()) {
        return Err(Error::Domain(format!("{what} is not a nearest-neighbour path")));
    }
    Ok(())
}

/// `(2d)^m * C(m, N)`, the enumeration cost measure.
pub fn work_units(d: usize, m: usize, order: usize) -> f64 {
    let paths = (2.0 * d as f64).powi(m as i32);
    let binom = (0..order.min(m)).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64);
    paths * binom
}

/// Exact enumeration of `pi_m^(N)`.
pub fn expansion_coefficient(params: &WalkParams, m: usize, order: usize) -> Result<ExpansionCoefficient> {
    let d = params.d();
    if order == 0 {
        return Err(Error::domain("expansion order N must be at least 1"));
    }
    if d > MAX_DIM {
        return Err(Error::Domain(format!("enumeration supports d <= {MAX_DIM} (got {d})")));
    }
    let empty = ExpansionCoefficient { m, order, value_by_displacement: Vec::new(), abs_total: 0.0, signed_drift: 0.0 };
    if m < order + 1 {
        return Ok(empty);
    }
    let work = work_units(d, m, order);
    if work > WORK_BUDGET {
        return Err(Error::Budget(format!(
            "(2d)^m C(m,N) = {work:.3e} for d = {d}, m = {m}, N = {order} exceeds the budget of {WORK_BUDGET:.0e}"
        )));
    }
    if m >= BIAS as usize {
        return Err(Error::Budget(format!("m = {m} leaves the packed coordinate range")));
    }

    let mut e = Enumerator::new(params, order);
    let origin = e.origin;
    for lens in compositions(m - order - 1, order) {
        e.lens = lens;
        for dir in 0..2 * d {
            let w0 = (1.0 + f64::from(Direction(dir as u16).first_component()) * params.beta()) / e.two_d;
            if w0 == 0.0 {
                continue;
            }
            let first = [origin, origin.wrapping_add(e.deltas[dir])];
            e.segment(1, &first, w0);
        }
    }

    let mut entries: Vec<CoefficientEntry> = e
        .acc
        .into_iter()
        .map(|((x, y), s)| (x, y, s.value()))
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(x, y, value)| CoefficientEntry { x: unpack(x, d), y: unpack(y, d), value })
        .collect();
    entries.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
    let mut abs_total = Neumaier::default();
    let mut signed_drift = Neumaier::default();
    for entry in &entries {
        abs_total.add(entry.value.abs());
        signed_drift.add(f64::from(entry.y.first() - entry.x.first()) * entry.value);
    }
    Ok(ExpansionCoefficient {
        m,
        order,
        value_by_displacement: entries,
        abs_total: abs_total.value(),
        signed_drift: signed_drift.value(),
    })
}

struct Enumerator {
    beta: f64,
    mu: f64,
    two_d: f64,
    origin: u128,
    deltas: Vec<u128>,
    order: usize,
    lens: Vec<usize>,
    acc: HashMap<(u128, u128), Neumaier>,
}

impl Enumerator {
    fn new(params: &WalkParams, order: usize) -> Self {
        let d = params.d();
        let origin = (0..d).map(|a| (BIAS as u128) << (FIELD as usize * a)).sum();
        let deltas = Direction::all(d)
            .map(|dir| {
                let unit = 1u128 << (FIELD as usize * dir.axis());
                if dir.sign() > 0 {
                    unit
                } else {
                    unit.wrapping_neg()
                }
            })
            .collect();
        Enumerator {
            beta: params.beta(),
            mu: params.mu(),
            two_d: 2.0 * d as f64,
            origin,
            deltas,
            order,
            lens: Vec::new(),
            acc: HashMap::new(),
        }
    }

    /// Walk `omega^(n)` starting at the end of `prev`.
    fn segment(&mut self, n: usize, prev: &[u128], weight: f64) {
        let mut own = Vec::with_capacity(self.lens[n - 1] + 2);
        own.push(*prev.last().expect("nonempty"));
        self.extend(n, &prev[..prev.len() - 1], &mut own, weight);
    }

    fn extend(&mut self, n: usize, prev_past: &[u128], own: &mut Vec<u128>, weight: f64) {
        let i = own.len() - 1;
        let cur = own[i];
        let in_prev = prev_past.contains(&cur);
        let in_own = own[..i].contains(&cur);
        if i < self.lens[n - 1] {
            let cookie = !in_prev && !in_own;
            let drift = if cookie { self.beta } else { -self.mu };
            for (k, &delta) in self.deltas.clone().iter().enumerate() {
                let w = weight * (1.0 + f64::from(Direction(k as u16).first_component()) * drift) / self.two_d;
                if w == 0.0 {
                    continue;
                }
                own.push(cur.wrapping_add(delta));
                self.extend(n, prev_past, own, w);
                own.pop();
            }
            return;
        }
        if !in_prev || in_own {
            return;
        }
        let magnitude = (self.beta + self.mu) / self.two_d;
        if magnitude == 0.0 {
            return;
        }
        for (k, sign) in [(0usize, 1.0), (1usize, -1.0)] {
            let dw = -sign * magnitude * weight;
            let next = cur.wrapping_add(self.deltas[k]);
            if n == self.order {
                self.acc.entry((cur, next)).or_default().add(dw);
            } else {
                own.push(next);
                self.segment(n + 1, own, dw);
                own.pop();
            }
        }
    }
}

fn unpack(key: u128, d: usize) -> LatticePoint {
    LatticePoint::from_coords((0..d).map(|a| ((key >> (FIELD as usize * a)) & 0xff) as i32 - BIAS).collect())
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=total {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Compensated (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermSummary {
    pub m: usize,
    pub order: usize,
    pub signed_drift: f64,
    pub abs_total: f64,
}

/// Velocity series truncated after length `m_max`, with a bound on what was dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSpeed {
    pub m_max: usize,
    /// `beta/d + sum_{m=2}^{m_max} sum_N sum_{x,y} (y-x)^{[1]} pi_m^(N)(x,y)`.
    pub velocity: f64,
    /// Upper bound on `sum_{m > m_max}` of the absolute coefficients.
    pub tail_bound: f64,
    pub terms: Vec<TermSummary>,
}

/// Truncated velocity series for `d >= 6`.
///
/// The tail bound is the total of the coefficient bounds over all orders minus the
/// absolute mass already enumerated, using Green's function values from `greens`.
pub fn partial_speed(params: &WalkParams, m_max: usize, greens: &GreensTable) -> Result<PartialSpeed> {
    let d = params.d();
    if d < 6 {
        return Err(Error::Domain(format!("the velocity series is only available for d >= 6 (got d = {d})")));
    }
    let coupling = params.beta() + params.mu();
    let totals = pi_bound_totals(d, params.beta(), params.mu(), greens)?;
    let higher_bound = totals.higher_orders.ok_or_else(|| {
        Error::Divergent(format!("(beta + mu) a_d >= 1 for d = {d}, beta + mu = {coupling}: the coefficient bounds do not sum"))
    })?;

    let mut velocity = Neumaier::default();
    velocity.add(params.beta() / d as f64);
    let mut abs_first = 0.0;
    let mut abs_higher = 0.0;
    let mut terms = Vec::new();
    for m in 2..=m_max {
        for order in 1..=m.saturating_sub(2) {
            let c = expansion_coefficient(params, m, order)?;
            velocity.add(c.signed_drift);
            if order == 1 {
                abs_first += c.abs_total;
            } else {
                abs_higher += c.abs_total;
            }
            terms.push(TermSummary { m, order, signed_drift: c.signed_drift, abs_total: c.abs_total });
        }
    }
    Ok(PartialSpeed {
        m_max,
        velocity: velocity.value(),
        tail_bound: (totals.first_order - abs_first) + (higher_bound - abs_higher),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, beta: f64, mu: f64) -> WalkParams {
        WalkParams::new(d, beta, mu).unwrap()
    }

    fn pt(c: &[i32]) -> LatticePoint {
        LatticePoint::from_coords(c.to_vec())
    }

    #[test]
    fn compositions_count() {
        // C(total + parts - 1, parts - 1)
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(4, 3).len(), 15);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn short_lengths_vanish() {
        let p = params(3, 0.5, 0.5);
        for (m, order) in [(1, 1), (2, 2), (3, 3), (2, 1)] {
            let c = expansion_coefficient(&p, m, order).unwrap();
            assert!(c.value_by_displacement.is_empty(), "m = {m}, N = {order}");
            assert_eq!(c.abs_total, 0.0);
        }
    }

    #[test]
    fn no_interaction_no_coefficients() {
        let c = expansion_coefficient(&params(2, 0.0, 0.0), 6, 1).unwrap();
        assert!(c.value_by_displacement.is_empty());
    }

    #[test]
    fn delta_perpendicular_step_is_zero() {
        let p = params(2, 0.4, 0.6);
        let prev = [pt(&[0, 0]), pt(&[1, 0])];
        let cur = [pt(&[1, 0]), pt(&[0, 0])];
        assert_eq!(delta_weight(&p, &prev, &cur, &pt(&[0, 1])).unwrap(), 0.0);
    }

    #[test]
    fn delta_unvisited_site_is_zero() {
        let p = params(2, 0.4, 0.6);
        let prev = [pt(&[0, 0]), pt(&[1, 0])];
        let cur = [pt(&[1, 0]), pt(&[1, 1])];
        assert_eq!(delta_weight(&p, &prev, &cur, &pt(&[1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn delta_on_previously_visited_site() {
        let p = params(2, 0.4, 0.6);
        let prev = [pt(&[0, 0]), pt(&[1, 0])];
        let cur = [pt(&[1, 0]), pt(&[0, 0])];
        let plus = delta_weight(&p, &prev, &cur, &pt(&[1, 0])).unwrap();
        let minus = delta_weight(&p, &prev, &cur, &pt(&[-1, 0])).unwrap();
        assert!((plus + 0.25).abs() < 1e-15);
        assert!((minus - 0.25).abs() < 1e-15);
    }

    #[test]
    fn delta_rejects_bad_input() {
        let p = params(2, 0.4, 0.6);
        let prev = [pt(&[0, 0]), pt(&[1, 0])];
        let cur = [pt(&[1, 0]), pt(&[0, 0])];
        assert!(delta_weight(&p, &prev, &cur, &pt(&[1, 1])).is_err());
        assert!(delta_weight(&p, &prev, &[pt(&[2, 0])], &pt(&[1, 0])).is_err());
        assert!(delta_weight(&p, &[pt(&[0, 0]), pt(&[2, 0])], &[pt(&[2, 0])], &pt(&[1, 0])).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let err = expansion_coefficient(&params(6, 1.0, 1.0), 9, 2).unwrap_err();
        assert!(matches!(err, Error::Budget(_)), "{err}");
        assert!(err.to_string().contains("1e9"));
    }

    #[test]
    fn first_reversal_term() {
        // m = 3, N = 1: step out, step back, Delta at the origin.
        let (d, beta, mu) = (3usize, 0.3, 0.5);
        let c = expansion_coefficient(&params(d, beta, mu), 3, 1).unwrap();
        let dd = d as f64;
        let p_return = (2.0 * dd - 2.0 * beta * beta) / (4.0 * dd * dd);
        assert!((c.signed_drift + (beta + mu) / dd * p_return).abs() < 1e-15);
        assert!((c.abs_total - (beta + mu) / dd * p_return).abs() < 1e-15);
        assert!(c.value_by_displacement.iter().all(|e| e.x == LatticePoint::origin(d)));
    }

    #[test]
    fn entries_are_nearest_neighbour_pairs() {
        let c = expansion_coefficient(&params(2, 0.8, 0.4), 6, 2).unwrap();
        assert!(!c.value_by_displacement.is_empty());
        for e in &c.value_by_displacement {
            assert_eq!(e.x.direction_to(&e.y).map(|d| d.axis()), Some(0));
        }
        assert!(c.abs_total >= c.signed_drift.abs());
    }
}
