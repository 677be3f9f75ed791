//! Stochastic bisection for the `beta` at which the velocity changes sign.

use serde::{Deserialize, Serialize};

use super::velocity::{endpoint_samples, summarize, EstimatorConfig, SignVerdict, VelocityEstimate};
use crate::error::{Error, Result};
use crate::model::WalkParams;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootBudget {
    /// Walks at the first look at a point.
    pub base_walks: usize,
    pub n_steps: usize,
    /// Walks at a point are multiplied by 4 while the verdict is inconclusive, up to
    /// `max_factor * base_walks`.
    pub max_factor: usize,
    /// Cap on the number of distinct points evaluated.
    pub max_points: usize,
}

impl Default for RootBudget {
    fn default() -> Self {
        RootBudget { base_walks: 200, n_steps: 7000, max_factor: 64, max_points: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStatus {
    /// `[lo, hi]` has a confident negative verdict at `lo` and positive at `hi`.
    Bracketed,
    /// No sign change was confirmed between `beta = 0` and `beta = 1`.
    NoRoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub d: usize,
    pub mu: f64,
    pub status: RootStatus,
    pub beta0_interval: [f64; 2],
    pub confidence_note: String,
    pub evaluations: Vec<VelocityEstimate>,
}

impl RootResult {
    pub fn width(&self) -> f64 {
        self.beta0_interval[1] - self.beta0_interval[0]
    }
}

struct Search<'a> {
    d: usize,
    mu: f64,
    seed: u64,
    budget: &'a RootBudget,
    config: &'a EstimatorConfig,
    evaluations: Vec<VelocityEstimate>,
}

impl Search<'_> {
    /// Estimate at `beta`, escalating the number of walks while inconclusive.
    /// The seed depends only on `beta`, so a point's verdict does not depend on
    /// the search path that reached it.
    fn evaluate(&mut self, beta: f64) -> Result<VelocityEstimate> {
        let params = WalkParams::new(self.d, beta, self.mu)?;
        let seed = derive_seed(self.seed, beta.to_bits());
        let cap = self.budget.base_walks * self.budget.max_factor;
        let mut n = self.budget.base_walks;
        let mut samples = Vec::with_capacity(n);
        loop {
            let more = endpoint_samples(&params, samples.len(), n - samples.len(), self.budget.n_steps, seed, self.config.exec);
            samples.extend(more);
            let est = summarize(&params, &samples, self.budget.n_steps, seed, self.config.z);
            if est.sign_verdict != SignVerdict::Inconclusive || n >= cap {
                self.evaluations.push(est);
                return Ok(est);
            }
            n = (4 * n).min(cap);
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations.len() >= self.budget.max_points
    }
}

/// Brackets the zero of `beta -> v_1(beta, mu, d)` to width `target_width`.
///
/// The ends `beta = 0` and `beta = 1` must get negative and positive verdicts;
/// otherwise a [`RootStatus::NoRoot`] report is returned. An inconclusive midpoint
/// after full escalation is retried at the quarter points on either side; if
/// neither of those narrows the bracket, the search stops and says so in the note.
pub fn find_beta0(d: usize, mu: f64, target_width: f64, budget: &RootBudget, seed: u64) -> Result<RootResult> {
    find_beta0_with(d, mu, target_width, budget, seed, &EstimatorConfig::default())
}

pub fn find_beta0_with(
    d: usize,
    mu: f64,
    target_width: f64,
    budget: &RootBudget,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<RootResult> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("mu must lie in (0, 1] (got {mu})")));
    }
    if !(target_width >= 0.005) {
        return Err(Error::Domain(format!("target width must be at least 0.005 (got {target_width})")));
    }
    if budget.base_walks < 2 || budget.n_steps == 0 || budget.max_factor == 0 || budget.max_points < 2 {
        return Err(Error::Budget(format!("unusable root-finding budget {budget:?}")));
    }
    WalkParams::new(d, 0.0, mu)?;
    let mut s = Search { d, mu, seed, budget, config, evaluations: Vec::new() };

    let at_lo = s.evaluate(0.0)?;
    let at_hi = s.evaluate(1.0)?;
    if at_lo.sign_verdict != SignVerdict::Negative || at_hi.sign_verdict != SignVerdict::Positive {
        return Ok(RootResult {
            d,
            mu,
            status: RootStatus::NoRoot,
            beta0_interval: [0.0, 1.0],
            confidence_note: format!(
                "no sign change confirmed on [0, 1]: verdict {} at beta = 0 and {} at beta = 1 (z = {})",
                at_lo.sign_verdict.as_str(),
                at_hi.sign_verdict.as_str(),
                config.z
            ),
            evaluations: s.evaluations,
        });
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut notes = Vec::new();
    while hi - lo > target_width {
        if s.exhausted() {
            notes.push(format!("stopped after {} evaluations before reaching width {target_width}", s.evaluations.len()));
            break;
        }
        let mid = 0.5 * (lo + hi);
        match s.evaluate(mid)?.sign_verdict {
            SignVerdict::Negative => lo = mid,
            SignVerdict::Positive => hi = mid,
            SignVerdict::Inconclusive => {
                let quarter = 0.25 * (hi - lo);
                let left = s.evaluate(mid - quarter)?;
                let right = s.evaluate(mid + quarter)?;
                let before = (lo, hi);
                if left.sign_verdict == SignVerdict::Negative {
                    lo = mid - quarter;
                }
                if right.sign_verdict == SignVerdict::Positive {
                    hi = mid + quarter;
                }
                if (lo, hi) == before {
                    notes.push(format!(
                        "inconclusive band around beta = {mid:.6}: neither {:.6} nor {:.6} gave the expected sign at {} walks",
                        mid - quarter,
                        mid + quarter,
                        budget.base_walks * budget.max_factor
                    ));
                    break;
                }
                notes.push(format!("inconclusive at beta = {mid:.6}; bracket kept wider around it"));
            }
        }
    }
    let mut note = format!(
        "negative at beta = {lo:.6} and positive at beta = {hi:.6}, each at z = {}; zero crossing lies between",
        config.z
    );
    for n in notes {
        note.push_str("; ");
        note.push_str(&n);
    }
    Ok(RootResult {
        d,
        mu,
        status: RootStatus::Bracketed,
        beta0_interval: [lo, hi],
        confidence_note: note,
        evaluations: s.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RootBudget {
        RootBudget { base_walks: 40, n_steps: 400, max_factor: 4, max_points: 20 }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(find_beta0(2, 0.0, 0.05, &small(), 1).is_err());
        assert!(find_beta0(2, 0.5, 0.001, &small(), 1).is_err());
        assert!(find_beta0(2, 0.5, 0.05, &RootBudget { base_walks: 1, ..small() }, 1).is_err());
    }

    #[test]
    fn brackets_and_replays() {
        let a = find_beta0(2, 1.0, 0.1, &small(), 5).unwrap();
        assert_eq!(a.status, RootStatus::Bracketed);
        let [lo, hi] = a.beta0_interval;
        assert!(lo < hi);
        let verdict_at = |b: f64| a.evaluations.iter().rev().find(|e| e.beta == b).unwrap().sign_verdict;
        assert_eq!(verdict_at(lo), SignVerdict::Negative);
        assert_eq!(verdict_at(hi), SignVerdict::Positive);
        assert_eq!(a, find_beta0(2, 1.0, 0.1, &small(), 5).unwrap());
    }

    #[test]
    fn no_root_is_a_report() {
        // with a tiny reverse drift the speed is positive almost everywhere, and
        // beta = 0 cannot be confidently negative at this budget
        let r = find_beta0(2, 0.01, 0.1, &RootBudget { max_factor: 1, ..small() }, 2).unwrap();
        assert_eq!(r.status, RootStatus::NoRoot);
        assert_eq!(r.beta0_interval, [0.0, 1.0]);
    }
}
