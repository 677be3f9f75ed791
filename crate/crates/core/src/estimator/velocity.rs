use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{WalkParams, Walker};
use crate::par::{map_indexed_init, Execution};
use crate::rng::stream_rng;

/// Default z-score for a sign verdict.
pub const DEFAULT_Z: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignVerdict {
    Positive,
    Negative,
    Inconclusive,
}

impl SignVerdict {
    pub fn from_estimate(v: f64, stderr: f64, z: f64) -> Self {
        if v.abs() > z * stderr {
            if v > 0.0 {
                SignVerdict::Positive
            } else {
                SignVerdict::Negative
            }
        } else {
            SignVerdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignVerdict::Positive => "positive",
            SignVerdict::Negative => "negative",
            SignVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn symbol(self) -> char {
        match self {
            SignVerdict::Positive => '+',
            SignVerdict::Negative => '-',
            SignVerdict::Inconclusive => '?',
        }
    }
}

impl std::str::FromStr for SignVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(SignVerdict::Positive),
            "negative" => Ok(SignVerdict::Negative),
            "inconclusive" => Ok(SignVerdict::Inconclusive),
            other => Err(Error::Domain(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityEstimate {
    pub d: usize,
    pub beta: f64,
    pub mu: f64,
    /// Mean of `omega_n^{[1]} / n` over the walks.
    pub v1_hat: f64,
    pub stderr: f64,
    pub n_walks: usize,
    pub n_steps: usize,
    pub sign_verdict: SignVerdict,
    pub z: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub z: f64,
    pub exec: Execution,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { z: DEFAULT_Z, exec: Execution::default() }
    }
}

/// `omega_n^{[1]}` for walks `first..first + count` of seed `seed`.
pub fn endpoint_samples(params: &WalkParams, first: usize, count: usize, n_steps: usize, seed: u64, exec: Execution) -> Vec<i64> {
    map_indexed_init(
        exec,
        count,
        || Walker::new(*params, n_steps),
        |walker, i| {
            let mut rng = stream_rng(seed, (first + i) as u64);
            walker.endpoint_first_coord(n_steps, &mut rng)
        },
    )
}

/// Mean, standard error and verdict from endpoint samples.
pub fn summarize(params: &WalkParams, samples: &[i64], n_steps: usize, seed: u64, z: f64) -> VelocityEstimate {
    let n = samples.len() as i128;
    let s1: i128 = samples.iter().map(|&x| i128::from(x)).sum();
    let s2: i128 = samples.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
    let steps = n_steps as f64;
    let mean = s1 as f64 / n as f64;
    // (n s2 - s1^2) is exact, so the variance does not depend on summation order
    let var = if n > 1 { (n * s2 - s1 * s1) as f64 / (n * (n - 1)) as f64 } else { f64::NAN };
    let v1_hat = mean / steps;
    let stderr = (var / n as f64).sqrt() / steps;
    VelocityEstimate {
        d: params.d(),
        beta: params.beta(),
        mu: params.mu(),
        v1_hat,
        stderr,
        n_walks: samples.len(),
        n_steps,
        sign_verdict: SignVerdict::from_estimate(v1_hat, stderr, z),
        z,
        seed,
    }
}

fn check_budget(n_walks: usize, n_steps: usize) -> Result<()> {
    if n_walks < 2 {
        return Err(Error::Domain(format!("need at least 2 walks for a standard error (got {n_walks})")));
    }
    if n_steps == 0 {
        return Err(Error::domain("need at least 1 step"));
    }
    Ok(())
}

pub fn estimate_velocity(params: &WalkParams, n_walks: usize, n_steps: usize, seed: u64) -> Result<VelocityEstimate> {
    estimate_velocity_with(params, n_walks, n_steps, seed, &EstimatorConfig::default())
}

pub fn estimate_velocity_with(
    params: &WalkParams,
    n_walks: usize,
    n_steps: usize,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<VelocityEstimate> {
    check_budget(n_walks, n_steps)?;
    let samples = endpoint_samples(params, 0, n_walks, n_steps, seed, config.exec);
    Ok(summarize(params, &samples, n_steps, seed, config.z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, beta: f64, mu: f64) -> WalkParams {
        WalkParams::new(d, beta, mu).unwrap()
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(SignVerdict::from_estimate(0.5, 0.1, 4.0), SignVerdict::Positive);
        assert_eq!(SignVerdict::from_estimate(-0.5, 0.1, 4.0), SignVerdict::Negative);
        assert_eq!(SignVerdict::from_estimate(0.4, 0.1, 4.0), SignVerdict::Inconclusive);
        assert_eq!("negative".parse::<SignVerdict>().unwrap(), SignVerdict::Negative);
    }

    #[test]
    fn summary_statistics() {
        let p = params(2, 0.0, 0.0);
        let e = summarize(&p, &[2, 4, 6, 8], 2, 0, 3.0);
        assert_eq!(e.v1_hat, 2.5);
        // sample sd of {2,4,6,8} is sqrt(20/3)
        assert!((e.stderr - (20.0f64 / 3.0).sqrt() / 2.0 / 2.0).abs() < 1e-15);
        assert_eq!(e.sign_verdict, SignVerdict::Positive);
        assert_eq!(summarize(&p, &[2, 4, 6, 8], 2, 0, 4.0).sign_verdict, SignVerdict::Inconclusive);
    }

    #[test]
    fn order_does_not_matter() {
        let p = params(2, 0.3, 0.1);
        let a = summarize(&p, &[5, -3, 7, 1, 100], 10, 0, 4.0);
        let b = summarize(&p, &[100, 1, 7, -3, 5], 10, 0, 4.0);
        assert_eq!(a, b);
    }

    #[test]
    fn execution_modes_agree() {
        let p = params(3, 0.4, 0.6);
        let seq = estimate_velocity_with(&p, 50, 300, 9, &EstimatorConfig { z: 4.0, exec: Execution::Sequential }).unwrap();
        let par = estimate_velocity_with(&p, 50, 300, 9, &EstimatorConfig { z: 4.0, exec: Execution::Parallel }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn samples_extend_consistently() {
        let p = params(2, 0.5, 0.5);
        let all = endpoint_samples(&p, 0, 20, 100, 4, Execution::Sequential);
        let tail = endpoint_samples(&p, 12, 8, 100, 4, Execution::Sequential);
        assert_eq!(&all[12..], &tail[..]);
    }

    #[test]
    fn budget_checked() {
        let p = params(2, 0.5, 0.5);
        assert!(estimate_velocity(&p, 1, 10, 0).is_err());
        assert!(estimate_velocity(&p, 10, 0, 0).is_err());
    }

    #[test]
    fn excited_walk_moves_right() {
        let e = estimate_velocity(&params(2, 0.5, 0.0), 200, 2000, 1).unwrap();
        assert_eq!(e.sign_verdict, SignVerdict::Positive);
    }
}
