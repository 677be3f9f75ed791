use serde::{Deserialize, Serialize};

use super::velocity::{estimate_velocity_with, EstimatorConfig, SignVerdict, VelocityEstimate};
use crate::error::{Error, Result};
use crate::model::WalkParams;
use crate::par::{map_indexed, Execution};
use crate::rng::derive_seed;

/// `n` equally spaced points from 0 to 1.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Velocity estimates over a rectangular `(beta, mu)` grid at fixed `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub d: usize,
    pub beta_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    pub n_walks: usize,
    pub n_steps: usize,
    pub base_seed: u64,
    /// Row-major by `mu`: `cells[i_mu * beta_grid.len() + i_beta]`.
    pub cells: Vec<VelocityEstimate>,
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub d: usize,
    pub beta: f64,
    pub mu: f64,
    pub n_walks: usize,
    pub n_steps: usize,
    pub v1_hat: f64,
    pub stderr: f64,
    pub verdict: SignVerdict,
    pub seed: u64,
}

/// Shape of the verdicts along one `mu` row, read in increasing `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowShape {
    /// Negative cells, then inconclusive cells, then positive cells, with nothing else.
    pub single_crossing: bool,
    /// Length of the inconclusive run between the two signs (0 if none).
    pub inconclusive_band: usize,
}

impl PhaseGrid {
    pub fn cell(&self, i_beta: usize, i_mu: usize) -> &VelocityEstimate {
        &self.cells[i_mu * self.beta_grid.len() + i_beta]
    }

    pub fn row(&self, i_mu: usize) -> &[VelocityEstimate] {
        let w = self.beta_grid.len();
        &self.cells[i_mu * w..(i_mu + 1) * w]
    }

    pub fn rows(&self) -> Vec<GridRow> {
        self.cells
            .iter()
            .map(|c| GridRow {
                d: c.d,
                beta: c.beta,
                mu: c.mu,
                n_walks: c.n_walks,
                n_steps: c.n_steps,
                v1_hat: c.v1_hat,
                stderr: c.stderr,
                verdict: c.sign_verdict,
                seed: c.seed,
            })
            .collect()
    }

    pub fn row_shape(&self, i_mu: usize) -> RowShape {
        let verdicts: Vec<SignVerdict> = self.row(i_mu).iter().map(|c| c.sign_verdict).collect();
        let neg = verdicts.iter().take_while(|&&v| v == SignVerdict::Negative).count();
        let band = verdicts[neg..].iter().take_while(|&&v| v == SignVerdict::Inconclusive).count();
        let rest_positive = verdicts[neg + band..].iter().all(|&v| v == SignVerdict::Positive);
        RowShape { single_crossing: rest_positive, inconclusive_band: band }
    }

    /// Text map of the verdicts, largest `mu` on top.
    pub fn sign_map(&self) -> String {
        let mut out = String::new();
        for i_mu in (0..self.mu_grid.len()).rev() {
            out.push_str(&format!("mu={:<6.3} ", self.mu_grid[i_mu]));
            out.extend(self.row(i_mu).iter().map(|c| c.sign_verdict.symbol()));
            out.push('\n');
        }
        out
    }
}

pub fn phase_sweep(d: usize, beta_grid: &[f64], mu_grid: &[f64], n_walks: usize, n_steps: usize, base_seed: u64) -> Result<PhaseGrid> {
    phase_sweep_with(d, beta_grid, mu_grid, n_walks, n_steps, base_seed, &EstimatorConfig::default())
}

/// Sweep with an explicit configuration. Cell `k` (row-major) uses seed
/// `derive_seed(base_seed, k)`.
pub fn phase_sweep_with(
    d: usize,
    beta_grid: &[f64],
    mu_grid: &[f64],
    n_walks: usize,
    n_steps: usize,
    base_seed: u64,
    config: &EstimatorConfig,
) -> Result<PhaseGrid> {
    if beta_grid.is_empty() || mu_grid.is_empty() {
        return Err(Error::domain("grids must be nonempty"));
    }
    let params: Vec<WalkParams> = mu_grid
        .iter()
        .flat_map(|&mu| beta_grid.iter().map(move |&beta| WalkParams::new(d, beta, mu)))
        .collect::<Result<_>>()?;
    let inner = EstimatorConfig { exec: Execution::Sequential, ..*config };
    let cells = map_indexed(config.exec, params.len(), |k| {
        estimate_velocity_with(&params[k], n_walks, n_steps, derive_seed(base_seed, k as u64), &inner)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(PhaseGrid {
        d,
        beta_grid: beta_grid.to_vec(),
        mu_grid: mu_grid.to_vec(),
        n_walks,
        n_steps,
        base_seed,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        assert_eq!(uniform_grid(3), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_grid(21)[2], 0.1);
    }

    #[test]
    fn sweep_layout_and_replay() {
        let b = uniform_grid(3);
        let m = [0.0, 1.0];
        let g = phase_sweep(2, &b, &m, 20, 50, 7).unwrap();
        assert_eq!(g.cells.len(), 6);
        assert_eq!(g.cell(2, 1).beta, 1.0);
        assert_eq!(g.cell(2, 1).mu, 1.0);
        assert_eq!(g.cell(1, 0).seed, derive_seed(7, 1));
        let seq = phase_sweep_with(2, &b, &m, 20, 50, 7, &EstimatorConfig { z: 4.0, exec: Execution::Sequential }).unwrap();
        assert_eq!(g, seq);
    }

    #[test]
    fn invalid_grid_value_rejected() {
        assert!(phase_sweep(2, &[0.5, 1.5], &[0.0], 10, 10, 0).is_err());
    }

    fn with_verdicts(vs: &[SignVerdict]) -> PhaseGrid {
        let cell = |v: SignVerdict| VelocityEstimate {
            d: 2,
            beta: 0.0,
            mu: 0.0,
            v1_hat: 0.0,
            stderr: 0.0,
            n_walks: 2,
            n_steps: 1,
            sign_verdict: v,
            z: 4.0,
            seed: 0,
        };
        PhaseGrid {
            d: 2,
            beta_grid: vec![0.0; vs.len()],
            mu_grid: vec![0.0],
            n_walks: 2,
            n_steps: 1,
            base_seed: 0,
            cells: vs.iter().map(|&v| cell(v)).collect(),
        }
    }

    #[test]
    fn row_shapes() {
        use SignVerdict::*;
        let s = with_verdicts(&[Negative, Inconclusive, Inconclusive, Positive]).row_shape(0);
        assert_eq!(s, RowShape { single_crossing: true, inconclusive_band: 2 });
        assert!(with_verdicts(&[Inconclusive, Positive, Positive]).row_shape(0).single_crossing);
        assert!(!with_verdicts(&[Negative, Positive, Negative]).row_shape(0).single_crossing);
        assert!(!with_verdicts(&[Negative, Inconclusive, Positive, Inconclusive]).row_shape(0).single_crossing);
    }
}
