//! Closed-form bounds built from Green's function values, and the numeric
//! certificates that rest on them.
//!
//! All quantities at dimension `d` use `G_{d-1}^{*n}` from a [`GreensTable`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::GreensTable;

/// `E_0`, `E_1`, `a_d` and `epsilon(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralConstants {
    pub d: usize,
    pub e0: f64,
    pub e1: f64,
    pub a_d: f64,
    /// `None` when `G_{d-1}^{*3}` is infinite (`d <= 7`).
    pub epsilon_d: Option<f64>,
}

/// `E_i(d) = (d/(d-1))^{i+1} G_{d-1}^{*(i+1)} - 1`.
pub fn e_constant(d: usize, i: usize, greens: &GreensTable) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("E_i(d) needs d >= 2"));
    }
    let ratio = d as f64 / (d - 1) as f64;
    Ok(ratio.powi(i as i32 + 1) * greens.value(d - 1, i + 1)? - 1.0)
}

/// `(E_0, E_1, a_d)`, which need only `G_{d-1}` and `G_{d-1}^{*2}`.
fn first_constants(d: usize, greens: &GreensTable) -> Result<(f64, f64, f64)> {
    let e0 = e_constant(d, 0, greens)?;
    let e1 = e_constant(d, 1, greens)?;
    let df = d as f64;
    let a_d = df * greens.value(d - 1, 2)? / ((df - 1.0) * (df - 1.0));
    Ok((e0, e1, a_d))
}

pub fn structural_constants(d: usize, greens: &GreensTable) -> Result<StructuralConstants> {
    let (e0, e1, a_d) = first_constants(d, greens)?;
    let df = d as f64;
    let g2 = greens.value(d - 1, 2)?;
    let epsilon_d = match greens.value(d - 1, 3) {
        Ok(g3) => {
            let g1 = greens.value(d - 1, 1)?;
            Some(2.0 * df * g1 * g3 / (df - 1.0).powi(4) + e1 * g2 / (df * (df - 1.0).powi(2)))
        }
        Err(Error::Divergent(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(StructuralConstants { d, e0, e1, a_d, epsilon_d })
}

/// Bounds on `sum_{x,y} sum_m |pi_m^(N)(x,y)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiBoundTotals {
    /// `N = 1`: `(beta+mu) E_0 / d`.
    pub first_order: f64,
    /// `N >= 2` summed; `None` when the ratio `(beta+mu) a_d` is at least 1.
    pub higher_orders: Option<f64>,
    pub ratio: f64,
}

pub fn pi_bound_totals(d: usize, beta: f64, mu: f64, greens: &GreensTable) -> Result<PiBoundTotals> {
    if !(0.0..=1.0).contains(&beta) || !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("beta and mu must lie in [0, 1] (got beta = {beta}, mu = {mu})")));
    }
    let (e0, e1, a_d) = first_constants(d, greens)?;
    let g1 = greens.value(d - 1, 1)?;
    let s = beta + mu;
    let df = d as f64;
    let ratio = s * a_d;
    let higher_orders = (ratio < 1.0).then(|| s * s * g1 * e1 / (df * (df - 1.0) * (1.0 - ratio)));
    Ok(PiBoundTotals { first_order: s * e0 / df, higher_orders, ratio })
}

/// Bound on `sum_{x,y} sum_m |pi_m^(N)(x,y)|` for a single order `N >= 1`.
pub fn pi_bound_order(d: usize, beta: f64, mu: f64, order: usize, greens: &GreensTable) -> Result<f64> {
    if order == 0 {
        return Err(Error::domain("expansion order N must be at least 1"));
    }
    let totals = pi_bound_totals(d, beta, mu, greens)?;
    if order == 1 {
        return Ok(totals.first_order);
    }
    let (_, e1, a_d) = first_constants(d, greens)?;
    let g1 = greens.value(d - 1, 1)?;
    let df = d as f64;
    Ok((beta + mu).powi(order as i32) * g1 * e1 * a_d.powi(order as i32 - 2) / (df * (df - 1.0)))
}

/// `d` times the summed bounds on `rho`, `chi` and `gamma` at `beta + mu = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeTotals {
    pub rho_total: f64,
    pub chi_total: f64,
    pub gamma_total: f64,
    pub grand_total: f64,
}

pub fn derivative_bound_totals(d: usize, greens: &GreensTable) -> Result<DerivativeTotals> {
    let c = structural_constants(d, greens)?;
    let one_minus = 1.0 - 2.0 * c.a_d;
    if one_minus <= 0.0 {
        return Err(Error::Divergent(format!("2 a_d = {:.6} is not below 1 at d = {d}", 2.0 * c.a_d)));
    }
    let epsilon = c
        .epsilon_d
        .ok_or_else(|| Error::Divergent(format!("epsilon(d) needs G_{}^{{*3}}, which is infinite", d - 1)))?;
    let g1 = greens.value(d - 1, 1)?;
    let g2 = greens.value(d - 1, 2)?;
    let g3 = greens.value(d - 1, 3)?;
    let df = d as f64;
    let dm = df - 1.0;
    let rho_total = 2.0 * c.e0 / df + 4.0 * g1 * c.e1 / (df * dm * one_minus);
    let chi_total = c.e0 + 2.0 * g1 * c.e1 * (2.0 - 2.0 * c.a_d) / (dm * one_minus * one_minus);
    let gamma_total = 2.0 * df * g2 / (dm * dm)
        + 4.0 * epsilon * df / one_minus
        + 16.0 * df * c.e1 * g1 * g3 / (dm.powi(4) * one_minus * one_minus);
    Ok(DerivativeTotals { rho_total, chi_total, gamma_total, grand_total: rho_total + chi_total + gamma_total })
}

/// `2 E_0 + 4 G_{d-1} E_1 / ((d-1)(1 - 2 a_d))`, which bounds `d` times all expansion
/// coefficients at `beta + mu = 2`.
pub fn positivity_expression(d: usize, greens: &GreensTable) -> Result<f64> {
    let (e0, e1, a_d) = first_constants(d, greens)?;
    let one_minus = 1.0 - 2.0 * a_d;
    if one_minus <= 0.0 {
        return Err(Error::Divergent(format!("2 a_d = {:.6} is not below 1 at d = {d}", 2.0 * a_d)));
    }
    let g1 = greens.value(d - 1, 1)?;
    Ok(2.0 * e0 + 4.0 * g1 * e1 / ((d - 1) as f64 * one_minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotEvaluable,
}

/// A strict inequality `value < threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub quantity: &'static str,
    pub value: Option<f64>,
    pub threshold: f64,
    /// `threshold - value`, rounded to 6 significant digits.
    pub margin: Option<f64>,
    pub note: Option<String>,
}

impl Certificate {
    fn from_result(quantity: &'static str, value: Result<f64>, threshold: f64) -> Self {
        match value {
            Ok(v) => Certificate {
                verdict: if v < threshold { Verdict::Pass } else { Verdict::Fail },
                quantity,
                value: Some(v),
                threshold,
                margin: Some(round_significant(threshold - v, 6)),
                note: None,
            },
            Err(e) => Certificate {
                verdict: Verdict::NotEvaluable,
                quantity,
                value: None,
                threshold,
                margin: None,
                note: Some(e.to_string()),
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn round_significant(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// The three certificate checks, all evaluated at one dimension. Field names give the
/// smallest dimension at which each check is expected to pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificates {
    /// `2 a_d < 1`: absolute summability of the velocity series.
    pub continuity_d6: Certificate,
    /// `rho + chi + gamma < 1`: the velocity is increasing in `beta`.
    pub monotonicity_d12: Certificate,
    /// The positivity expression is below 1.
    pub positivity_d9: Certificate,
}

impl Certificates {
    pub fn all_pass(&self) -> bool {
        self.continuity_d6.passed() && self.monotonicity_d12.passed() && self.positivity_d9.passed()
    }
}

pub fn certificates(d: usize, greens: &GreensTable) -> Certificates {
    let two_a = first_constants(d, greens).map(|(_, _, a_d)| 2.0 * a_d);
    Certificates {
        continuity_d6: Certificate::from_result("2 a_d", two_a, 1.0),
        monotonicity_d12: Certificate::from_result(
            "rho + chi + gamma",
            derivative_bound_totals(d, greens).map(|t| t.grand_total),
            1.0,
        ),
        positivity_d9: Certificate::from_result("2 E_0 + 4 G E_1 / ((d-1)(1 - 2 a_d))", positivity_expression(d, greens), 1.0),
    }
}

/// Everything computable at one `(d, beta, mu)`; entries that diverge are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub beta: f64,
    pub mu: f64,
    pub e0: f64,
    pub e1: f64,
    pub a_d: f64,
    pub epsilon_d: Option<f64>,
    pub pi_total_n1: f64,
    pub pi_total_tail: Option<f64>,
    pub rho_total: Option<f64>,
    pub chi_total: Option<f64>,
    pub gamma_total: Option<f64>,
    pub grand_total: Option<f64>,
    pub certificates: Certificates,
}

pub fn bound_report(d: usize, beta: f64, mu: f64, greens: &GreensTable) -> Result<BoundReport> {
    let c = structural_constants(d, greens)?;
    let pi = pi_bound_totals(d, beta, mu, greens)?;
    let deriv = derivative_bound_totals(d, greens).ok();
    Ok(BoundReport {
        d,
        beta,
        mu,
        e0: c.e0,
        e1: c.e1,
        a_d: c.a_d,
        epsilon_d: c.epsilon_d,
        pi_total_n1: pi.first_order,
        pi_total_tail: pi.higher_orders,
        rho_total: deriv.map(|t| t.rho_total),
        chi_total: deriv.map(|t| t.chi_total),
        gamma_total: deriv.map(|t| t.gamma_total),
        grand_total: deriv.map(|t| t.grand_total),
        certificates: certificates(d, greens),
    })
}
