//! `G_d^{*n}(0)` from its Bessel integral.
//!
//! With `D` the simple random walk step law, `1/(1 - D^)^n = int t^{n-1} e^{-t(1 - D^)} dt / (n-1)!`
//! and the Fourier average of `e^{t D^}` factorizes into `I_0(t/d)^d`, so
//!
//! `G_d^{*n}(0) = int_0^inf t^{n-1} e^{-t} I_0(t/d)^d dt / (n-1)!`.
//!
//! The integral is taken in `s = ln t` up to a cutoff `T`. Beyond `T` the scaled
//! Bessel factor is bounded by its value of `sqrt(2 pi a) e^{-a} I_0(a)` at `a = T/d`
//! (that function decreases), which gives a closed-form tail.

use std::f64::consts::PI;

use super::bessel::{i0_asymptotic_ratio, i0_scaled};
use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Accuracy target: total error estimate must stay below this.
pub const INTEGRAL_TOLERANCE: f64 = 1e-8;
const TAIL_TARGET: f64 = 1e-13;
const QUAD_TOLERANCE: f64 = 1e-13;
const LOWER_LOG: f64 = -40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    /// Quadrature error plus the analytic bound on both cut-off ends.
    pub error_estimate: f64,
    pub cutoff: f64,
}

pub(crate) fn check_finite(d: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("convolution power n must be at least 1"));
    }
    if d <= 2 * n {
        return Err(Error::Divergent(format!("G_{d}^{{*{n}}}(0) is infinite: requires d > 2n")));
    }
    Ok(())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Upper bound on `int_T^inf t^{n-1} e^{-t} I_0(t/d)^d dt / (n-1)!`, valid for `T >= 10 d`.
fn tail_bound(d: usize, n: usize, cutoff: f64) -> f64 {
    let df = d as f64;
    let half = 0.5 * df;
    let c = i0_asymptotic_ratio(cutoff / df);
    (df * c.ln() + half * (df / (2.0 * PI)).ln() + (n as f64 - half) * cutoff.ln() - ln_factorial(n - 1)).exp()
        / (half - n as f64)
}

/// `G_d^{*n}(0)` by adaptive quadrature of the Bessel integral.
pub fn greens_power_integral(d: usize, n: usize) -> Result<IntegralValue> {
    check_finite(d, n)?;
    let df = d as f64;
    let mut cutoff = 10.0 * df;
    while tail_bound(d, n, cutoff) > TAIL_TARGET {
        cutoff *= 2.0;
        if !cutoff.is_finite() {
            return Err(Error::Accuracy(format!("no finite cutoff reaches the tail target for d = {d}, n = {n}")));
        }
    }
    let tail = tail_bound(d, n, cutoff);
    let log_norm = ln_factorial(n - 1);
    let nf = n as f64;
    let integrand = |s: f64| {
        let t = s.exp();
        (nf * s + df * i0_scaled(t / df).ln() - log_norm).exp()
    };
    let upper = cutoff.ln();
    let pieces = ((upper - LOWER_LOG) * 2.0).ceil() as usize;
    let q = integrate(integrand, LOWER_LOG, upper, pieces, QUAD_TOLERANCE, 20_000);
    // Below e^{-40} the integrand is at most t^{n-1}/(n-1)!.
    let head = (nf * LOWER_LOG - log_norm).exp() / nf;
    let error_estimate = q.error + tail + head;
    if !q.converged || error_estimate > INTEGRAL_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "G_{d}^{{*{n}}}(0): quadrature error estimate {error_estimate:.3e} exceeds {INTEGRAL_TOLERANCE:.0e} (value {:.12})",
            q.value
        )));
    }
    Ok(IntegralValue { value: q.value + 0.5 * (tail + head), error_estimate, cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_values() {
        let cases = [
            (5, 1, 1.156308124840231),
            (5, 2, 1.934941440382351),
            (7, 3, 2.357566933710458),
            (11, 1, 1.053136152908627),
            (12, 2, 1.160471902001145),
            (20, 3, 1.185816648495802),
        ];
        for (d, n, expected) in cases {
            let got = greens_power_integral(d, n).unwrap();
            assert!((got.value - expected).abs() < 1e-9, "d={d} n={n}: {} vs {expected}", got.value);
            assert!(got.error_estimate <= INTEGRAL_TOLERANCE);
        }
    }

    #[test]
    fn divergent_cases_rejected() {
        for (d, n) in [(2, 1), (4, 2), (6, 3)] {
            assert!(matches!(greens_power_integral(d, n), Err(Error::Divergent(_))));
        }
        assert!(matches!(greens_power_integral(5, 0), Err(Error::Domain(_))));
    }
}
