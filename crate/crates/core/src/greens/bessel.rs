//! Exponentially scaled modified Bessel function of order zero.

use std::f64::consts::PI;

/// Below this argument the power series is summed directly.
const SERIES_LIMIT: f64 = 25.0;

/// `exp(-a) I_0(a)` for `a >= 0`, relative error around `1e-15`.
pub fn i0_scaled(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    if a <= SERIES_LIMIT {
        series(a) * (-a).exp()
    } else {
        asymptotic(a)
    }
}

/// `sqrt(2 pi a) exp(-a) I_0(a)`, which decreases to 1 for large `a`.
pub fn i0_asymptotic_ratio(a: f64) -> f64 {
    (2.0 * PI * a).sqrt() * i0_scaled(a)
}

fn series(a: f64) -> f64 {
    let q = 0.25 * a * a;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn asymptotic(a: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * k as f64 * a);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * PI * a).sqrt()
}
