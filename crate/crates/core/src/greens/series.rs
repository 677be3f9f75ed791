//! `G_d^{*n}(0) = sum_k C(n-1+k, k) r_k` from return probabilities.
//!
//! `r_k`, the probability that simple random walk in `Z^d` is at the origin after
//! `k` steps, is built one dimension at a time: of `k` steps in dimension `j`, a
//! Binomial(`k`, `1/j`) number move along the new axis and must return there, and
//! the rest form a walk in dimension `j - 1`.
//!
//! The sum is taken exactly up to `K`. Beyond `K` two tails are reported:
//! a bound from `r_k <= C k^{-d/2}`, and an estimate from the asymptotic expansion
//! `r_k = 2 (d / 2 pi k)^{d/2} (1 + c_1/k + c_2/k^2 + c_3/k^3 + ...)` for even `k`,
//! with the `c_i` fitted on `[K/2, K]` and the resulting sums done with the Hurwitz
//! zeta function.

use std::f64::consts::{LN_2, PI};

use super::integral::check_finite;
use crate::error::{Error, Result};

pub const DEFAULT_STEPS: usize = 10_000;
/// Largest accepted error estimate for [`SeriesValue::estimate`].
pub const SERIES_TOLERANCE: f64 = 1e-7;
const MIN_STEPS: usize = 200;
const WINDOW_SIGMAS: f64 = 20.0;

/// `r_k` for every dimension `1..=d_max` and `0 <= k <= k_max`.
#[derive(Debug, Clone)]
pub struct ReturnProbabilities {
    k_max: usize,
    by_dim: Vec<Vec<f64>>,
}

impl ReturnProbabilities {
    pub fn compute(d_max: usize, k_max: usize) -> Self {
        let lf = ln_factorials(k_max);
        let ln_p1 = |i: usize| lf[i] - 2.0 * lf[i / 2] - i as f64 * LN_2;
        let first: Vec<f64> = (0..=k_max).map(|k| if k % 2 == 0 { ln_p1(k).exp() } else { 0.0 }).collect();
        let mut by_dim = vec![first];
        for j in 2..=d_max {
            let p = 1.0 / j as f64;
            let (lp, lq) = (p.ln(), (1.0 - p).ln());
            let lower = &by_dim[j - 2];
            let mut r = vec![0.0; k_max + 1];
            for k in (0..=k_max).step_by(2) {
                let kf = k as f64;
                let sigma = (kf * p * (1.0 - p)).sqrt();
                let lo = (kf * p - WINDOW_SIGMAS * sigma - 2.0).max(0.0) as usize & !1;
                let hi = ((kf * p + WINDOW_SIGMAS * sigma + 2.0) as usize).min(k);
                let mut sum = 0.0;
                for i in (lo..=hi).step_by(2) {
                    let ln_binom = lf[k] - lf[i] - lf[k - i] + i as f64 * lp + (k - i) as f64 * lq;
                    sum += (ln_binom + ln_p1(i)).exp() * lower[k - i];
                }
                r[k] = sum;
            }
            by_dim.push(r);
        }
        ReturnProbabilities { k_max, by_dim }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn dims(&self) -> usize {
        self.by_dim.len()
    }

    pub fn get(&self, d: usize) -> Option<&[f64]> {
        d.checked_sub(1).and_then(|i| self.by_dim.get(i)).map(Vec::as_slice)
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// Exact partial sum up to `steps`, a lower bound.
    pub value_lower: f64,
    /// Bound on the omitted terms; `[value_lower, value_lower + tail_bound]` brackets the value.
    pub tail_bound: f64,
    /// Partial sum plus the fitted asymptotic tail.
    pub estimate: f64,
    pub estimate_error: f64,
    pub steps: usize,
}

/// `G_d^{*n}(0)` from the return-probability series truncated at `k_max` steps.
pub fn greens_power_series(d: usize, n: usize, k_max: usize) -> Result<SeriesValue> {
    check_finite(d, n)?;
    let table = ReturnProbabilities::compute(d, k_max & !1);
    series_from_return_probabilities(table.get(d).expect("computed"), d, n)
}

/// Same as [`greens_power_series`] with precomputed `r_k` for dimension `d`.
pub fn series_from_return_probabilities(r: &[f64], d: usize, n: usize) -> Result<SeriesValue> {
    check_finite(d, n)?;
    let k_max = (r.len().saturating_sub(1)) & !1;
    if k_max < MIN_STEPS {
        return Err(Error::Accuracy(format!("K = {k_max} is too small for a tail estimate (need at least {MIN_STEPS})")));
    }
    let df = d as f64;
    let half = 0.5 * df;
    let poly = binomial_polynomial(n);
    let weight = |k: usize| poly.iter().rev().fold(0.0, |acc, &c| acc * k as f64 + c);

    let mut partial = 0.0;
    let mut comp = 0.0;
    for k in (0..=k_max).step_by(2) {
        let t = weight(k) * r[k];
        let s = partial + t;
        comp += if partial.abs() >= t.abs() { (partial - s) + t } else { (t - s) + partial };
        partial = s;
    }
    let partial = partial + comp;

    let limit = 2.0 * (df / (2.0 * PI)).powf(half);
    let samples: Vec<(f64, f64)> = (k_max / 2..=k_max)
        .step_by(2)
        .map(|k| {
            let kf = k as f64;
            (k_max as f64 / kf, r[k] * kf.powf(half) / limit - 1.0)
        })
        .collect();
    let fit3 = least_squares(&samples, 3);
    let fit2 = least_squares(&samples, 2);
    let scale = |a: &[f64]| -> Vec<f64> {
        std::iter::once(1.0).chain(a.iter().enumerate().map(|(i, c)| c * (k_max as f64).powi(i as i32 + 1))).collect()
    };
    let corr3 = scale(&fit3);
    let corr2 = scale(&fit2);

    // sum over even k > K of k^{-s}
    let first = (k_max / 2 + 1) as f64;
    let even_sum = |s: f64| (-s * LN_2).exp() * hurwitz_zeta(s, first);
    let tail_with = |corr: &[f64]| -> f64 {
        let mut total = 0.0;
        for (j, &p) in poly.iter().enumerate() {
            for (i, &c) in corr.iter().enumerate() {
                total += p * c * even_sum(half - j as f64 + i as f64);
            }
        }
        limit * total
    };
    let tail3 = tail_with(&corr3);
    let tail2 = tail_with(&corr2);
    let last_term: f64 = poly
        .iter()
        .enumerate()
        .map(|(j, &p)| p * corr3[3].abs() * even_sum(half - j as f64 + 3.0))
        .sum::<f64>()
        * limit;
    // floating-point error of the partial sum
    let rounding = 1e-12 * partial;
    let estimate_error = (tail3 - tail2).abs() + last_term + rounding;

    let c_max = samples.iter().map(|&(_, y)| y + 1.0).fold(1.0, f64::max) * limit;
    let tail_bound: f64 = poly.iter().enumerate().map(|(j, &p)| p * c_max * even_sum(half - j as f64)).sum();

    if estimate_error > SERIES_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "G_{d}^{{*{n}}}(0) series at K = {k_max}: tail estimate error {estimate_error:.3e} exceeds {SERIES_TOLERANCE:.0e}"
        )));
    }
    Ok(SeriesValue { value_lower: partial - rounding, tail_bound: tail_bound + 2.0 * rounding, estimate: partial + tail3, estimate_error, steps: k_max })
}

/// Coefficients (constant first) of `k -> C(n-1+k, k)`.
fn binomial_polynomial(n: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for i in 1..n {
        let i = i as f64;
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j] += c;
            next[j + 1] += c / i;
        }
        poly = next;
    }
    poly
}

/// Least squares fit of `y = sum_{i=1}^{terms} a_i x^i`.
fn least_squares(samples: &[(f64, f64)], terms: usize) -> Vec<f64> {
    let mut ata = vec![vec![0.0; terms]; terms];
    let mut aty = vec![0.0; terms];
    for &(x, y) in samples {
        let basis: Vec<f64> = (1..=terms).map(|i| x.powi(i as i32)).collect();
        for i in 0..terms {
            aty[i] += basis[i] * y;
            for j in 0..terms {
                ata[i][j] += basis[i] * basis[j];
            }
        }
    }
    solve(ata, aty)
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("nonempty");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Hurwitz zeta `sum_{k >= 0} (a + k)^{-s}` for `s > 1`, `a > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const BERNOULLI: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    debug_assert!(s > 1.0 && a > 0.0);
    let shift = 12usize;
    let head: f64 = (0..shift).map(|k| (a + k as f64).powf(-s)).sum();
    let x = a + shift as f64;
    let mut sum = head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising = s (s+1) ... (s+2j-2), fact = (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        sum += b / fact * rising * power;
        let m = 2.0 * (j + 1) as f64;
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        power /= x * x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_known_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(1.5, 1.0) - 2.612375348685488).abs() < 1e-13);
        // zeta(3, 5001) ~ integral: 1/(2 a^2) + 1/(2 a^3)
        let a = 5001.0f64;
        let approx = 0.5 / (a * a) + 0.5 / (a * a * a) + 0.25 / a.powi(4);
        assert!(((hurwitz_zeta(3.0, a) - approx) / approx).abs() < 1e-10);
    }

    #[test]
    fn odd_steps_never_return() {
        let table = ReturnProbabilities::compute(4, 50);
        for d in 1..=4 {
            let r = table.get(d).unwrap();
            assert_eq!(r[0], 1.0);
            assert!(r.iter().skip(1).step_by(2).all(|&x| x == 0.0));
        }
    }

    #[test]
    fn small_step_counts_match_counting() {
        let table = ReturnProbabilities::compute(3, 4);
        // r_2 = 1/(2d); r_4 in 2d = 36/256
        assert!((table.get(3).unwrap()[2] - 1.0 / 6.0).abs() < 1e-15);
        assert!((table.get(2).unwrap()[4] - 36.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn binomial_polynomial_values() {
        let p = binomial_polynomial(3);
        let eval = |k: f64| p.iter().rev().fold(0.0, |acc, &c| acc * k + c);
        assert_eq!(eval(0.0), 1.0);
        assert!((eval(4.0) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn brackets_reference_values() {
        for (d, n, expected) in [(8, 1, 1.078647012016926), (8, 2, 1.289002789702236), (9, 3, 1.62536150147784)] {
            let s = greens_power_series(d, n, DEFAULT_STEPS).unwrap();
            assert!(s.value_lower <= expected && expected <= s.value_lower + s.tail_bound, "d={d} n={n}: {s:?}");
            assert!((s.estimate - expected).abs() < 1e-8, "d={d} n={n}: {s:?}");
        }
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(greens_power_series(8, 1, 100), Err(Error::Accuracy(_))));
        assert!(matches!(greens_power_series(6, 3, DEFAULT_STEPS), Err(Error::Divergent(_))));
    }
}
