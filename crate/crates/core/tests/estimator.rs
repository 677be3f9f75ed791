mod common;

use erwd::coupling::beta_star_bound;
use erwd::enumeration::three_step_distribution;
use erwd::estimator::{endpoint_samples, estimate_velocity, SignVerdict};
use erwd::par::Execution;
use erwd::rng::derive_seed;
use erwd::{CookieField, WalkParams};

#[test]
fn three_step_endpoints_match_exact_law() {
    let p = WalkParams::new(2, 1.0, 1.0).unwrap();
    let samples = endpoint_samples(&p, 0, 1_000_000, 3, 21, Execution::Parallel);
    let mut obs = [0u64; 7];
    for x in samples {
        obs[(x + 3) as usize] += 1;
    }
    let law = three_step_distribution(&p, &CookieField::new()).unwrap();
    let n = 1e6;
    for (k, (&o, &q)) in obs.iter().zip(law.probs()).enumerate() {
        let sigma = (n * q * (1.0 - q)).sqrt();
        assert!((o as f64 - n * q).abs() <= 4.0 * sigma.max(1.0), "k={} observed {o}, expected {}", k as i32 - 3, n * q);
    }
    assert!(common::goodness_of_fit(&obs, law.probs()) > 1e-4);
}

#[test]
fn simple_random_walk_rarely_gets_a_sign() {
    let p = WalkParams::new(2, 0.0, 0.0).unwrap();
    let runs = 200;
    let wrong = (0..runs)
        .filter(|&r| estimate_velocity(&p, 50, 200, derive_seed(7, r)).unwrap().sign_verdict != SignVerdict::Inconclusive)
        .count();
    // Two-sided 4 sigma rate is 6e-5; allow a handful of heavy-tail misfires.
    assert!(wrong <= 2, "{wrong} of {runs}");
}

#[test]
fn simple_random_walk_speed_is_small() {
    let p = WalkParams::new(2, 0.0, 0.0).unwrap();
    let samples = endpoint_samples(&p, 0, 20, 1_000_000, 4, Execution::Parallel);
    let within = samples.iter().filter(|&&x| (x as f64 / 1e6).abs() < 0.01).count();
    assert_eq!(within, samples.len());
}

#[test]
fn below_beta_star_is_negative() {
    let b = beta_star_bound(2, 0.5).unwrap();
    assert!(b.beta_star > 0.02);
    let est = estimate_velocity(&WalkParams::new(2, 0.02, 0.5).unwrap(), 1000, 7000, 1).unwrap();
    assert_eq!(est.sign_verdict, SignVerdict::Negative, "{est:?}");
}

#[test]
fn ballistic_without_opposing_drift() {
    for d in [2, 3] {
        let est = estimate_velocity(&WalkParams::new(d, 0.1, 0.0).unwrap(), 1000, 7000, 2).unwrap();
        assert_eq!(est.sign_verdict, SignVerdict::Positive, "{est:?}");
    }
}
