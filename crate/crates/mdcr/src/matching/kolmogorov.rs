//! Kolmogorov distribution quantiles, multiple-testing correction and the
//! false-discovery bound.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CriticalError {
    #[error("alpha = {0} must lie strictly inside (0, 1)")]
    AlphaRange(f64),
    #[error("no cross-domain tests: at least two domains with sources are required")]
    NoTests,
}

/// CDF of the Kolmogorov distribution (the sup-norm of a Brownian bridge).
///
/// Uses the alternating series `1 - 2 sum (-1)^{k-1} exp(-2 k^2 t^2)` for
/// large `t` and the theta-dual series for small `t`, where the alternating
/// form converges too slowly.
pub fn kolmogorov_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        let mut sum = 0.0;
        let mut k = 1.0f64;
        loop {
            let term = (-2.0 * k * k * t * t).exp();
            if term < 1e-18 {
                break;
            }
            sum += if (k as u64) % 2 == 1 { term } else { -term };
            k += 1.0;
        }
        1.0 - 2.0 * sum
    } else {
        let factor = (2.0 * std::f64::consts::PI).sqrt() / t;
        let mut sum = 0.0;
        let mut k = 1.0f64;
        loop {
            let expo = -(2.0 * k - 1.0).powi(2) * std::f64::consts::PI.powi(2) / (8.0 * t * t);
            let term = expo.exp();
            if term < 1e-18 {
                break;
            }
            sum += term;
            k += 1.0;
        }
        factor * sum
    }
}

/// The critical value `c_alpha = inf { t : P(sup |B| > t) <= alpha }`,
/// found by bisection on the survival function to 1e-8.
pub fn kolmogorov_critical(alpha: f64) -> Result<f64, CriticalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CriticalError::AlphaRange(alpha));
    }
    let target = 1.0 - alpha;
    let (mut lo, mut hi) = (1e-9, 10.0);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bonferroni-corrected level `alpha / t` with `t = 2 sum_{e<f} s_e s_f`
/// cross-domain tests.
pub fn bonferroni_level(alpha: f64, source_counts: &[usize]) -> Result<f64, CriticalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CriticalError::AlphaRange(alpha));
    }
    let t = total_tests(source_counts);
    if t == 0 {
        return Err(CriticalError::NoTests);
    }
    Ok(alpha / t as f64)
}

/// Total number of sign-resolved cross-domain tests.
pub fn total_tests(source_counts: &[usize]) -> usize {
    let mut t = 0;
    for e in 0..source_counts.len() {
        for f in (e + 1)..source_counts.len() {
            t += source_counts[e] * source_counts[f];
        }
    }
    2 * t
}

/// Probability bound on a tuple with `e_size` wrongly matched components
/// determining a shared node:
/// `g(n_min, max{kappa/2 - sqrt(n_max) / (sqrt(2) n_min) * c_alpha, 0})^{e_size - 1}`
/// with the DKW envelope `g(n, x) = 2 exp(-2 n x^2)`, clamped to 1.
pub fn false_discovery_bound(
    n_min: usize,
    n_max: usize,
    kappa: f64,
    c_alpha: f64,
    e_size: usize,
) -> f64 {
    let slack = kappa / 2.0 - (n_max as f64).sqrt() / (std::f64::consts::SQRT_2 * n_min as f64)
        * c_alpha;
    let x = slack.max(0.0);
    let g = 2.0 * (-2.0 * n_min as f64 * x * x).exp();
    g.powi(e_size.saturating_sub(1) as i32).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn critical_values_match_published_quantiles() {
        // Classical Kolmogorov distribution quantiles.
        assert!((kolmogorov_critical(0.05).unwrap() - 1.3581).abs() < 1e-4);
        assert!((kolmogorov_critical(0.5).unwrap() - 0.8276).abs() < 1e-4);
        assert!((kolmogorov_critical(0.01).unwrap() - 1.6276).abs() < 1e-4);
        assert!((kolmogorov_critical(0.10).unwrap() - 1.2238).abs() < 1e-4);
    }

    #[test]
    fn quantiles_are_monotone_in_alpha() {
        let mut last = f64::INFINITY;
        for alpha in [0.01, 0.05, 0.1, 0.3, 0.5, 0.9] {
            let c = kolmogorov_critical(alpha).unwrap();
            assert!(c < last, "c({alpha}) = {c} not below {last}");
            last = c;
        }
    }

    #[test]
    fn cdf_branches_agree_at_crossover() {
        // The alternating and theta series must agree where they meet.
        for t in [0.9, 0.999, 1.0, 1.001, 1.1] {
            let direct = {
                let mut sum = 0.0;
                for k in 1..200u64 {
                    let term = (-2.0 * (k * k) as f64 * t * t).exp();
                    sum += if k % 2 == 1 { term } else { -term };
                }
                1.0 - 2.0 * sum
            };
            assert_relative_eq!(kolmogorov_cdf(t), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        assert!(kolmogorov_critical(0.0).is_err());
        assert!(kolmogorov_critical(1.0).is_err());
    }

    #[test]
    fn bonferroni_counts_tests() {
        assert_relative_eq!(bonferroni_level(0.05, &[4, 3]).unwrap(), 0.05 / 24.0);
        assert_eq!(total_tests(&[1, 1]), 2);
        assert_eq!(total_tests(&[2, 2, 2]), 24);
        assert!(matches!(bonferroni_level(0.05, &[4]), Err(CriticalError::NoTests)));
    }

    #[test]
    fn bound_clamps_at_one_when_slack_vanishes() {
        // With x = 0 the envelope is 2 per factor, clamped to 1.
        let c = kolmogorov_critical(0.05).unwrap();
        let kappa_zero = 2.0 * (100.0f64).sqrt() / (std::f64::consts::SQRT_2 * 100.0) * c;
        let b = false_discovery_bound(100, 100, kappa_zero, c, 2);
        assert_eq!(b, 1.0);
    }

    #[test]
    fn bound_matches_hand_computed_plugin() {
        let c = kolmogorov_critical(0.05).unwrap();
        let n = 10_000;
        let x: f64 = 0.1 - (n as f64).sqrt() / (std::f64::consts::SQRT_2 * n as f64) * c;
        let expected = 2.0 * (-2.0 * n as f64 * x * x).exp();
        let b = false_discovery_bound(n, n, 0.2, c, 2);
        assert_relative_eq!(b, expected, epsilon = 1e-15);
        // Plug-in magnitude: 2 exp(-163.4...).
        assert!(b < 1e-70);
        assert!(x > 0.0903 && x < 0.0905);
    }

    #[test]
    fn bound_decreases_with_wrong_components() {
        let c = kolmogorov_critical(0.05).unwrap();
        let b2 = false_discovery_bound(10_000, 10_000, 0.2, c, 2);
        let b3 = false_discovery_bound(10_000, 10_000, 0.2, c, 3);
        assert!(b3 <= b2);
        assert_relative_eq!(b3, b2 * b2, epsilon = 1e-80);
    }
}
