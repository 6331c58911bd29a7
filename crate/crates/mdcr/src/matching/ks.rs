//! Two-sample Kolmogorov-Smirnov distance and statistic, plus the source
//! measure representation used by cross-domain matching.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KsError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
}

/// A per-source distribution handle.
///
/// `Empirical` carries the sorted unit-variance source samples produced by
/// ICA. `Label` is the exact test double: it names the underlying error
/// distribution (by canonical id) and a sign, so that distances are exactly
/// zero or infinite with no sampling involved.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceDist {
    Empirical { sorted: Vec<f64> },
    Label { dist_id: usize, sign: i8 },
}

impl SourceDist {
    pub fn empirical(samples: &[f64]) -> Result<Self, KsError> {
        if samples.is_empty() {
            return Err(KsError::EmptySample);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(KsError::NonFiniteSample);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SourceDist::Empirical { sorted })
    }

    pub fn label(dist_id: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        SourceDist::Label { dist_id, sign }
    }

    /// The push-forward under `x -> -x`.
    pub fn negated(&self) -> Self {
        match self {
            SourceDist::Empirical { sorted } => {
                let flipped: Vec<f64> = sorted.iter().rev().map(|x| -x).collect();
                SourceDist::Empirical { sorted: flipped }
            }
            SourceDist::Label { dist_id, sign } => {
                SourceDist::Label { dist_id: *dist_id, sign: -sign }
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SourceDist::Empirical { sorted } => sorted.len(),
            SourceDist::Label { .. } => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact sup distance between the empirical CDFs of two sorted samples.
fn ks_distance_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < n || j < m {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n && a[i] == t {
            i += 1;
        }
        while j < m && b[j] == t {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if diff > sup {
            sup = diff;
        }
    }
    sup
}

/// Exact Kolmogorov-Smirnov distance between the empirical CDFs of `a` and
/// `b` (inputs need not be sorted).
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64, KsError> {
    if a.is_empty() || b.is_empty() {
        return Err(KsError::EmptySample);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ks_distance_sorted(&sa, &sb))
}

/// Two-sample test statistic `sqrt(n_a n_b / (n_a + n_b)) * d_KS`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, KsError> {
    let d = ks_distance(a, b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    Ok((n * m / (n + m)).sqrt() * d)
}

/// Sign-minimized statistic between two source measures.
///
/// Returns `(T, sign)` where `T = min(T(a, b), T(a, -b))` and `sign` records
/// which orientation achieved the minimum (`+1` direct, `-1` flipped; ties
/// prefer `+1`). Label measures compare exactly: zero if they name the same
/// distribution, infinite otherwise.
pub fn statistic_between(a: &SourceDist, b: &SourceDist) -> (f64, i8) {
    match (a, b) {
        (SourceDist::Empirical { sorted: sa }, SourceDist::Empirical { sorted: sb }) => {
            let n = sa.len() as f64;
            let m = sb.len() as f64;
            let scale = (n * m / (n + m)).sqrt();
            let direct = ks_distance_sorted(sa, sb);
            let flipped_b = b.negated();
            let SourceDist::Empirical { sorted: sbf } = &flipped_b else { unreachable!() };
            let flipped = ks_distance_sorted(sa, sbf);
            if flipped < direct {
                (scale * flipped, -1)
            } else {
                (scale * direct, 1)
            }
        }
        (SourceDist::Label { dist_id: da, sign: sa }, SourceDist::Label { dist_id: db, sign: sb }) => {
            if da == db {
                (0.0, sa * sb)
            } else {
                (f64::INFINITY, 1)
            }
        }
        // Mixing exact labels with empirical samples never matches.
        _ => (f64::INFINITY, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_samples_have_zero_distance() {
        let a = [0.3, -1.0, 2.5, 0.3];
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_singletons_have_distance_one() {
        assert_eq!(ks_distance(&[0.0], &[1.0]).unwrap(), 1.0);
        // T = sqrt(1/2) for two singletons at distance one.
        assert_relative_eq!(
            ks_statistic(&[0.0], &[1.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn interleaved_pair_distance() {
        // Step functions of {1, 2} vs {1.5, 2.5} stay 0.5 apart.
        assert_relative_eq!(ks_distance(&[1.0, 2.0], &[1.5, 2.5]).unwrap(), 0.5);
    }

    #[test]
    fn statistic_scales_with_common_size() {
        // Equal sizes n: T = sqrt(n / 2) * d.
        let a = [1.0, 1.0, 4.0, 4.0];
        let b = [1.0, 1.0, 1.0, 4.0];
        let d = ks_distance(&a, &b).unwrap();
        assert_relative_eq!(d, 0.25);
        assert_relative_eq!(ks_statistic(&a, &b).unwrap(), (4.0f64 / 2.0).sqrt() * d);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(ks_distance(&[], &[1.0]).unwrap_err(), KsError::EmptySample);
    }

    #[test]
    fn flip_of_itself_matches_with_negative_sign() {
        let samples = [0.1, 0.4, 0.9, 1.5, -0.2];
        let p = SourceDist::empirical(&samples).unwrap();
        let minus_p = p.negated();
        let (t, sign) = statistic_between(&p, &minus_p);
        assert_eq!(t, 0.0);
        assert_eq!(sign, -1);
    }

    #[test]
    fn label_measures_compare_exactly() {
        let a = SourceDist::label(3, 1);
        let b = SourceDist::label(3, -1);
        let c = SourceDist::label(4, 1);
        assert_eq!(statistic_between(&a, &b), (0.0, -1));
        assert_eq!(statistic_between(&a, &a), (0.0, 1));
        assert_eq!(statistic_between(&a, &c).0, f64::INFINITY);
    }

    /// Brute-force oracle: evaluate both empirical CDFs at every sample point.
    fn ks_brute(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], t: f64| s.iter().filter(|&&x| x <= t).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b.iter())
            .map(|&t| (cdf(a, t) - cdf(b, t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn merge_walk_matches_brute_force() {
        let mut rng = crate::rng::stream(99, &[0]);
        use rand::Rng;
        for _ in 0..1000 {
            let n = rng.random_range(1..30);
            let m = rng.random_range(1..30);
            // Integer grid forces ties within and across samples.
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..12) as f64 / 4.0).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.random_range(0..12) as f64 / 4.0).collect();
            let fast = ks_distance(&a, &b).unwrap();
            let slow = ks_brute(&a, &b);
            assert!((fast - slow).abs() <= 1e-15, "fast {fast} vs brute {slow}");
        }
    }
}
