//! Property tests for the metric, gauge and scaling invariants.

use mdcr::eval::{apply_right, score_b, signed_permutations};
use mdcr::ica::normalize_unit_variance;
use mdcr::matching::{ks_distance, match_domains, Correction, SourceDist};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Small sample vectors on a coarse grid, so ties are frequent.
fn grid_samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..16).prop_map(|k| k as f64 / 4.0), 1..20)
}

proptest! {
    #[test]
    fn ks_distance_is_a_metric(a in grid_samples(), b in grid_samples(), c in grid_samples()) {
        let dab = ks_distance(&a, &b).unwrap();
        let dba = ks_distance(&b, &a).unwrap();
        prop_assert_eq!(dab, dba);
        let dac = ks_distance(&a, &c).unwrap();
        let dbc = ks_distance(&b, &c).unwrap();
        prop_assert!(dac <= dab + dbc + 1e-12);
        prop_assert!((0.0..=1.0).contains(&dab));
        // Identity of indiscernibles on identical multisets.
        let daa = ks_distance(&a, &a).unwrap();
        prop_assert_eq!(daa, 0.0);
    }

    #[test]
    fn unit_variance_normalization_preserves_product(
        rows in 1usize..5,
        cols in 1usize..4,
        seed in 0u64..1000,
    ) {
        let mut rng = mdcr::rng::stream(seed, &[9]);
        use rand::Rng;
        let n = 50;
        let b = DMatrix::from_fn(rows.max(cols), cols, |_, _| rng.random_range(-2.0..2.0));
        let eta = DMatrix::from_fn(cols, n, |_, _| rng.random_range(-2.0..2.0) + 0.1);
        let (bh, eh) = normalize_unit_variance(&b, &eta).unwrap();
        let before = &b * &eta;
        let after = &bh * &eh;
        prop_assert!((before - after).amax() < 1e-10);
        for i in 0..cols {
            let var = eh.row(i).iter().map(|v| v * v).sum::<f64>() / n as f64;
            prop_assert!((var - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn matched_entries_unique_per_row_and_column(
        ids0 in prop::collection::vec(0usize..5, 1..6),
        ids1 in prop::collection::vec(0usize..5, 1..6),
    ) {
        let mk = |ids: &[usize]| -> Vec<SourceDist> {
            ids.iter().map(|&i| SourceDist::label(i, 1)).collect()
        };
        let sources = vec![mk(&ids0), mk(&ids1)];
        let decisions = match_domains(&sources, 0.05, Correction::Bonferroni).unwrap();
        for i in 0..ids0.len() {
            prop_assert!(decisions.iter().filter(|d| d.matched && d.sources.0 == i).count() <= 1);
        }
        for j in 0..ids1.len() {
            prop_assert!(decisions.iter().filter(|d| d.matched && d.sources.1 == j).count() <= 1);
        }
    }
}

#[test]
fn score_b_gauge_invariance_exhaustive() {
    // Every signed permutation of the columns scores zero, for widths up to 4.
    for ell in 1..=4usize {
        let mut rng = mdcr::rng::stream(ell as u64, &[77]);
        use rand::Rng;
        let b = DMatrix::from_fn(6, ell, |_, _| rng.random_range(-1.0..1.0));
        for psi in signed_permutations(ell) {
            let transformed = apply_right(&b, &psi);
            let score = score_b(&transformed, &b, false).unwrap();
            assert!(score < 1e-12, "ell={ell}, psi={psi:?}: score {score}");
        }
    }
}

#[test]
fn matching_ignores_sample_order() {
    // Matching consumes only per-domain marginals: permuting the sample order
    // inside a domain changes nothing.
    let mut rng = mdcr::rng::stream(5, &[3]);
    let spec = mdcr::synthesis::ErrorSpec::chi_square(4.0);
    let a = spec.standardized_sample(2000, &mut rng);
    let b = spec.standardized_sample(2000, &mut rng);
    let mut b_shuffled = b.clone();
    b_shuffled.reverse();
    b_shuffled.swap(0, 1000);
    let sources_direct = vec![
        vec![SourceDist::empirical(&a).unwrap()],
        vec![SourceDist::empirical(&b).unwrap()],
    ];
    let sources_shuffled = vec![
        vec![SourceDist::empirical(&a).unwrap()],
        vec![SourceDist::empirical(&b_shuffled).unwrap()],
    ];
    let d1 = match_domains(&sources_direct, 0.05, Correction::Bonferroni).unwrap();
    let d2 = match_domains(&sources_shuffled, 0.05, Correction::Bonferroni).unwrap();
    assert_eq!(d1, d2);
}
