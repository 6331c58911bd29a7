//! Tabulation of the false-discovery bound over parameter grids.

use serde::Serialize;

use crate::matching::{false_discovery_bound, kolmogorov_critical, CriticalError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub e_size: usize,
    pub c_alpha: f64,
    pub bound: f64,
}

/// Evaluates the false-discovery bound on the grid
/// `n_values x kappa_values x e_sizes` at level `alpha` (equal sample sizes
/// across domains).
pub fn bound_table(
    n_values: &[usize],
    kappa_values: &[f64],
    alpha: f64,
    e_sizes: &[usize],
) -> Result<Vec<BoundRow>, CriticalError> {
    let c_alpha = kolmogorov_critical(alpha)?;
    let mut rows = Vec::new();
    for &n in n_values {
        for &kappa in kappa_values {
            for &e_size in e_sizes {
                rows.push(BoundRow {
                    n,
                    kappa,
                    alpha,
                    e_size,
                    c_alpha,
                    bound: false_discovery_bound(n, n, kappa, c_alpha, e_size),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_matches_direct_evaluation() {
        let rows = bound_table(&[1000, 10_000], &[0.1, 0.2], 0.05, &[2, 3]).unwrap();
        assert_eq!(rows.len(), 8);
        let c = kolmogorov_critical(0.05).unwrap();
        for row in &rows {
            assert_relative_eq!(
                row.bound,
                false_discovery_bound(row.n, row.n, row.kappa, c, row.e_size),
                epsilon = 1e-15
            );
        }
        // |E| = 2 rows equal the single-factor envelope; squaring for |E| = 3.
        let b2 = rows.iter().find(|r| r.n == 10_000 && r.kappa == 0.2 && r.e_size == 2).unwrap();
        let b3 = rows.iter().find(|r| r.n == 10_000 && r.kappa == 0.2 && r.e_size == 3).unwrap();
        assert_relative_eq!(b3.bound, b2.bound * b2.bound, epsilon = 1e-80);
    }
}
