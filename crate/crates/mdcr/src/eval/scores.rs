//! Estimation-error scores for the joint mixing matrix and the shared
//! coefficient matrix, both minimized over their respective gauge groups.

use nalgebra::DMatrix;
use thiserror::Error;

use super::perms::{linear_extensions, position_map, PermError};

/// Gauge dimensions beyond this require the approximate path.
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("matrices have {got} and {expected} rows; row counts must agree")]
    RowMismatch { got: usize, expected: usize },
    #[error("scores need at least one column on each side")]
    EmptyColumns,
    #[error("coefficient matrices must both be {expected}x{expected}, got {got:?}")]
    BadShape { expected: usize, got: (usize, usize) },
    #[error(
        "gauge dimension {0} exceeds the enumeration cap {cap}; pass approx = true to use the \
         greedy bound",
        cap = ENUMERATION_CAP
    )]
    EnumerationCap(usize),
    #[error(transparent)]
    Extensions(#[from] PermError),
}

/// Mixing-matrix score: the Frobenius error between the estimated shared
/// columns and the true shared columns, minimized over signed permutations
/// and normalized by the square root of the compared entry count
/// `beta = min(ell, ell_hat) * |V|`.
///
/// When `ell_hat <= ell`, signed column subsets of the truth are matched to
/// the estimate; when `ell_hat > ell`, signed column subsets of the estimate
/// are matched to the truth. Signs separate per column, so the minimization
/// runs over injections with per-column sign resolution, which enumerates the
/// same gauge group as `ell! * 2^ell` signed permutations.
pub fn score_b(
    b_hat_shared: &DMatrix<f64>,
    b_shared_true: &DMatrix<f64>,
    approx: bool,
) -> Result<f64, ScoreError> {
    let rows = b_hat_shared.nrows();
    if b_shared_true.nrows() != rows {
        return Err(ScoreError::RowMismatch { got: b_hat_shared.nrows(), expected: b_shared_true.nrows() });
    }
    let ell_hat = b_hat_shared.ncols();
    let ell = b_shared_true.ncols();
    if ell == 0 || ell_hat == 0 {
        return Err(ScoreError::EmptyColumns);
    }
    let big = ell.max(ell_hat);
    if big > ENUMERATION_CAP && !approx {
        return Err(ScoreError::EnumerationCap(big));
    }
    // cost[q][k]: best squared distance between fixed column q (small side)
    // and signed column k (big side).
    let (small_mat, big_mat) = if ell_hat <= ell {
        (b_hat_shared, b_shared_true)
    } else {
        (b_shared_true, b_hat_shared)
    };
    let small = small_mat.ncols();
    let cost: Vec<Vec<f64>> = (0..small)
        .map(|q| {
            (0..big)
                .map(|k| {
                    let mut direct = 0.0;
                    let mut flipped = 0.0;
                    for r in 0..rows {
                        let a = small_mat[(r, q)];
                        let b = big_mat[(r, k)];
                        direct += (a - b) * (a - b);
                        flipped += (a + b) * (a + b);
                    }
                    direct.min(flipped)
                })
                .collect()
        })
        .collect();
    let total = if approx && big > ENUMERATION_CAP {
        greedy_assignment(&cost, big)
    } else {
        exact_assignment(&cost, big)
    };
    let beta = (ell.min(ell_hat) * rows) as f64;
    Ok((total / beta).sqrt())
}

fn exact_assignment(cost: &[Vec<f64>], big: usize) -> f64 {
    let small = cost.len();
    let mut best = f64::INFINITY;
    let mut chosen = vec![false; big];
    fn recurse(
        cost: &[Vec<f64>],
        q: usize,
        small: usize,
        chosen: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
    ) {
        if acc >= *best {
            return;
        }
        if q == small {
            *best = acc;
            return;
        }
        for k in 0..chosen.len() {
            if !chosen[k] {
                chosen[k] = true;
                recurse(cost, q + 1, small, chosen, acc + cost[q][k], best);
                chosen[k] = false;
            }
        }
    }
    recurse(cost, 0, small, &mut chosen, 0.0, &mut best);
    best
}

fn greedy_assignment(cost: &[Vec<f64>], big: usize) -> f64 {
    let mut used = vec![false; big];
    let mut total = 0.0;
    for row in cost {
        let mut best = f64::INFINITY;
        let mut best_k = usize::MAX;
        for (k, &c) in row.iter().enumerate() {
            if !used[k] && c < best {
                best = c;
                best_k = k;
            }
        }
        used[best_k] = true;
        total += best;
    }
    total
}

/// Coefficient-matrix score together with the minimizing gauge element.
///
/// Minimizes `(1/ell) * ||T a_hat T' - a_true||_F` over transforms
/// `T = Q_sigma D` whose permutation part `sigma` is a linear extension of
/// the true shared graph: entry-wise the candidate is
/// `s[sigma(i)] s[sigma(j)] a_hat[sigma(i), sigma(j)]` compared against
/// `a_true[i, j]`. Sign vectors are enumerated with the all-positive vector
/// first and ties kept, so a sign-free optimum reports an unsigned gauge.
pub fn score_a_detailed(
    a_hat: &DMatrix<f64>,
    a_true: &DMatrix<f64>,
    shared_edges: &[(usize, usize)],
    approx: bool,
) -> Result<(f64, Vec<usize>, Vec<i8>), ScoreError> {
    let ell = a_true.nrows();
    if a_true.ncols() != ell || a_hat.shape() != (ell, ell) {
        return Err(ScoreError::BadShape { expected: ell, got: a_hat.shape() });
    }
    if ell == 0 {
        return Ok((0.0, Vec::new(), Vec::new()));
    }
    if ell > ENUMERATION_CAP && !approx {
        return Err(ScoreError::EnumerationCap(ell));
    }
    let orderings = linear_extensions(ell, shared_edges)?;
    let ordering_cap = if approx { 10_000 } else { usize::MAX };

    let mut best: Option<(f64, Vec<usize>, Vec<i8>)> = None;
    for ordering in orderings.iter().take(ordering_cap) {
        let sigma = position_map(ordering);
        // sigma maps true node -> recovered node. Global sign flips cancel,
        // so the first sign is pinned positive.
        let sign_masks = 1u64 << (ell - 1).min(63);
        for mask in 0..sign_masks {
            let mut signs = vec![1i8; ell];
            for (bit, sign) in signs.iter_mut().enumerate().skip(1) {
                if mask & (1 << (bit - 1)) != 0 {
                    *sign = -1;
                }
            }
            let mut sq = 0.0;
            for i in 0..ell {
                for j in 0..ell {
                    let candidate = signs[sigma[i]] as f64
                        * signs[sigma[j]] as f64
                        * a_hat[(sigma[i], sigma[j])];
                    let diff = candidate - a_true[(i, j)];
                    sq += diff * diff;
                }
            }
            if best.as_ref().map(|(b, _, _)| sq < *b).unwrap_or(true) {
                best = Some((sq, sigma.clone(), signs));
            }
        }
    }
    let (sq, sigma, signs) = best.expect("at least one linear extension exists");
    Ok((sq.sqrt() / ell as f64, sigma, signs))
}

/// Coefficient-matrix score; see [`score_a_detailed`].
pub fn score_a(
    a_hat: &DMatrix<f64>,
    a_true: &DMatrix<f64>,
    shared_edges: &[(usize, usize)],
    approx: bool,
) -> Result<f64, ScoreError> {
    score_a_detailed(a_hat, a_true, shared_edges, approx).map(|(s, _, _)| s)
}
