//! Recovery of the shared latent coefficient matrix and DAG from the shared
//! columns of the assembled mixing matrix.
//!
//! Exact path (`exact = true`): rank decisions use a relative singular-value
//! threshold of `1e-10 * sigma_max` and triangularization must succeed with
//! (numerically) zero mass above the diagonal. Empirical path: rows are
//! dropped against the norm threshold `gamma`, pure pairs are ranked by the
//! smallest singular value of the Frobenius-normalized 2-row submatrix, and
//! triangularization minimizes the above-diagonal mass.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

/// Relative singular-value threshold for exact-path rank decisions.
pub const EXACT_RANK_TOL: f64 = 1e-10;

/// Row permutations beyond this size are not searched exhaustively.
pub const TRIANGULARIZE_CAP: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum RecoveryError {
    #[error("all {0} rows fall below the norm threshold")]
    AllRowsDropped(usize),
    #[error("found only {found} of {wanted} disjoint pure-child pairs")]
    NotEnoughPurePairs { found: usize, wanted: usize },
    #[error("matrix has {rows} usable rows but {wanted} pure pairs are required")]
    TooFewRows { rows: usize, wanted: usize },
    #[error("no permutation pair makes the matrix lower triangular (residual {residual:.3e})")]
    NotTriangularizable { residual: f64 },
    #[error("matrix of size {0} exceeds the exhaustive triangularization cap {cap}", cap = TRIANGULARIZE_CAP)]
    TriangularizeCap(usize),
    #[error("diagonal entry {index} of the triangularized matrix is (near) zero")]
    ZeroDiagonal { index: usize },
    #[error("triangularized matrix is singular")]
    Singular,
}

/// Removes rows with Euclidean norm `<= gamma` (`gamma = 0` drops exactly the
/// zero rows). Returns the reduced matrix and the kept row indices.
pub fn drop_zero_rows(
    b_star: &DMatrix<f64>,
    gamma: f64,
) -> Result<(DMatrix<f64>, Vec<usize>), RecoveryError> {
    let kept: Vec<usize> =
        (0..b_star.nrows()).filter(|&i| b_star.row(i).norm() > gamma).collect();
    if kept.is_empty() {
        return Err(RecoveryError::AllRowsDropped(b_star.nrows()));
    }
    Ok((b_star.select_rows(kept.iter()), kept))
}

/// Smallest and largest singular values of the two-row submatrix `{i, j}`.
fn pair_singular_values(b: &DMatrix<f64>, i: usize, j: usize) -> (f64, f64) {
    let sub = b.select_rows([i, j].iter());
    let svals = sub.svd(false, false).singular_values;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &s in svals.iter() {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if svals.len() < 2 {
        lo = 0.0;
    }
    (lo, hi)
}

/// Score of a candidate pair: smallest singular value of the Frobenius-
/// normalized 2 x ell submatrix. Scale-free, so one threshold works across
/// rows of very different magnitude. A single column is always rank one, so
/// its score is zero.
fn pair_score(b: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    if b.ncols() < 2 {
        return 0.0;
    }
    let sub = b.select_rows([i, j].iter());
    let norm = sub.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let svals = (sub / norm).svd(false, false).singular_values;
    svals.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// A selection of one pure-child pair per shared latent node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureChildAssignment {
    /// Row index pairs, one per shared node, in reduced-matrix indexing.
    pub pairs: Vec<(usize, usize)>,
    /// The representative row of each pair (the larger-norm element).
    pub representatives: Vec<usize>,
    /// The rank-one score of each selected pair.
    pub scores: Vec<f64>,
}

/// Finds `ell` disjoint row pairs that look rank one, with representatives
/// that are pairwise rank two.
///
/// Exact path: rank decisions via the relative threshold; the rank-one
/// relation partitions rows into classes and exactly `ell` classes of size
/// two or more must exist. Empirical path: candidate pairs are sorted by
/// ascending normalized score (ties prefer pairs spanning two domains, then
/// lowest indices) and accepted greedily subject to disjointness and all
/// cross-representative scores exceeding `gamma`.
pub fn find_pure_pairs(
    b_star: &DMatrix<f64>,
    ell: usize,
    gamma: f64,
    exact: bool,
    row_domains: Option<&[usize]>,
) -> Result<PureChildAssignment, RecoveryError> {
    let rows = b_star.nrows();
    if ell == 0 {
        return Ok(PureChildAssignment {
            pairs: Vec::new(),
            representatives: Vec::new(),
            scores: Vec::new(),
        });
    }
    if rows < 2 * ell {
        return Err(RecoveryError::TooFewRows { rows, wanted: ell });
    }
    let cross_domain = |i: usize, j: usize| -> bool {
        row_domains.map(|d| d[i] != d[j]).unwrap_or(false)
    };

    if exact {
        // Union rows into rank-one classes.
        let mut class: Vec<usize> = (0..rows).collect();
        fn root(class: &mut Vec<usize>, mut i: usize) -> usize {
            while class[i] != i {
                class[i] = class[class[i]];
                i = class[i];
            }
            i
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                let (lo, hi) = pair_singular_values(b_star, i, j);
                if lo <= EXACT_RANK_TOL * hi.max(1e-300) {
                    let (ri, rj) = (root(&mut class, i), root(&mut class, j));
                    if ri != rj {
                        class[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..rows {
            let r = root(&mut class, i);
            groups.entry(r).or_default().push(i);
        }
        let mut multi: Vec<Vec<usize>> =
            groups.into_values().filter(|g| g.len() >= 2).collect();
        if multi.len() != ell {
            return Err(RecoveryError::NotEnoughPurePairs { found: multi.len(), wanted: ell });
        }
        // Within a class prefer a cross-domain pair, then lowest indices.
        let mut pairs = Vec::with_capacity(ell);
        let mut scores = Vec::with_capacity(ell);
        for group in multi.iter_mut() {
            let mut chosen = (group[0], group[1]);
            'outer: for (a_pos, &a) in group.iter().enumerate() {
                for &b in group.iter().skip(a_pos + 1) {
                    if cross_domain(a, b) {
                        chosen = (a, b);
                        break 'outer;
                    }
                }
            }
            scores.push(pair_score(b_star, chosen.0, chosen.1));
            pairs.push(chosen);
        }
        let representatives = representatives_of(b_star, &pairs);
        return Ok(PureChildAssignment { pairs, representatives, scores });
    }

    // Empirical: greedy by ascending score.
    let mut candidates: Vec<(f64, bool, usize, usize)> = Vec::new();
    for i in 0..rows {
        for j in (i + 1)..rows {
            candidates.push((pair_score(b_star, i, j), !cross_domain(i, j), i, j));
        }
    }
    candidates.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });
    let mut used = vec![false; rows];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut scores = Vec::new();
    for &(score, _, i, j) in &candidates {
        if pairs.len() == ell {
            break;
        }
        if used[i] || used[j] {
            continue;
        }
        // Distinct latent check against every accepted representative.
        let rep_candidate = representative(b_star, i, j);
        let distinct = representatives_of(b_star, &pairs)
            .iter()
            .all(|&r| pair_score(b_star, r, rep_candidate) > gamma);
        if !distinct {
            continue;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((i, j));
        scores.push(score);
    }
    if pairs.len() < ell {
        return Err(RecoveryError::NotEnoughPurePairs { found: pairs.len(), wanted: ell });
    }
    let representatives = representatives_of(b_star, &pairs);
    Ok(PureChildAssignment { pairs, representatives, scores })
}

fn representative(b: &DMatrix<f64>, i: usize, j: usize) -> usize {
    if b.row(i).norm() >= b.row(j).norm() {
        i
    } else {
        j
    }
}

fn representatives_of(b: &DMatrix<f64>, pairs: &[(usize, usize)]) -> Vec<usize> {
    pairs.iter().map(|&(i, j)| representative(b, i, j)).collect()
}

/// Result of the triangularization search `w = r1 * m * r2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Triangularization {
    /// `row_perm[p]` is the source row of output row `p`.
    pub row_perm: Vec<usize>,
    /// `col_perm[q]` is the source column of output column `q`.
    pub col_perm: Vec<usize>,
    #[serde(skip)]
    pub w: DMatrix<f64>,
    /// Minimized mass above the diagonal, `sum_{i<j} w_ij^2`.
    pub residual: f64,
}

/// Finds permutation matrices making `m` as lower-triangular as possible,
/// minimizing the squared mass above the diagonal.
///
/// Row permutations are enumerated exhaustively (sizes up to
/// [`TRIANGULARIZE_CAP`]); for each row order the optimal column placement is
/// solved exactly by subset dynamic programming, so the returned pair attains
/// the global minimum. With `exact = true` the minimum must be numerically
/// zero (relative to the largest entry), otherwise an error is returned.
pub fn triangularize(m: &DMatrix<f64>, exact: bool) -> Result<Triangularization, RecoveryError> {
    let p = m.nrows();
    assert_eq!(p, m.ncols(), "triangularization needs a square matrix");
    if p > TRIANGULARIZE_CAP {
        return Err(RecoveryError::TriangularizeCap(p));
    }
    if p == 0 {
        return Ok(Triangularization {
            row_perm: vec![],
            col_perm: vec![],
            w: m.clone(),
            residual: 0.0,
        });
    }

    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut rows: Vec<usize> = (0..p).collect();
    permute(&mut rows, 0, &mut |row_perm: &[usize]| {
        // cost[c][pos]: squared mass of column c above the diagonal when
        // placed at output position pos, for this row order.
        let mut cost = vec![vec![0.0f64; p]; p];
        for c in 0..p {
            let mut acc = 0.0;
            for pos in 0..p {
                cost[c][pos] = acc;
                let v = m[(row_perm[pos], c)];
                acc += v * v;
            }
        }
        // Subset DP over columns assigned to the leading positions.
        let full = 1usize << p;
        let mut f = vec![f64::INFINITY; full];
        let mut choice = vec![usize::MAX; full];
        f[0] = 0.0;
        for mask in 1..full {
            let pos = (mask as u32).count_ones() as usize - 1;
            let mut best_here = f64::INFINITY;
            let mut best_col = usize::MAX;
            for c in 0..p {
                if mask & (1 << c) != 0 {
                    let prev = f[mask ^ (1 << c)];
                    let total = prev + cost[c][pos];
                    if total < best_here {
                        best_here = total;
                        best_col = c;
                    }
                }
            }
            f[mask] = best_here;
            choice[mask] = best_col;
        }
        let total = f[full - 1];
        if best.as_ref().map(|(b, _, _)| total < *b).unwrap_or(true) {
            let mut cols = vec![0usize; p];
            let mut mask = full - 1;
            while mask != 0 {
                let pos = (mask as u32).count_ones() as usize - 1;
                let c = choice[mask];
                cols[pos] = c;
                mask ^= 1 << c;
            }
            best = Some((total, row_perm.to_vec(), cols));
        }
    });

    let (residual, row_perm, col_perm) = best.expect("at least one permutation evaluated");
    let w = DMatrix::from_fn(p, p, |i, j| m[(row_perm[i], col_perm[j])]);
    if exact {
        let scale = m.amax();
        let tol = EXACT_RANK_TOL * scale.max(1e-300);
        let upper_ok = (0..p).all(|i| ((i + 1)..p).all(|j| w[(i, j)].abs() <= tol));
        if !upper_ok {
            return Err(RecoveryError::NotTriangularizable { residual });
        }
    }
    Ok(Triangularization { row_perm, col_perm, w, residual })
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Recovers the coefficient matrix from the triangularized pure-child block:
/// columns are sign-fixed to a positive diagonal, rows scaled to a unit
/// diagonal, and `a_hat = I - inv(w'')`. The diagonal of the result is zero.
pub fn recover_a(w: &DMatrix<f64>) -> Result<DMatrix<f64>, RecoveryError> {
    let p = w.nrows();
    assert_eq!(p, w.ncols());
    let scale = w.amax().max(1e-300);
    let mut fixed = w.clone();
    // Column signs from the diagonal.
    for j in 0..p {
        let d = fixed[(j, j)];
        if d.abs() <= EXACT_RANK_TOL * scale {
            return Err(RecoveryError::ZeroDiagonal { index: j });
        }
        if d < 0.0 {
            for i in 0..p {
                fixed[(i, j)] = -fixed[(i, j)];
            }
        }
    }
    // Row scaling to unit diagonal.
    for i in 0..p {
        let d = fixed[(i, i)];
        for j in 0..p {
            fixed[(i, j)] /= d;
        }
    }
    let inv = fixed.clone().try_inverse().ok_or(RecoveryError::Singular)?;
    let mut a_hat = DMatrix::identity(p, p) - inv;
    for i in 0..p {
        a_hat[(i, i)] = 0.0;
    }
    Ok(a_hat)
}

/// Thresholded edge extraction: edge `j -> i` iff `|a_hat[(i, j)]| > tau`.
/// The result is acyclic whenever `a_hat` comes from a triangularized block.
pub fn edges_from_a(a_hat: &DMatrix<f64>, tau: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for j in 0..a_hat.ncols() {
        for i in 0..a_hat.nrows() {
            if i != j && a_hat[(i, j)].abs() > tau {
                edges.push((j, i));
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Diagnostics of a full graph-recovery run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryDiagnostics {
    /// Rows of the shared block that survived the norm threshold.
    pub kept_rows: Vec<usize>,
    /// Pure pair selection in original (pre-drop) row indices.
    pub pairs: Vec<(usize, usize)>,
    pub pair_scores: Vec<f64>,
    /// Minimized above-diagonal mass of the triangularization.
    pub triangularity_residual: f64,
}

/// The recovered shared latent model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredLatentModel {
    pub ell_hat: usize,
    /// Coefficient estimate in the recovered (triangular) order.
    #[serde(serialize_with = "serialize_matrix")]
    pub a_hat: DMatrix<f64>,
    /// Edges `(from, to)` over the recovered latent labels.
    pub edges: Vec<(usize, usize)>,
    /// Row permutation of the triangularization (over representatives).
    pub row_perm: Vec<usize>,
    /// Column permutation of the triangularization: `col_perm[q]` is the
    /// shared column of the assembled matrix that became recovered node `q`.
    pub col_perm: Vec<usize>,
    pub diagnostics: RecoveryDiagnostics,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// End-to-end recovery from the shared columns of the assembled matrix.
///
/// `tau_edge` defaults to `gamma` when `None`. `row_domains`, when given,
/// lets tie-breaking prefer cross-domain pure pairs.
pub fn recover_shared_graph(
    b_star: &DMatrix<f64>,
    gamma: f64,
    tau_edge: Option<f64>,
    exact: bool,
    row_domains: Option<&[usize]>,
) -> Result<RecoveredLatentModel, RecoveryError> {
    let ell_hat = b_star.ncols();
    let drop_threshold = if exact { 0.0 } else { gamma };
    let (reduced, kept) = drop_zero_rows(b_star, drop_threshold)?;
    let reduced_domains: Option<Vec<usize>> =
        row_domains.map(|d| kept.iter().map(|&i| d[i]).collect());
    let assignment =
        find_pure_pairs(&reduced, ell_hat, gamma, exact, reduced_domains.as_deref())?;
    let block = reduced.select_rows(assignment.representatives.iter());
    let tri = triangularize(&block, exact)?;
    let a_hat = recover_a(&tri.w)?;
    let tau = if exact { 0.0 } else { tau_edge.unwrap_or(gamma) };
    let edges = edges_from_a(&a_hat, if exact { EXACT_RANK_TOL } else { tau });
    Ok(RecoveredLatentModel {
        ell_hat,
        a_hat,
        edges,
        row_perm: tri.row_perm.clone(),
        col_perm: tri.col_perm.clone(),
        diagnostics: RecoveryDiagnostics {
            kept_rows: kept.clone(),
            pairs: assignment
                .pairs
                .iter()
                .map(|&(i, j)| (kept[i], kept[j]))
                .collect(),
            pair_scores: assignment.scores,
            triangularity_residual: tri.residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn drop_rows_by_norm() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.09, 0.12]);
        let (kept, map) = drop_zero_rows(&m, 0.0).unwrap();
        assert_eq!(map, vec![0, 2]);
        assert_eq!(kept.nrows(), 2);
        // Row norm 0.15: dropped at 0.2, kept at 0.1.
        let (_, map) = drop_zero_rows(&m, 0.2).unwrap();
        assert_eq!(map, vec![0]);
        let (_, map) = drop_zero_rows(&m, 0.1).unwrap();
        assert_eq!(map, vec![0, 2]);
        assert!(matches!(
            drop_zero_rows(&m, 10.0),
            Err(RecoveryError::AllRowsDropped(3))
        ));
    }

    #[test]
    fn fixture_pure_pairs_found_exactly() {
        let model = crate::fixtures::two_domain_model(&crate::fixtures::TwoDomainWeights::generic());
        let b_shared = model.shared_mixing();
        let graph = model.graph();
        let domains: Vec<usize> =
            (0..graph.num_observed()).map(|v| graph.observed_domain(v)).collect();
        let assignment = find_pure_pairs(&b_shared, 2, 0.0, true, Some(&domains)).unwrap();
        let mut pairs = assignment.pairs.clone();
        pairs.iter_mut().for_each(|p| {
            if p.0 > p.1 {
                std::mem::swap(&mut p.0, &mut p.1)
            }
        });
        pairs.sort_unstable();
        // Pure children of node 0: rows 1 and 4; of node 1: rows 2 and 6.
        assert_eq!(pairs, vec![(1, 4), (2, 6)]);
    }

    #[test]
    fn single_latent_takes_first_pair() {
        // Every pair of nonzero rows of a one-column matrix has rank one.
        let m = DMatrix::from_row_slice(3, 1, &[1.0, -2.0, 0.5]);
        let assignment = find_pure_pairs(&m, 1, 0.2, false, None).unwrap();
        assert_eq!(assignment.pairs.len(), 1);
        assert_relative_eq!(assignment.scores[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn already_lower_triangular_is_left_alone() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.5, -1.0, 1.5]);
        let tri = triangularize(&m, true).unwrap();
        assert_eq!(tri.residual, 0.0);
        // The identity permutation attains the optimum; any optimal pair is
        // acceptable, but the search visits identity first.
        assert_eq!(tri.row_perm, vec![0, 1, 2]);
        assert_eq!(tri.col_perm, vec![0, 1, 2]);
    }

    #[test]
    fn upper_triangular_is_reversed() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]);
        let tri = triangularize(&m, true).unwrap();
        assert_eq!(tri.residual, 0.0);
        assert_eq!(tri.row_perm, vec![2, 1, 0]);
        assert_eq!(tri.col_perm, vec![2, 1, 0]);
    }

    fn all_perms(p: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..p).collect();
        permute(&mut items, 0, &mut |perm: &[usize]| out.push(perm.to_vec()));
        out
    }

    #[test]
    fn empirical_triangularization_matches_brute_force() {
        use rand::Rng;
        let mut rng = crate::rng::stream(23, &[0]);
        for _ in 0..40 {
            let p = rng.random_range(2..5);
            let m = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
            let tri = triangularize(&m, false).unwrap();
            // Brute force over all permutation pairs.
            let mut best = f64::INFINITY;
            for rp in all_perms(p) {
                for cp in all_perms(p) {
                    let mut mass = 0.0;
                    for i in 0..p {
                        for j in (i + 1)..p {
                            let v = m[(rp[i], cp[j])];
                            mass += v * v;
                        }
                    }
                    best = best.min(mass);
                }
            }
            assert_relative_eq!(tri.residual, best, epsilon = 1e-12);
        }
    }

    #[test]
    fn recover_a_identity_gives_empty_graph() {
        let w = DMatrix::<f64>::identity(3, 3);
        let a = recover_a(&w).unwrap();
        assert_eq!(a, DMatrix::zeros(3, 3));
        assert_eq!(edges_from_a(&a, 0.0), vec![]);
    }

    #[test]
    fn recover_a_two_by_two_algebra() {
        // W' = [[1, 0], [a, 1]] recovers A = [[0, 0], [a, 0]].
        let a21 = 0.7;
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, a21, 1.0]);
        let a = recover_a(&w).unwrap();
        assert_relative_eq!(a[(1, 0)], a21, epsilon = 1e-12);
        assert_relative_eq!(a[(0, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(a[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn edge_threshold_filters_small_entries() {
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(1, 0)] = 0.05;
        assert_eq!(edges_from_a(&a, 0.1), vec![]);
        assert_eq!(edges_from_a(&a, 0.01), vec![(0, 1)]);
    }

    #[test]
    fn fixture_recovery_returns_single_edge_weight() {
        // Exact end-to-end on the two-domain fixture: the recovered shared
        // coefficient matrix carries exactly the one true edge weight.
        let w = crate::fixtures::TwoDomainWeights::generic();
        let model = crate::fixtures::two_domain_model(&w);
        let b_shared = model.shared_mixing();
        let graph = model.graph();
        let domains: Vec<usize> =
            (0..graph.num_observed()).map(|v| graph.observed_domain(v)).collect();
        let recovered =
            recover_shared_graph(&b_shared, 0.0, None, true, Some(&domains)).unwrap();
        assert_eq!(recovered.ell_hat, 2);
        assert_eq!(recovered.edges.len(), 1);
        let nonzero: Vec<f64> = recovered
            .a_hat
            .iter()
            .copied()
            .filter(|v| v.abs() > 1e-9)
            .collect();
        assert_eq!(nonzero.len(), 1);
        assert_relative_eq!(nonzero[0].abs(), w.a21.abs(), epsilon = 1e-10);
    }
}
