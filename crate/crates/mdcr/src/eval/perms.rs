//! Signed permutations and linear extensions.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PermError {
    #[error("edge ({from}, {to}) out of range for {nodes} nodes")]
    EdgeRange { from: usize, to: usize, nodes: usize },
    #[error("graph contains a cycle; no linear extension exists")]
    Cyclic,
}

/// A signed permutation. As a matrix, column `j` carries `signs[j]` in row
/// `perm[j]`; right-multiplication maps column `j` of the product to
/// `signs[j]` times column `perm[j]` of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(p: usize) -> Self {
        Self { perm: (0..p).collect(), signs: vec![1; p] }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_unsigned(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let p = self.perm.len();
        let mut m = DMatrix::zeros(p, p);
        for (j, (&i, &s)) in self.perm.iter().zip(self.signs.iter()).enumerate() {
            m[(i, j)] = s as f64;
        }
        m
    }
}

/// `b * psi` computed by column gather: column `j` of the result is
/// `signs[j] * b[:, perm[j]]`.
pub fn apply_right(b: &DMatrix<f64>, psi: &SignedPerm) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(b.nrows(), psi.len());
    for (j, (&src, &sign)) in psi.perm.iter().zip(psi.signs.iter()).enumerate() {
        for r in 0..b.nrows() {
            out[(r, j)] = sign as f64 * b[(r, src)];
        }
    }
    out
}

/// All permutations of `0..p` in lexicographic order.
pub fn permutations(p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(p);
    let mut used = vec![false; p];
    fn recurse(p: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == p {
            out.push(current.clone());
            return;
        }
        for i in 0..p {
            if !used[i] {
                used[i] = true;
                current.push(i);
                recurse(p, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    recurse(p, &mut current, &mut used, &mut out);
    out
}

/// All signed permutations of size `p` as (permutation, sign-vector) pairs in
/// lexicographic order, the all-positive sign vector first within each
/// permutation.
pub fn signed_permutations(p: usize) -> Vec<SignedPerm> {
    let mut out = Vec::new();
    for perm in permutations(p) {
        for mask in 0..(1u32 << p) {
            let signs: Vec<i8> =
                (0..p).map(|i| if mask & (1 << i) != 0 { -1 } else { 1 }).collect();
            out.push(SignedPerm { perm: perm.clone(), signs });
        }
    }
    out
}

/// All topological orderings of the DAG on `0..nodes` with the given edges,
/// as node sequences in lexicographic order.
pub fn linear_extensions(
    nodes: usize,
    edges: &[(usize, usize)],
) -> Result<Vec<Vec<usize>>, PermError> {
    for &(from, to) in edges {
        if from >= nodes || to >= nodes {
            return Err(PermError::EdgeRange { from, to, nodes });
        }
    }
    let mut indeg = vec![0usize; nodes];
    for &(_, to) in edges {
        indeg[to] += 1;
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(nodes);
    let mut placed = vec![false; nodes];
    fn recurse(
        nodes: usize,
        edges: &[(usize, usize)],
        indeg: &mut Vec<usize>,
        placed: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == nodes {
            out.push(current.clone());
            return;
        }
        for i in 0..nodes {
            if !placed[i] && indeg[i] == 0 {
                placed[i] = true;
                current.push(i);
                for &(from, to) in edges {
                    if from == i {
                        indeg[to] -= 1;
                    }
                }
                recurse(nodes, edges, indeg, placed, current, out);
                for &(from, to) in edges {
                    if from == i {
                        indeg[to] += 1;
                    }
                }
                current.pop();
                placed[i] = false;
            }
        }
    }
    recurse(nodes, edges, &mut indeg, &mut placed, &mut current, &mut out);
    if out.is_empty() && nodes > 0 {
        return Err(PermError::Cyclic);
    }
    Ok(out)
}

/// Converts an ordering (position -> node) into the position map
/// `sigma(node) = position`.
pub fn position_map(ordering: &[usize]) -> Vec<usize> {
    let mut sigma = vec![0usize; ordering.len()];
    for (pos, &node) in ordering.iter().enumerate() {
        sigma[node] = pos;
    }
    sigma
}

/// Exhaustively searches for per-block signed permutations `psi_k` such that
/// `b_hat` equals `b_true` with each column block right-multiplied by its
/// `psi_k` (entrywise within `tol`). Column blocks of both matrices are laid
/// out consecutively with the given sizes. Returns the block gauges, or
/// `None` when no product matches.
pub fn block_signed_perm_match(
    b_hat: &nalgebra::DMatrix<f64>,
    b_true: &nalgebra::DMatrix<f64>,
    block_sizes: &[usize],
    tol: f64,
) -> Option<Vec<SignedPerm>> {
    if b_hat.shape() != b_true.shape() {
        return None;
    }
    if block_sizes.iter().sum::<usize>() != b_true.ncols() {
        return None;
    }
    let mut gauges = Vec::with_capacity(block_sizes.len());
    let mut offset = 0;
    for &size in block_sizes {
        if size == 0 {
            gauges.push(SignedPerm::identity(0));
            continue;
        }
        let hat = b_hat.columns(offset, size).into_owned();
        let truth = b_true.columns(offset, size).into_owned();
        let found = signed_permutations(size).into_iter().find(|psi| {
            let candidate = apply_right(&truth, psi);
            (&hat - candidate).amax() <= tol
        })?;
        gauges.push(found);
        offset += size;
    }
    Some(gauges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_has_all_orderings() {
        let ext = linear_extensions(3, &[]).unwrap();
        assert_eq!(ext.len(), 6);
        assert_eq!(ext[0], vec![0, 1, 2]);
        assert_eq!(ext[5], vec![2, 1, 0]);
    }

    #[test]
    fn chain_has_only_identity() {
        let ext = linear_extensions(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(ext, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn collider_has_two_orderings() {
        let ext = linear_extensions(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(ext, vec![vec![0, 1, 2], vec![1, 0, 2]]);
    }

    #[test]
    fn cycle_is_an_error() {
        assert_eq!(linear_extensions(2, &[(0, 1), (1, 0)]).unwrap_err(), PermError::Cyclic);
    }

    #[test]
    fn extension_count_matches_filtered_permutations() {
        // Compare against brute-force filtering for a handful of DAGs.
        let cases: Vec<(usize, Vec<(usize, usize)>)> = vec![
            (4, vec![(0, 1), (0, 2)]),
            (4, vec![(0, 3), (1, 3), (2, 3)]),
            (5, vec![(0, 1), (1, 2), (0, 3)]),
            (6, vec![(0, 1), (2, 3), (4, 5)]),
        ];
        for (nodes, edges) in cases {
            let ext = linear_extensions(nodes, &edges).unwrap();
            let brute = permutations(nodes)
                .into_iter()
                .filter(|ord| {
                    let sigma = position_map(ord);
                    edges.iter().all(|&(a, b)| sigma[a] < sigma[b])
                })
                .count();
            assert_eq!(ext.len(), brute, "count mismatch for {edges:?}");
        }
    }

    #[test]
    fn signed_permutation_matrix_semantics() {
        let psi = SignedPerm { perm: vec![1, 0], signs: vec![-1, 1] };
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let gathered = apply_right(&b, &psi);
        let by_matrix = &b * psi.to_matrix();
        assert_eq!(gathered, by_matrix);
        assert_eq!(gathered[(0, 0)], -2.0);
        assert_eq!(gathered[(0, 1)], 1.0);
    }

    #[test]
    fn signed_enumeration_size_and_order() {
        let all = signed_permutations(3);
        assert_eq!(all.len(), 6 * 8);
        assert_eq!(all[0], SignedPerm::identity(3));
        // All-positive signs come first for each permutation.
        assert!(all[0].is_unsigned());
        assert!(!all[1].is_unsigned());
    }
}
