//! Small concrete models used in tests, docs and examples.
//!
//! The two-domain fixture has five latent nodes (shared `{0, 1}`, `I_1 =
//! {2, 3}`, `I_2 = {4}`), four observed nodes in domain 0 and five in domain
//! 1, latent edges `0 -> 1` and `2 -> 3`. Its mixing matrix expands in closed
//! form, which gives exactness tests an independent hand-written oracle.

use nalgebra::DMatrix;

use crate::graph::MDomainGraph;
use crate::model::MdcrModel;
use crate::synthesis::appendix_menu;

/// Support pattern of `G^1` over `S_1 = (0, 1, 2, 3)`: `true` where an edge
/// exists.
const G1_SUPPORT: [[bool; 4]; 4] = [
    [true, true, true, false],
    [true, false, true, false],
    [false, true, true, true],
    [true, true, true, true],
];

/// Support pattern of `G^2` over `S_2 = (0, 1, 4)`.
const G2_SUPPORT: [[bool; 3]; 5] = [
    [true, false, true],
    [true, true, true],
    [false, true, false],
    [true, true, true],
    [true, true, false],
];

/// Weights for the two-domain fixture, indexed like the support patterns.
#[derive(Debug, Clone)]
pub struct TwoDomainWeights {
    pub a21: f64,
    pub a43: f64,
    pub g1: [[f64; 4]; 4],
    pub g2: [[f64; 3]; 5],
}

impl TwoDomainWeights {
    /// Every supported coefficient equal to one.
    pub fn ones() -> Self {
        Self { a21: 1.0, a43: 1.0, g1: [[1.0; 4]; 4], g2: [[1.0; 3]; 5] }
    }

    /// Pairwise-distinct coefficients, so index mix-ups cannot cancel.
    pub fn generic() -> Self {
        let mut w = Self { a21: 0.45, a43: -0.6, g1: [[0.0; 4]; 4], g2: [[0.0; 3]; 5] };
        let mut value = 0.31;
        for row in 0..4 {
            for col in 0..4 {
                w.g1[row][col] = value;
                value += 0.07;
            }
        }
        for row in 0..5 {
            for col in 0..3 {
                w.g2[row][col] = -value;
                value += 0.05;
            }
        }
        w
    }
}

/// The two-domain example graph.
pub fn two_domain_graph() -> MDomainGraph {
    let latent_edges = [(0, 1), (2, 3)];
    let mut obs_edges = Vec::new();
    // Domain 0, S_1 = (0, 1, 2, 3), observed nodes 0..4.
    for (row, support) in G1_SUPPORT.iter().enumerate() {
        for (col, &present) in support.iter().enumerate() {
            if present {
                obs_edges.push((col, row));
            }
        }
    }
    // Domain 1, S_2 = (0, 1, 4), observed nodes 4..9.
    let s2 = [0usize, 1, 4];
    for (row, support) in G2_SUPPORT.iter().enumerate() {
        for (col, &present) in support.iter().enumerate() {
            if present {
                obs_edges.push((s2[col], 4 + row));
            }
        }
    }
    MDomainGraph::new(2, vec![2, 1], vec![4, 5], latent_edges, obs_edges).unwrap()
}

/// The two-domain example model with the given weights.
pub fn two_domain_model(w: &TwoDomainWeights) -> MdcrModel {
    let graph = two_domain_graph();
    let mut a = DMatrix::zeros(5, 5);
    a[(1, 0)] = w.a21;
    a[(3, 2)] = w.a43;
    let mut g = DMatrix::zeros(9, 5);
    for row in 0..4 {
        for col in 0..4 {
            if G1_SUPPORT[row][col] {
                g[(row, col)] = w.g1[row][col];
            }
        }
    }
    let s2 = [0usize, 1, 4];
    for row in 0..5 {
        for col in 0..3 {
            if G2_SUPPORT[row][col] {
                g[(4 + row, s2[col])] = w.g2[row][col];
            }
        }
    }
    MdcrModel::new(graph, a, g, appendix_menu(5)).unwrap()
}

/// The closed-form expansion of `B = G (I - A)^{-1}` for the two-domain
/// fixture, written out entry by entry.
pub fn two_domain_b_by_hand(w: &TwoDomainWeights) -> DMatrix<f64> {
    let (a21, a43) = (w.a21, w.a43);
    let g1 = &w.g1;
    let g2 = &w.g2;
    DMatrix::from_row_slice(
        9,
        5,
        &[
            a21 * g1[0][1] + g1[0][0], g1[0][1], g1[0][2], 0.0, 0.0,
            g1[1][0], 0.0, g1[1][2], 0.0, 0.0,
            a21 * g1[2][1], g1[2][1], a43 * g1[2][3] + g1[2][2], g1[2][3], 0.0,
            a21 * g1[3][1] + g1[3][0], g1[3][1], a43 * g1[3][3] + g1[3][2], g1[3][3], 0.0,
            g2[0][0], 0.0, 0.0, 0.0, g2[0][2],
            a21 * g2[1][1] + g2[1][0], g2[1][1], 0.0, 0.0, g2[1][2],
            a21 * g2[2][1], g2[2][1], 0.0, 0.0, 0.0,
            a21 * g2[3][1] + g2[3][0], g2[3][1], 0.0, 0.0, g2[3][2],
            a21 * g2[4][1] + g2[4][0], g2[4][1], 0.0, 0.0, 0.0,
        ],
    )
}
