//! MDCR models: an m-domain graph together with the coefficient matrix `A` of
//! the latent linear structural equation system, the mixing matrix `G`, and a
//! per-latent error distribution.
//!
//! Matrix orientation: `A[(i, j)]` is the coefficient of the edge `j -> i`
//! (row = child), matching the row form `Z = A Z + eps`. The induced mixing
//! map is `B = G (I - A)^{-1}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MDomainGraph;
use crate::synthesis::ErrorSpec;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("A has shape {got:?}, expected {expected}x{expected}")]
    BadAShape { got: (usize, usize), expected: usize },
    #[error("G has shape {got:?}, expected {rows}x{cols}")]
    BadGShape { got: (usize, usize), rows: usize, cols: usize },
    #[error("A[({i}, {j})] = {value} lies outside the latent edge support")]
    ASupport { i: usize, j: usize, value: f64 },
    #[error("G[({v}, {k})] = {value} lies outside the observed edge support")]
    GSupport { v: usize, k: usize, value: f64 },
    #[error("expected {expected} error specs, got {got}")]
    ErrorSpecCount { got: usize, expected: usize },
    #[error("latent edges are cyclic; (I - A) is not invertible by substitution")]
    CyclicLatents,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

/// Graph plus parameters. Immutable after construction and safe to share.
#[derive(Debug, Clone, PartialEq)]
pub struct MdcrModel {
    graph: MDomainGraph,
    a: DMatrix<f64>,
    g: DMatrix<f64>,
    error_specs: Vec<ErrorSpec>,
    latent_topo: Vec<usize>,
}

impl MdcrModel {
    /// Builds a model, enforcing shapes, edge supports and acyclicity.
    pub fn new(
        graph: MDomainGraph,
        a: DMatrix<f64>,
        g: DMatrix<f64>,
        error_specs: Vec<ErrorSpec>,
    ) -> Result<Self, ModelError> {
        let h = graph.num_latents();
        let v = graph.num_observed();
        if a.shape() != (h, h) {
            return Err(ModelError::BadAShape { got: a.shape(), expected: h });
        }
        if g.shape() != (v, h) {
            return Err(ModelError::BadGShape { got: g.shape(), rows: v, cols: h });
        }
        if error_specs.len() != h {
            return Err(ModelError::ErrorSpecCount { got: error_specs.len(), expected: h });
        }
        for i in 0..h {
            for j in 0..h {
                if a[(i, j)] != 0.0 && !graph.latent_edges().any(|e| e == (j, i)) {
                    return Err(ModelError::ASupport { i, j, value: a[(i, j)] });
                }
            }
        }
        for v_idx in 0..v {
            for k in 0..h {
                if g[(v_idx, k)] != 0.0 && !graph.obs_edges().any(|e| e == (k, v_idx)) {
                    return Err(ModelError::GSupport { v: v_idx, k, value: g[(v_idx, k)] });
                }
            }
        }
        let latent_topo = graph.latent_topological_order().map_err(|_| ModelError::CyclicLatents)?;
        Ok(Self { graph, a, g, error_specs, latent_topo })
    }

    pub fn graph(&self) -> &MDomainGraph {
        &self.graph
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn error_specs(&self) -> &[ErrorSpec] {
        &self.error_specs
    }

    /// Identifier of the error distribution of latent `k`: the smallest latent
    /// index carrying an identical spec. Under pairwise-distinct error
    /// distributions this is `k` itself; with duplicated distributions the id
    /// collapses, which is exactly what distribution-level matching sees.
    pub fn dist_id(&self, k: usize) -> usize {
        (0..=k).find(|&j| self.error_specs[j] == self.error_specs[k]).unwrap_or(k)
    }

    /// Solves `(I - A) z = eps` in topological order. O(h + |edges|) given the
    /// cached order; exact for the exact-path tests.
    pub fn propagate(&self, eps: &[f64]) -> Vec<f64> {
        let h = self.graph.num_latents();
        debug_assert_eq!(eps.len(), h);
        let mut z = vec![0.0; h];
        for &i in &self.latent_topo {
            let mut acc = eps[i];
            for j in self.graph.parents_of_latent(i) {
                acc += self.a[(i, j)] * z[j];
            }
            z[i] = acc;
        }
        z
    }

    /// `(I - A)^{-1}` by back-substitution per column.
    pub fn latent_mixing(&self) -> DMatrix<f64> {
        let h = self.graph.num_latents();
        let mut inv = DMatrix::zeros(h, h);
        for j in 0..h {
            let mut eps = vec![0.0; h];
            eps[j] = 1.0;
            let col = self.propagate(&eps);
            for i in 0..h {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// The full mixing matrix `B = G (I - A)^{-1}` of shape `|V| x h`.
    pub fn mixing_matrix(&self) -> DMatrix<f64> {
        &self.g * self.latent_mixing()
    }

    /// The per-domain mixing matrix `B^e = G^e [(I - A)^{-1}]_{S_e, S_e}` of
    /// shape `d_e x s_e`, with columns ordered by `S_e` ascending.
    pub fn domain_mixing(&self, e: usize) -> DMatrix<f64> {
        let s_e = self.graph.latent_parent_set(e);
        let rows: Vec<usize> = self.graph.domain_observed(e).collect();
        self.mixing_matrix().select_rows(rows.iter()).select_columns(s_e.iter())
    }

    /// Columns of `B` indexed by the shared latent nodes.
    pub fn shared_mixing(&self) -> DMatrix<f64> {
        let cols: Vec<usize> = self.graph.shared_latents().collect();
        self.mixing_matrix().select_columns(cols.iter())
    }

    /// `A` restricted to the shared block.
    pub fn shared_a(&self) -> DMatrix<f64> {
        let ell = self.graph.num_shared();
        let mut out = DMatrix::zeros(ell, ell);
        for i in 0..ell {
            for j in 0..ell {
                out[(i, j)] = self.a[(i, j)];
            }
        }
        out
    }

    /// Smallest singular value over the per-domain mixing supports
    /// `G[V_e, S_e]`; positive iff every domain satisfies the full-column-rank
    /// condition numerically.
    pub fn min_mixing_singular_value(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for e in 0..self.graph.num_domains() {
            let s_e = self.graph.latent_parent_set(e);
            let rows: Vec<usize> = self.graph.domain_observed(e).collect();
            let ge = self.g.select_rows(rows.iter()).select_columns(s_e.iter());
            if ge.ncols() == 0 {
                continue;
            }
            let svals = ge.svd(false, false).singular_values;
            let smin = svals.iter().cloned().fold(f64::INFINITY, f64::min);
            worst = worst.min(smin);
        }
        worst
    }

    /// Flips the sign of every pure-child coefficient to positive. Used to
    /// test the sign half of the exact recovery guarantee.
    pub fn with_positive_pure_children(mut self) -> Self {
        for k in self.graph.shared_latents() {
            if let Ok(children) = self.graph.partial_pure_children(k) {
                for v in children {
                    self.g[(v, k)] = self.g[(v, k)].abs();
                }
            }
        }
        self
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            m: self.graph.num_domains(),
            ell: self.graph.num_shared(),
            domain_latent_sizes: self.graph.domain_latent_sizes().to_vec(),
            observed_dims: self.graph.observed_dims().to_vec(),
            latent_edges: self.graph.latent_edges().collect(),
            obs_edges: self.graph.obs_edges().collect(),
            a_entries: entries_of(&self.a),
            g_entries: entries_of(&self.g),
            error_specs: self.error_specs.clone(),
        }
    }

    pub fn from_json(doc: &ModelJson) -> Result<Self, ModelError> {
        let graph = MDomainGraph::new(
            doc.ell,
            doc.domain_latent_sizes.clone(),
            doc.observed_dims.clone(),
            doc.latent_edges.iter().copied(),
            doc.obs_edges.iter().copied(),
        )?;
        if graph.num_domains() != doc.m {
            return Err(ModelError::Json(format!(
                "m = {} does not match {} domain blocks",
                doc.m,
                graph.num_domains()
            )));
        }
        let h = graph.num_latents();
        let v = graph.num_observed();
        let mut a = DMatrix::zeros(h, h);
        for &(i, j, value) in &doc.a_entries {
            a[(i, j)] = value;
        }
        let mut g = DMatrix::zeros(v, h);
        for &(r, c, value) in &doc.g_entries {
            g[(r, c)] = value;
        }
        Self::new(graph, a, g, doc.error_specs.clone())
    }
}

fn entries_of(m: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// On-disk model document. Round-trips through serde_json without loss:
/// entries are sparse `(row, col, value)` triples, indices 0-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub m: usize,
    pub ell: usize,
    pub domain_latent_sizes: Vec<usize>,
    pub observed_dims: Vec<usize>,
    pub latent_edges: Vec<(usize, usize)>,
    pub obs_edges: Vec<(usize, usize)>,
    #[serde(rename = "A_entries")]
    pub a_entries: Vec<(usize, usize, f64)>,
    #[serde(rename = "G_entries")]
    pub g_entries: Vec<(usize, usize, f64)>,
    pub error_specs: Vec<ErrorSpec>,
}
