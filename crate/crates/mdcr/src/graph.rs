//! Multi-domain graphs: DAGs over shared latents, domain-specific latents and
//! per-domain observed nodes.
//!
//! Index conventions, used everywhere in this crate:
//! - latent nodes are `0..h` with the shared block `0..ell` first, followed by
//!   one consecutive block per domain (`domain_latent_sizes`);
//! - observed nodes are globally indexed `0..num_observed()`, domain blocks
//!   consecutive in domain order;
//! - a latent edge `(u, v)` is directed `u -> v`; an observed edge `(k, v)`
//!   points from latent `k` to observed node `v`.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Construction errors: the index sets themselves are malformed.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph needs at least one domain")]
    NoDomains,
    #[error("domain_latent_sizes has {got} entries, expected {expected}")]
    DomainSizeCount { got: usize, expected: usize },
    #[error("observed_dims has {got} entries, expected {expected}")]
    ObservedDimCount { got: usize, expected: usize },
    #[error("latent edge ({from}, {to}) out of range (h = {h})")]
    LatentEdgeRange { from: usize, to: usize, h: usize },
    #[error("observed edge ({latent}, {observed}) out of range (h = {h}, |V| = {v})")]
    ObsEdgeRange { latent: usize, observed: usize, h: usize, v: usize },
    #[error("self-loop on latent node {0}")]
    SelfLoop(usize),
    #[error("latent {0} is not a shared latent node")]
    NotShared(usize),
}

/// A violation of the structural definition of an m-domain graph.
///
/// Validation reports all problems at once instead of aborting on the first,
/// so callers (in particular the CLI) can surface a complete diagnosis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// The latent edge set contains a directed cycle.
    LatentCycle { witness: Vec<usize> },
    /// A shared latent node parents observed nodes in fewer than two domains.
    SharedLatentTooFewDomains { node: usize, domains: Vec<usize> },
    /// A domain-specific latent node parents observed nodes in two or more
    /// domains, so it would have to be shared.
    DomainLatentSpansDomains { node: usize, domains: Vec<usize> },
    /// A domain-specific latent node of block `e` parents no node of `V_e`
    /// (or parents a different single domain than its block says).
    DomainLatentBlockMismatch { node: usize, block: usize, domains: Vec<usize> },
    /// A latent edge connects the shared block and a domain block, or two
    /// distinct domain blocks.
    CrossBlockLatentEdge { from: usize, to: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LatentCycle { witness } => {
                write!(f, "latent edges contain a cycle through {witness:?}")
            }
            Violation::SharedLatentTooFewDomains { node, domains } => write!(
                f,
                "shared latent {node} parents observed nodes in {domains:?}, needs >= 2 domains"
            ),
            Violation::DomainLatentSpansDomains { node, domains } => write!(
                f,
                "domain-specific latent {node} parents observed nodes in multiple domains {domains:?}"
            ),
            Violation::DomainLatentBlockMismatch { node, block, domains } => write!(
                f,
                "latent {node} belongs to the block of domain {block} but parents domains {domains:?}"
            ),
            Violation::CrossBlockLatentEdge { from, to } => {
                write!(f, "latent edge {from} -> {to} connects distinct latent blocks")
            }
        }
    }
}

/// A DAG over latent nodes `H = L ∪ I_1 ∪ … ∪ I_m` and observed nodes
/// `V_1 ∪ … ∪ V_m`, where only latent nodes have children.
///
/// Immutable after construction; all queries are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MDomainGraph {
    num_domains: usize,
    ell: usize,
    domain_latent_sizes: Vec<usize>,
    observed_dims: Vec<usize>,
    latent_edges: BTreeSet<(usize, usize)>,
    obs_edges: BTreeSet<(usize, usize)>,
}

impl MDomainGraph {
    /// Builds a graph, checking only well-formedness of the index sets.
    /// Structural (definition-level) checks live in [`MDomainGraph::validate`].
    pub fn new(
        ell: usize,
        domain_latent_sizes: Vec<usize>,
        observed_dims: Vec<usize>,
        latent_edges: impl IntoIterator<Item = (usize, usize)>,
        obs_edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let m = domain_latent_sizes.len();
        if m == 0 {
            return Err(GraphError::NoDomains);
        }
        if observed_dims.len() != m {
            return Err(GraphError::ObservedDimCount { got: observed_dims.len(), expected: m });
        }
        let h = ell + domain_latent_sizes.iter().sum::<usize>();
        let v = observed_dims.iter().sum::<usize>();
        let latent_edges: BTreeSet<_> = latent_edges.into_iter().collect();
        let obs_edges: BTreeSet<_> = obs_edges.into_iter().collect();
        for &(from, to) in &latent_edges {
            if from >= h || to >= h {
                return Err(GraphError::LatentEdgeRange { from, to, h });
            }
            if from == to {
                return Err(GraphError::SelfLoop(from));
            }
        }
        for &(k, obs) in &obs_edges {
            if k >= h || obs >= v {
                return Err(GraphError::ObsEdgeRange { latent: k, observed: obs, h, v });
            }
        }
        Ok(Self { num_domains: m, ell, domain_latent_sizes, observed_dims, latent_edges, obs_edges })
    }

    pub fn num_domains(&self) -> usize {
        self.num_domains
    }

    /// Number of shared latent nodes, `ell`.
    pub fn num_shared(&self) -> usize {
        self.ell
    }

    /// Total number of latent nodes, `h`.
    pub fn num_latents(&self) -> usize {
        self.ell + self.domain_latent_sizes.iter().sum::<usize>()
    }

    pub fn num_observed(&self) -> usize {
        self.observed_dims.iter().sum()
    }

    pub fn observed_dims(&self) -> &[usize] {
        &self.observed_dims
    }

    pub fn domain_latent_sizes(&self) -> &[usize] {
        &self.domain_latent_sizes
    }

    pub fn latent_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.latent_edges.iter().copied()
    }

    pub fn obs_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.obs_edges.iter().copied()
    }

    /// Shared latent indices `0..ell`.
    pub fn shared_latents(&self) -> Range<usize> {
        0..self.ell
    }

    /// Latent indices of the block `I_e`.
    pub fn domain_latents(&self, e: usize) -> Range<usize> {
        let start = self.ell + self.domain_latent_sizes[..e].iter().sum::<usize>();
        start..start + self.domain_latent_sizes[e]
    }

    /// Global observed indices of `V_e`.
    pub fn domain_observed(&self, e: usize) -> Range<usize> {
        let start = self.observed_dims[..e].iter().sum::<usize>();
        start..start + self.observed_dims[e]
    }

    /// Domain that the global observed index `v` belongs to.
    pub fn observed_domain(&self, v: usize) -> usize {
        let mut acc = 0;
        for (e, &d) in self.observed_dims.iter().enumerate() {
            acc += d;
            if v < acc {
                return e;
            }
        }
        panic!("observed index {v} out of range");
    }

    /// Block of a latent node: `None` for shared, `Some(e)` for `I_e`.
    pub fn latent_block(&self, k: usize) -> Option<usize> {
        if k < self.ell {
            return None;
        }
        let mut acc = self.ell;
        for (e, &s) in self.domain_latent_sizes.iter().enumerate() {
            acc += s;
            if k < acc {
                return Some(e);
            }
        }
        panic!("latent index {k} out of range");
    }

    /// Latent parents of the observed node `v`.
    pub fn parents_of_observed(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.obs_edges.iter().filter(move |&&(_, w)| w == v).map(|&(k, _)| k)
    }

    /// Latent parents of the latent node `u`.
    pub fn parents_of_latent(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.latent_edges.iter().filter(move |&&(_, w)| w == u).map(|&(k, _)| k)
    }

    /// `S_e`: the sorted set of latent parents of domain `e`.
    pub fn latent_parent_set(&self, e: usize) -> Vec<usize> {
        let range = self.domain_observed(e);
        let set: BTreeSet<usize> = self
            .obs_edges
            .iter()
            .filter(|&&(_, v)| range.contains(&v))
            .map(|&(k, _)| k)
            .collect();
        set.into_iter().collect()
    }

    /// Domains in which latent `k` parents at least one observed node.
    fn domains_parented(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in 0..self.num_domains {
            let range = self.domain_observed(e);
            if self.obs_edges.iter().any(|&(u, v)| u == k && range.contains(&v)) {
                out.push(e);
            }
        }
        out
    }

    /// A topological order of the latent nodes, or the cycle witness.
    pub fn latent_topological_order(&self) -> Result<Vec<usize>, Violation> {
        let h = self.num_latents();
        let mut indeg = vec![0usize; h];
        for &(_, to) in &self.latent_edges {
            indeg[to] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..h).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(h);
        while let Some(&next) = ready.iter().next() {
            ready.remove(&next);
            order.push(next);
            for &(from, to) in &self.latent_edges {
                if from == next {
                    indeg[to] -= 1;
                    if indeg[to] == 0 {
                        ready.insert(to);
                    }
                }
            }
        }
        if order.len() == h {
            Ok(order)
        } else {
            let witness = (0..h).filter(|&i| indeg[i] > 0).collect();
            Err(Violation::LatentCycle { witness })
        }
    }

    /// Checks every structural clause of the m-domain definition and returns
    /// all violations. An empty list means the graph is a valid m-domain graph.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if let Err(cycle) = self.latent_topological_order() {
            violations.push(cycle);
        }
        // Shared latents must parent >= 2 domains; domain latents exactly
        // their own domain.
        for k in 0..self.num_latents() {
            let domains = self.domains_parented(k);
            match self.latent_block(k) {
                None => {
                    if domains.len() < 2 {
                        violations
                            .push(Violation::SharedLatentTooFewDomains { node: k, domains });
                    }
                }
                Some(e) => {
                    if domains.len() > 1 {
                        violations.push(Violation::DomainLatentSpansDomains { node: k, domains });
                    } else if domains != vec![e] {
                        violations.push(Violation::DomainLatentBlockMismatch {
                            node: k,
                            block: e,
                            domains,
                        });
                    }
                }
            }
        }
        // No latent edges between the shared block and domain blocks, nor
        // between two distinct domain blocks.
        for &(from, to) in &self.latent_edges {
            if self.latent_block(from) != self.latent_block(to) {
                violations.push(Violation::CrossBlockLatentEdge { from, to });
            }
        }
        violations
    }

    /// Partial pure children of the shared latent node `k`: observed nodes
    /// whose only shared-latent parent is `k` (domain-specific parents are
    /// allowed).
    pub fn partial_pure_children(&self, k: usize) -> Result<BTreeSet<usize>, GraphError> {
        if k >= self.ell {
            return Err(GraphError::NotShared(k));
        }
        let mut out = BTreeSet::new();
        for v in 0..self.num_observed() {
            let shared_parents: Vec<usize> =
                self.parents_of_observed(v).filter(|&u| u < self.ell).collect();
            if shared_parents == vec![k] {
                out.insert(v);
            }
        }
        Ok(out)
    }

    /// True iff every shared latent node has at least two partial pure
    /// children (in any combination of domains). Vacuously true for `ell = 0`.
    pub fn satisfies_c3(&self) -> bool {
        (0..self.ell).all(|k| self.partial_pure_children(k).map(|s| s.len() >= 2).unwrap_or(false))
    }

    /// Edges of the shared latent graph `G_L` (both endpoints shared).
    pub fn shared_latent_edges(&self) -> Vec<(usize, usize)> {
        self.latent_edges
            .iter()
            .copied()
            .filter(|&(a, b)| a < self.ell && b < self.ell)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_domain_fixture_is_valid() {
        let g = fixtures::two_domain_graph();
        assert_eq!(g.validate(), vec![]);
        assert_eq!(g.num_latents(), 5);
        assert_eq!(g.num_observed(), 9);
        assert_eq!(g.latent_parent_set(0), vec![0, 1, 2, 3]);
        assert_eq!(g.latent_parent_set(1), vec![0, 1, 4]);
    }

    #[test]
    fn cross_block_edge_is_reported() {
        let mut edges: Vec<(usize, usize)> = fixtures::two_domain_graph().latent_edges().collect();
        edges.push((0, 3)); // shared 0 -> domain-specific 3
        let g = MDomainGraph::new(
            2,
            vec![2, 1],
            vec![4, 5],
            edges,
            fixtures::two_domain_graph().obs_edges(),
        )
        .unwrap();
        let violations = g.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::CrossBlockLatentEdge { from: 0, to: 3 })));
    }

    #[test]
    fn latent_spanning_domains_is_reported() {
        // Latent 4 lives in the block of domain 1 but also parents domain 0.
        let base = fixtures::two_domain_graph();
        let mut obs: Vec<(usize, usize)> = base.obs_edges().collect();
        obs.push((4, 0));
        let g = MDomainGraph::new(2, vec![2, 1], vec![4, 5], base.latent_edges(), obs).unwrap();
        let violations = g.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DomainLatentSpansDomains { node: 4, .. })));
    }

    #[test]
    fn shared_latent_needs_two_domains() {
        // Shared latent 1 parents only domain 0.
        let g = MDomainGraph::new(
            2,
            vec![0, 0],
            vec![2, 2],
            [],
            [(0, 0), (0, 2), (1, 1)],
        )
        .unwrap();
        let violations = g.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::SharedLatentTooFewDomains { node: 1, .. })));
    }

    #[test]
    fn cycle_is_reported() {
        let g = MDomainGraph::new(
            1,
            vec![2],
            vec![3],
            [(1, 2), (2, 1)],
            [(0, 0), (1, 1), (2, 2)],
        );
        // ell = 1 with a single domain is structurally off, but the cycle check
        // must still fire.
        let g = g.unwrap();
        assert!(g.validate().iter().any(|v| matches!(v, Violation::LatentCycle { .. })));
    }

    #[test]
    fn pure_children_of_fixture() {
        let g = fixtures::two_domain_graph();
        // Domain 0 nodes are 0..4, domain 1 nodes are 4..9.
        let pure0: Vec<usize> = g.partial_pure_children(0).unwrap().into_iter().collect();
        assert_eq!(pure0, vec![1, 4]);
        let pure1: Vec<usize> = g.partial_pure_children(1).unwrap().into_iter().collect();
        assert_eq!(pure1, vec![2, 6]);
        assert!(g.satisfies_c3());
        assert!(g.partial_pure_children(2).is_err());
    }

    #[test]
    fn c3_fails_without_two_pure_children() {
        let base = fixtures::two_domain_graph();
        // Give node v^1_2 (global 1) a second shared parent; node 0 keeps only
        // one pure child.
        let mut obs: Vec<(usize, usize)> = base.obs_edges().collect();
        obs.push((1, 1));
        let g = MDomainGraph::new(2, vec![2, 1], vec![4, 5], base.latent_edges(), obs).unwrap();
        assert!(!g.satisfies_c3());
    }

    #[test]
    fn no_pure_children_yields_empty_set() {
        // Every observed node has both shared parents.
        let g = MDomainGraph::new(
            2,
            vec![0, 0],
            vec![2, 2],
            [],
            [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2), (0, 3), (1, 3)],
        )
        .unwrap();
        assert!(g.partial_pure_children(0).unwrap().is_empty());
        assert!(g.partial_pure_children(1).unwrap().is_empty());
    }

    #[test]
    fn c3_vacuous_for_zero_shared() {
        let g = MDomainGraph::new(0, vec![1, 1], vec![2, 2], [], [(0, 0), (0, 1), (1, 2), (1, 3)])
            .unwrap();
        assert!(g.satisfies_c3());
        assert_eq!(g.validate(), vec![]);
    }
}
