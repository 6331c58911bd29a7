//! Random model generation.
//!
//! Shared latent edges follow an Erdős–Rényi law on the topologically ordered
//! shared block; domain-specific latents carry no latent edges. For each
//! shared node two partial pure children are planted (in two distinct domains
//! whenever possible), the remaining admissible observed edges are sampled,
//! and coverage edges are added so that every latent parents at least one
//! node in each of its domains. Coefficients are uniform on `±[low, high]`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MDomainGraph;
use crate::model::MdcrModel;
use crate::rng::Stream;
use crate::synthesis::{appendix_menu, duplicate_menu, ErrorSpec};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("total observed dimension {d} is not divisible by the number of domains {m}")]
    DimensionNotDivisible { d: usize, m: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("weight magnitudes [{low}, {high}] are not 0 < low <= high")]
    BadWeightRange { low: f64, high: f64 },
    #[error("domain_latent_sizes has {got} entries, expected m = {m}")]
    DomainSizeCount { got: usize, m: usize },
    #[error(
        "d_e = {d_e} is too small to host the pure children and coverage of domain {domain}; \
         minimum feasible d_e is {minimum}"
    )]
    DomainTooSmall { domain: usize, d_e: usize, minimum: usize },
    #[error("full-column-rank mixing not reached after {retries} regenerations")]
    RankRetriesExhausted { retries: usize },
}

/// How latent error distributions are assigned to latent indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorAssignment {
    /// The per-index standard menu (pairwise distinct, non-symmetric).
    #[default]
    Standard,
    /// Shared-block distributions replayed in the domain blocks.
    DuplicateAcrossDomains,
}

/// Generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Number of domains.
    pub m: usize,
    /// Number of shared latent nodes.
    pub ell: usize,
    /// Sizes of the domain-specific latent blocks (length `m`).
    pub domain_latent_sizes: Vec<usize>,
    /// Total observed dimension; each domain gets `d / m` nodes.
    pub d: usize,
    /// Edge probability of the shared latent graph.
    #[serde(default = "default_p_latent")]
    pub p_latent: f64,
    /// Edge probability for the remaining observed edges.
    #[serde(default = "default_p_obs")]
    pub p_obs: f64,
    /// Lower bound of coefficient magnitudes.
    #[serde(default = "default_weight_low")]
    pub weight_low: f64,
    /// Upper bound of coefficient magnitudes.
    #[serde(default = "default_weight_high")]
    pub weight_high: f64,
    /// Master seed for the generation stream.
    pub seed: u64,
    #[serde(default)]
    pub error_assignment: ErrorAssignment,
    /// When false, pure children are not planted (violates the sparsity
    /// condition the graph-recovery step relies on).
    #[serde(default = "default_true")]
    pub plant_pure_children: bool,
}

fn default_p_latent() -> f64 {
    0.75
}
fn default_p_obs() -> f64 {
    0.9
}
fn default_weight_low() -> f64 {
    0.25
}
fn default_weight_high() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

impl GenConfig {
    /// The default two-domain benchmark setting: `ell = 3`, two
    /// domain-specific latents per domain, `d = 30`.
    pub fn two_domain() -> Self {
        Self::benchmark(2)
    }

    /// Benchmark setting with `m` domains (`ell = 3`, `|I_e| = 2`, `d = 30`).
    pub fn benchmark(m: usize) -> Self {
        Self {
            m,
            ell: 3,
            domain_latent_sizes: vec![2; m],
            d: 30,
            p_latent: 0.75,
            p_obs: 0.9,
            weight_low: 0.25,
            weight_high: 1.0,
            seed: 0,
            error_assignment: ErrorAssignment::Standard,
            plant_pure_children: true,
        }
    }

    /// Wider setting: four domains, five shared latents, one domain-specific
    /// latent each, `d = 48`.
    pub fn four_domain_wide() -> Self {
        Self {
            m: 4,
            ell: 5,
            domain_latent_sizes: vec![1; 4],
            d: 48,
            ..Self::benchmark(4)
        }
    }

    /// A small configuration for fast tests.
    pub fn small() -> Self {
        Self { m: 2, ell: 2, domain_latent_sizes: vec![1, 1], d: 10, ..Self::benchmark(2) }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.domain_latent_sizes.len() != self.m {
            return Err(GenError::DomainSizeCount {
                got: self.domain_latent_sizes.len(),
                m: self.m,
            });
        }
        if self.d % self.m != 0 {
            return Err(GenError::DimensionNotDivisible { d: self.d, m: self.m });
        }
        for p in [self.p_latent, self.p_obs] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::BadProbability(p));
            }
        }
        if !(self.weight_low > 0.0 && self.weight_low <= self.weight_high) {
            return Err(GenError::BadWeightRange { low: self.weight_low, high: self.weight_high });
        }
        Ok(())
    }

    pub fn d_e(&self) -> usize {
        self.d / self.m
    }
}

/// Samples an m-domain graph according to the generation protocol.
pub fn sample_graph(cfg: &GenConfig, rng: &mut Stream) -> Result<MDomainGraph, GenError> {
    cfg.validate()?;
    let m = cfg.m;
    let ell = cfg.ell;
    let d_e = cfg.d_e();
    let h = ell + cfg.domain_latent_sizes.iter().sum::<usize>();

    // Feasibility. Full column rank of the per-domain mixing block needs
    // d_e >= ell + |I_e|; planting 2*ell pure children while keeping one
    // non-pure node per domain for coverage needs m * (d_e - 1) >= 2 * ell.
    let plant_minimum = if cfg.plant_pure_children && ell > 0 {
        if m >= 2 {
            2 * ell / m + usize::from(2 * ell % m != 0) + 1
        } else {
            2 * ell + 1
        }
    } else {
        0
    };
    for e in 0..m {
        let minimum = (ell + cfg.domain_latent_sizes[e]).max(plant_minimum);
        if d_e < minimum {
            return Err(GenError::DomainTooSmall { domain: e, d_e, minimum });
        }
    }

    // Shared latent DAG: Erdős–Rényi on the topologically ordered block.
    let mut latent_edges = Vec::new();
    for i in 0..ell {
        for j in (i + 1)..ell {
            if rng.random::<f64>() < cfg.p_latent {
                latent_edges.push((i, j));
            }
        }
    }

    let obs_offset = |e: usize| -> usize { e * d_e };
    // pure[v] = Some(k) marks v as a planted partial pure child of k.
    let mut pure: Vec<Option<usize>> = vec![None; m * d_e];
    if cfg.plant_pure_children {
        let mut free: Vec<Vec<usize>> = (0..m).map(|_e| (0..d_e).collect()).collect();
        for k in 0..ell {
            let hosts: Vec<usize> = if m >= 2 {
                // Two distinct domains with free slots, keeping one non-pure
                // node per domain in reserve for coverage edges.
                let mut candidates: Vec<usize> = (0..m).filter(|&e| free[e].len() > 1).collect();
                if candidates.len() < 2 {
                    candidates = (0..m).filter(|&e| !free[e].is_empty()).collect();
                }
                if candidates.len() < 2 {
                    return Err(GenError::DomainTooSmall {
                        domain: 0,
                        d_e,
                        minimum: 2 * ell / m + 2,
                    });
                }
                candidates.shuffle(rng);
                candidates.into_iter().take(2).collect()
            } else {
                vec![0, 0]
            };
            for e in hosts {
                if free[e].is_empty() {
                    return Err(GenError::DomainTooSmall { domain: e, d_e, minimum: 2 * ell + 1 });
                }
                let slot = rng.random_range(0..free[e].len());
                let local = free[e].swap_remove(slot);
                pure[obs_offset(e) + local] = Some(k);
            }
        }
    }

    let mut obs_edges = Vec::new();
    // Planted pure edges first.
    for (v, owner) in pure.iter().enumerate() {
        if let Some(k) = owner {
            obs_edges.push((*k, v));
        }
    }
    // Remaining shared-to-observed edges on non-pure nodes.
    for k in 0..ell {
        for v in 0..m * d_e {
            if pure[v].is_none() && rng.random::<f64>() < cfg.p_obs {
                obs_edges.push((k, v));
            }
        }
    }
    // Domain-specific latents parent their own domain (pure children allowed).
    let mut latent_start = ell;
    for e in 0..m {
        for k in latent_start..latent_start + cfg.domain_latent_sizes[e] {
            for local in 0..d_e {
                if rng.random::<f64>() < cfg.p_obs {
                    obs_edges.push((k, obs_offset(e) + local));
                }
            }
        }
        latent_start += cfg.domain_latent_sizes[e];
    }

    // Coverage: every shared latent needs a child in every domain, every
    // domain-specific latent a child in its own domain.
    let has_edge = |edges: &[(usize, usize)], k: usize, range: std::ops::Range<usize>| {
        edges.iter().any(|&(u, v)| u == k && range.contains(&v))
    };
    for k in 0..ell {
        for e in 0..m {
            let range = obs_offset(e)..obs_offset(e) + d_e;
            if !has_edge(&obs_edges, k, range.clone()) {
                let candidates: Vec<usize> = range.filter(|&v| pure[v].is_none()).collect();
                if candidates.is_empty() {
                    return Err(GenError::DomainTooSmall { domain: e, d_e, minimum: d_e + 1 });
                }
                let v = candidates[rng.random_range(0..candidates.len())];
                obs_edges.push((k, v));
            }
        }
    }
    let mut latent_start = ell;
    for e in 0..m {
        for k in latent_start..latent_start + cfg.domain_latent_sizes[e] {
            let range = obs_offset(e)..obs_offset(e) + d_e;
            if !has_edge(&obs_edges, k, range.clone()) {
                let v = obs_offset(e) + rng.random_range(0..d_e);
                obs_edges.push((k, v));
            }
        }
        latent_start += cfg.domain_latent_sizes[e];
    }
    debug_assert_eq!(h, latent_start);

    let graph = MDomainGraph::new(
        ell,
        cfg.domain_latent_sizes.clone(),
        vec![d_e; m],
        latent_edges,
        obs_edges,
    )
    .expect("generated indices are in range");
    debug_assert!(graph.validate().is_empty(), "generator produced an invalid graph");
    Ok(graph)
}

/// Fills edge coefficients with draws from `±Unif[low, high]` and attaches
/// the configured error distribution menu.
pub fn sample_weights(graph: &MDomainGraph, cfg: &GenConfig, rng: &mut Stream) -> MdcrModel {
    let h = graph.num_latents();
    let v = graph.num_observed();
    let draw = |rng: &mut Stream| -> f64 {
        let magnitude = rng.random_range(cfg.weight_low..=cfg.weight_high);
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    };
    let mut a = DMatrix::zeros(h, h);
    for (from, to) in graph.latent_edges() {
        a[(to, from)] = draw(rng);
    }
    let mut g = DMatrix::zeros(v, h);
    for (k, obs) in graph.obs_edges() {
        g[(obs, k)] = draw(rng);
    }
    let specs: Vec<ErrorSpec> = match cfg.error_assignment {
        ErrorAssignment::Standard => appendix_menu(h),
        ErrorAssignment::DuplicateAcrossDomains => {
            duplicate_menu(graph.num_shared(), graph.domain_latent_sizes())
        }
    };
    MdcrModel::new(graph.clone(), a, g, specs).expect("weights respect the graph support")
}

/// Numerical threshold below which a per-domain mixing block counts as rank
/// deficient.
pub const RANK_TOL: f64 = 1e-8;

/// Samples a complete model: graph plus weights, regenerating (up to 100
/// times) until every per-domain mixing block has full column rank
/// numerically.
pub fn sample_model(cfg: &GenConfig, rng: &mut Stream) -> Result<MdcrModel, GenError> {
    const MAX_RETRIES: usize = 100;
    for _ in 0..MAX_RETRIES {
        let graph = sample_graph(cfg, rng)?;
        let model = sample_weights(&graph, cfg, rng);
        if model.min_mixing_singular_value() > RANK_TOL {
            return Ok(model);
        }
    }
    Err(GenError::RankRetriesExhausted { retries: MAX_RETRIES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn benchmark_config_shape() {
        let cfg = GenConfig::two_domain();
        let mut rng = stream(cfg.seed, &[0]);
        let graph = sample_graph(&cfg, &mut rng).unwrap();
        assert_eq!(graph.observed_dims(), &[15, 15]);
        assert!(graph.validate().is_empty());
        for k in 0..3 {
            assert!(
                graph.partial_pure_children(k).unwrap().len() >= 2,
                "latent {k} lost its planted pure children"
            );
        }
    }

    #[test]
    fn empty_latent_graph_with_dense_support() {
        let cfg = GenConfig { p_latent: 0.0, p_obs: 1.0, ..GenConfig::two_domain() };
        let mut rng = stream(9, &[0]);
        let graph = sample_graph(&cfg, &mut rng).unwrap();
        assert_eq!(graph.shared_latent_edges(), vec![]);
        // Every admissible edge present: non-pure nodes have all shared
        // parents, every node has all its domain-specific parents.
        for e in 0..2 {
            for v in graph.domain_observed(e) {
                let shared: Vec<usize> =
                    graph.parents_of_observed(v).filter(|&k| k < 3).collect();
                let domain: Vec<usize> = graph
                    .parents_of_observed(v)
                    .filter(|&k| graph.domain_latents(e).contains(&k))
                    .collect();
                assert_eq!(domain.len(), 2, "node {v} misses domain-specific parents");
                assert!(shared.len() == 1 || shared.len() == 3);
            }
        }
    }

    #[test]
    fn fixed_seed_reproduces_graph_and_weights() {
        let cfg = GenConfig::two_domain();
        let a = sample_model(&cfg, &mut stream(cfg.seed, &[0])).unwrap();
        let b = sample_model(&cfg, &mut stream(cfg.seed, &[0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weights_within_bounds() {
        let cfg = GenConfig::two_domain();
        let mut rng = stream(21, &[0]);
        let model = sample_model(&cfg, &mut rng).unwrap();
        for (from, to) in model.graph().latent_edges() {
            let w = model.a()[(to, from)].abs();
            assert!((0.25..=1.0).contains(&w), "latent weight {w}");
        }
        for (k, v) in model.graph().obs_edges() {
            let w = model.g()[(v, k)].abs();
            assert!((0.25..=1.0).contains(&w), "observed weight {w}");
        }
    }

    #[test]
    fn graph_without_edges_gives_zero_matrices() {
        let empty = MDomainGraph::new(1, vec![0, 0], vec![1, 1], [], []).unwrap();
        let cfg = GenConfig::small();
        let mut rng = stream(2, &[0]);
        let model = sample_weights(&empty, &cfg, &mut rng);
        assert!(model.a().iter().all(|&x| x == 0.0));
        assert!(model.g().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn too_small_dimension_reports_minimum() {
        let cfg = GenConfig {
            d: 8, // d_e = 4 < ell + |I_e| = 5
            ..GenConfig::two_domain()
        };
        let mut rng = stream(3, &[0]);
        match sample_graph(&cfg, &mut rng) {
            Err(GenError::DomainTooSmall { minimum, .. }) => assert!(minimum >= 5),
            other => panic!("expected DomainTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn indivisible_dimension_rejected() {
        let cfg = GenConfig { d: 31, ..GenConfig::two_domain() };
        assert_eq!(
            cfg.validate(),
            Err(GenError::DimensionNotDivisible { d: 31, m: 2 })
        );
    }

    #[test]
    fn generated_models_satisfy_structural_conditions() {
        for seed in 0..30 {
            let cfg = GenConfig { seed, ..GenConfig::two_domain() };
            let mut rng = stream(seed, &[0]);
            let model = sample_model(&cfg, &mut rng).unwrap();
            assert!(model.graph().validate().is_empty());
            assert!(model.graph().satisfies_c3());
            assert!(model.min_mixing_singular_value() > RANK_TOL);
        }
    }
}
