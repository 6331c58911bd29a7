//! Seeded experiment sweeps over (m, n) grids with deterministic, ordered
//! aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{run_trial, PipelineParams, StageFailure, TrialConfig};
use crate::rng::derive_seed;
use crate::synthesis::{ErrorAssignment, GenConfig};

/// Sweep configuration: one model family crossed with domain counts and
/// sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ell: usize,
    /// Domain-specific latents per domain.
    pub domain_latent_size: usize,
    /// Total observed dimension (split evenly across domains).
    pub d: usize,
    #[serde(default = "default_p_latent")]
    pub p_latent: f64,
    #[serde(default = "default_p_obs")]
    pub p_obs: f64,
    #[serde(default = "default_weight_low")]
    pub weight_low: f64,
    #[serde(default = "default_weight_high")]
    pub weight_high: f64,
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: PipelineParams,
    #[serde(default)]
    pub error_assignment: ErrorAssignment,
    #[serde(default = "default_true")]
    pub plant_pure_children: bool,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub approx_scores: bool,
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

impl SweepConfig {
    /// The standard benchmark grid: `ell = 3`, two domain-specific latents,
    /// `d = 30`, domain counts {2, 3} and the usual sample-size ladder.
    pub fn benchmark() -> Self {
        Self {
            ell: 3,
            domain_latent_size: 2,
            d: 30,
            p_latent: 0.75,
            p_obs: 0.9,
            weight_low: 0.25,
            weight_high: 1.0,
            m_values: vec![2, 3],
            n_values: vec![1000, 2500, 5000, 10_000, 25_000],
            trials: 50,
            seed: 1,
            params: PipelineParams::default(),
            error_assignment: ErrorAssignment::Standard,
            plant_pure_children: true,
            oracle: false,
            approx_scores: false,
        }
    }

    /// Wider preset: four domains, five shared latents, one specific latent.
    pub fn four_domain_wide() -> Self {
        Self {
            ell: 5,
            domain_latent_size: 1,
            d: 48,
            m_values: vec![4],
            ..Self::benchmark()
        }
    }

    /// Violated-assumption preset: duplicated error distributions.
    pub fn duplicate_noise() -> Self {
        Self { error_assignment: ErrorAssignment::DuplicateAcrossDomains, ..Self::benchmark() }
    }

    /// Violated-assumption preset: no planted pure children.
    pub fn no_pure_children() -> Self {
        Self { plant_pure_children: false, ..Self::benchmark() }
    }

    /// The generator configuration of one grid cell. The cell seed is derived
    /// from the master seed and `(m, n)`, so results are stable under grid
    /// reordering or extension.
    pub fn cell_gen(&self, m: usize, n: usize) -> GenConfig {
        GenConfig {
            m,
            ell: self.ell,
            domain_latent_sizes: vec![self.domain_latent_size; m],
            d: self.d,
            p_latent: self.p_latent,
            p_obs: self.p_obs,
            weight_low: self.weight_low,
            weight_high: self.weight_high,
            seed: derive_seed(self.seed, &[m as u64, n as u64]),
            error_assignment: self.error_assignment,
            plant_pure_children: self.plant_pure_children,
        }
    }

    pub fn cell_trial_config(&self, m: usize, n: usize) -> TrialConfig {
        TrialConfig {
            gen: self.cell_gen(m, n),
            n,
            params: self.params.clone(),
            oracle: self.oracle,
            approx_scores: self.approx_scores,
        }
    }

    /// All `(m, n, trial)` keys of the grid in deterministic order.
    pub fn trial_keys(&self) -> Vec<(usize, usize, u64)> {
        let mut keys = Vec::new();
        for &m in &self.m_values {
            for &n in &self.n_values {
                for t in 0..self.trials {
                    keys.push((m, n, t as u64));
                }
            }
        }
        keys
    }
}

/// One persisted trial row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub m: usize,
    pub n: usize,
    pub trial: u64,
    pub ell_true: usize,
    pub ell_hat: Option<usize>,
    pub score_b: Option<f64>,
    pub score_a: Option<f64>,
    pub failure_stage: Option<String>,
    pub failure_message: Option<String>,
}

/// Runs one grid trial.
pub fn run_cell_trial(cfg: &SweepConfig, m: usize, n: usize, trial: u64) -> TrialRow {
    let result = run_trial(&cfg.cell_trial_config(m, n), trial);
    let (failure_stage, failure_message) = match &result.failure {
        Some(StageFailure { stage, message }) => {
            (Some(stage.to_string()), Some(message.clone()))
        }
        None => (None, None),
    };
    TrialRow {
        m,
        n,
        trial,
        ell_true: result.ell_true,
        ell_hat: result.ell_hat,
        score_b: result.score_b,
        score_a: result.score_a,
        failure_stage,
        failure_message,
    }
}

/// Per-cell summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub mean_ell_hat: Option<f64>,
    pub sd_ell_hat: Option<f64>,
    /// Fraction of (non-failed) trials with the correct shared count.
    pub frac_ell_correct: Option<f64>,
    /// Fraction with an over-estimated shared count.
    pub frac_ell_over: Option<f64>,
    pub median_score_b: Option<f64>,
    pub iqr_score_b: Option<(f64, f64)>,
    pub median_score_a: Option<f64>,
    pub iqr_score_a: Option<(f64, f64)>,
}

/// Type-7 linear-interpolation quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn summarize(values: &[f64]) -> Option<(f64, (f64, f64))> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some((
        quantile_sorted(&sorted, 0.5),
        (quantile_sorted(&sorted, 0.25), quantile_sorted(&sorted, 0.75)),
    ))
}

/// Recomputes the per-cell aggregates from persisted rows. Cells appear in
/// the order of first appearance in `rows`.
pub fn aggregate(rows: &[TrialRow]) -> Vec<CellAggregate> {
    let mut order: Vec<(usize, usize)> = Vec::new();
    for row in rows {
        if !order.contains(&(row.m, row.n)) {
            order.push((row.m, row.n));
        }
    }
    order
        .into_iter()
        .map(|(m, n)| {
            let cell: Vec<&TrialRow> =
                rows.iter().filter(|r| r.m == m && r.n == n).collect();
            let failures = cell.iter().filter(|r| r.failure_stage.is_some()).count();
            let ells: Vec<f64> =
                cell.iter().filter_map(|r| r.ell_hat.map(|v| v as f64)).collect();
            let (mean_ell_hat, sd_ell_hat) = if ells.is_empty() {
                (None, None)
            } else {
                let mean = ells.iter().sum::<f64>() / ells.len() as f64;
                let var = ells.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / ells.len() as f64;
                (Some(mean), Some(var.sqrt()))
            };
            let with_ell: Vec<&&TrialRow> =
                cell.iter().filter(|r| r.ell_hat.is_some()).collect();
            let (frac_ell_correct, frac_ell_over) = if with_ell.is_empty() {
                (None, None)
            } else {
                let total = with_ell.len() as f64;
                let correct = with_ell
                    .iter()
                    .filter(|r| r.ell_hat == Some(r.ell_true))
                    .count() as f64;
                let over = with_ell
                    .iter()
                    .filter(|r| r.ell_hat.map(|e| e > r.ell_true).unwrap_or(false))
                    .count() as f64;
                (Some(correct / total), Some(over / total))
            };
            let score_b: Vec<f64> = cell.iter().filter_map(|r| r.score_b).collect();
            let score_a: Vec<f64> = cell.iter().filter_map(|r| r.score_a).collect();
            let b_summary = summarize(&score_b);
            let a_summary = summarize(&score_a);
            CellAggregate {
                m,
                n,
                trials: cell.len(),
                failures,
                mean_ell_hat,
                sd_ell_hat,
                frac_ell_correct,
                frac_ell_over,
                median_score_b: b_summary.map(|(m, _)| m),
                iqr_score_b: b_summary.map(|(_, iqr)| iqr),
                median_score_a: a_summary.map(|(m, _)| m),
                iqr_score_a: a_summary.map(|(_, iqr)| iqr),
            }
        })
        .collect()
}

/// Full sweep results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub rows: Vec<TrialRow>,
    pub cells: Vec<CellAggregate>,
}

/// Runs the whole grid. Trials execute in parallel on the current rayon pool;
/// rows come back in deterministic grid order regardless of thread count.
pub fn run_sweep(cfg: &SweepConfig) -> SweepResults {
    let keys = cfg.trial_keys();
    run_sweep_subset(cfg, &keys)
}

/// Runs only the listed `(m, n, trial)` keys (used for resuming). Rows are
/// returned in the order of `keys`.
pub fn run_sweep_subset(cfg: &SweepConfig, keys: &[(usize, usize, u64)]) -> SweepResults {
    let rows: Vec<TrialRow> = keys
        .par_iter()
        .map(|&(m, n, t)| run_cell_trial(cfg, m, n, t))
        .collect();
    let cells = aggregate(&rows);
    SweepResults { rows, cells }
}
