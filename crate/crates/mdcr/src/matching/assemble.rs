//! Pairwise matching decisions, shared-tuple discovery and assembly of the
//! joint mixing matrix.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use super::kolmogorov::{bonferroni_level, kolmogorov_critical, CriticalError};
use super::ks::{statistic_between, SourceDist};
use crate::ica::IcaResult;

#[derive(Debug, Error, PartialEq)]
pub enum MatchingError {
    #[error("matching needs at least two domains, got {0}")]
    TooFewDomains(usize),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error("tuple {tuple:?} has sign-inconsistent pairwise matches")]
    InconsistentSigns { tuple: Vec<usize> },
    #[error("tuple index {index} out of range for domain {domain} with {sources} sources")]
    TupleIndexRange { domain: usize, index: usize, sources: usize },
}

/// Multiple-testing correction applied to the matching level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    #[default]
    Bonferroni,
    None,
}

/// One entry of the pairwise decision table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchDecision {
    /// Domain pair, `e < f`.
    pub domains: (usize, usize),
    /// Source indices within the two domains.
    pub sources: (usize, usize),
    /// Sign-minimized test statistic.
    pub statistic: f64,
    /// Orientation achieving the minimum: +1 direct, -1 flipped.
    pub sign: i8,
    /// Below the critical value and minimal in both its row and column.
    pub matched: bool,
}

/// Computes the full decision table over all domain pairs.
///
/// An entry is matched iff its statistic is at most the (corrected) critical
/// value and it is the row- and column-minimum of its pair matrix; ties are
/// broken towards the lowest index, so each row and column carries at most
/// one match.
pub fn match_domains(
    sources: &[Vec<SourceDist>],
    alpha: f64,
    correction: Correction,
) -> Result<Vec<MatchDecision>, MatchingError> {
    let m = sources.len();
    if m < 2 {
        return Err(MatchingError::TooFewDomains(m));
    }
    let counts: Vec<usize> = sources.iter().map(|s| s.len()).collect();
    let level = match correction {
        Correction::Bonferroni => bonferroni_level(alpha, &counts)?,
        Correction::None => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(MatchingError::Critical(CriticalError::AlphaRange(alpha)));
            }
            alpha
        }
    };
    let critical = kolmogorov_critical(level)?;

    let mut decisions = Vec::new();
    for e in 0..m {
        for f in (e + 1)..m {
            let rows = sources[e].len();
            let cols = sources[f].len();
            let mut stats = vec![vec![(0.0f64, 1i8); cols]; rows];
            for (i, a) in sources[e].iter().enumerate() {
                for (j, b) in sources[f].iter().enumerate() {
                    stats[i][j] = statistic_between(a, b);
                }
            }
            // First index achieving each row/column minimum.
            let row_argmin: Vec<Option<usize>> = (0..rows)
                .map(|i| argmin(&(0..cols).map(|j| stats[i][j].0).collect::<Vec<_>>()))
                .collect();
            let col_argmin: Vec<Option<usize>> = (0..cols)
                .map(|j| argmin(&(0..rows).map(|i| stats[i][j].0).collect::<Vec<_>>()))
                .collect();
            for i in 0..rows {
                for j in 0..cols {
                    let (t, sign) = stats[i][j];
                    let matched = t <= critical
                        && row_argmin[i] == Some(j)
                        && col_argmin[j] == Some(i);
                    decisions.push(MatchDecision {
                        domains: (e, f),
                        sources: (i, j),
                        statistic: t,
                        sign,
                        matched,
                    });
                }
            }
        }
    }
    Ok(decisions)
}

fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map(|(_, bv)| v < bv).unwrap_or(true) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// A discovered shared node: one source index per domain, with signs relative
/// to the lowest domain index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedTuple {
    /// `indices[e]` is the source index in domain `e`.
    pub indices: Vec<usize>,
    /// `signs[e]` aligns domain `e`'s source to domain 0's orientation.
    pub signs: Vec<i8>,
    /// Sum of the pairwise statistics inside the tuple.
    pub total_statistic: f64,
}

/// Finds the maximal set of disjoint tuples that are matched on every domain
/// pair with consistent signs.
///
/// Candidates are generated through the (near-injective) matchings against
/// domain 0, ranked by ascending total statistic and accepted greedily
/// subject to disjointness.
pub fn discover_shared(decisions: &[MatchDecision], m: usize) -> Vec<SharedTuple> {
    if m < 2 {
        return Vec::new();
    }
    // matched[(e, f)]: i -> (j, sign, statistic)
    let mut matched: std::collections::BTreeMap<(usize, usize), Vec<(usize, usize, i8, f64)>> =
        std::collections::BTreeMap::new();
    let mut max_index0 = 0usize;
    for d in decisions {
        if d.matched {
            matched.entry(d.domains).or_default().push((
                d.sources.0,
                d.sources.1,
                d.sign,
                d.statistic,
            ));
        }
        if d.domains.0 == 0 {
            max_index0 = max_index0.max(d.sources.0 + 1);
        }
    }
    let lookup = |e: usize, f: usize, i: usize| -> Option<(usize, i8, f64)> {
        matched
            .get(&(e, f))
            .and_then(|v| v.iter().find(|&&(a, _, _, _)| a == i))
            .map(|&(_, j, s, t)| (j, s, t))
    };

    let mut candidates: Vec<SharedTuple> = Vec::new();
    'next: for i0 in 0..max_index0 {
        let mut indices = vec![i0];
        let mut signs: Vec<i8> = vec![1];
        let mut total = 0.0;
        for e in 1..m {
            match lookup(0, e, i0) {
                Some((j, s, t)) => {
                    indices.push(j);
                    signs.push(s);
                    total += t;
                }
                None => continue 'next,
            }
        }
        // Every remaining pair must also be matched, with consistent signs.
        for e in 1..m {
            for f in (e + 1)..m {
                match lookup(e, f, indices[e]) {
                    Some((j, s, t)) if j == indices[f] => {
                        if s != signs[e] * signs[f] {
                            continue 'next; // sign inconsistency rejects the tuple
                        }
                        total += t;
                    }
                    _ => continue 'next,
                }
            }
        }
        candidates.push(SharedTuple { indices, signs, total_statistic: total });
    }

    candidates.sort_by(|a, b| {
        a.total_statistic
            .partial_cmp(&b.total_statistic)
            .unwrap()
            .then(a.indices.cmp(&b.indices))
    });
    let mut used: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); m];
    let mut accepted = Vec::new();
    for tuple in candidates {
        if tuple.indices.iter().enumerate().all(|(e, &i)| !used[e].contains(&i)) {
            for (e, &i) in tuple.indices.iter().enumerate() {
                used[e].insert(i);
            }
            accepted.push(tuple);
        }
    }
    accepted
}

/// The assembled joint estimate: shared columns first, then one block of
/// domain-specific columns per domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedAssembly {
    pub ell_hat: usize,
    /// Block matrix of shape `|V| x (ell_hat + sum_e (s_e - ell_hat))`.
    pub b_hat: DMatrix<f64>,
    /// Source measures: shared block (domain 0 orientation), then per-domain
    /// leftovers.
    pub sources: Vec<SourceDist>,
    /// Per domain: `(source index, sign)` for each output column of that
    /// domain, shared columns first. Right-multiplying the domain's mixing
    /// matrix by this signed permutation produces its blocks of `b_hat`.
    pub column_maps: Vec<Vec<(usize, i8)>>,
}

/// Builds the block matrix and measure tuple from per-domain ICA results and
/// the discovered shared tuples.
pub fn assemble_joint(
    ica: &[IcaResult],
    tuples: &[SharedTuple],
) -> Result<SharedAssembly, MatchingError> {
    let m = ica.len();
    if m < 2 {
        return Err(MatchingError::TooFewDomains(m));
    }
    let ell_hat = tuples.len();
    for t in tuples {
        for (e, &i) in t.indices.iter().enumerate() {
            if i >= ica[e].s_hat {
                return Err(MatchingError::TupleIndexRange {
                    domain: e,
                    index: i,
                    sources: ica[e].s_hat,
                });
            }
        }
        if t.signs[0] != 1 {
            return Err(MatchingError::InconsistentSigns { tuple: t.indices.clone() });
        }
    }

    let rows: Vec<usize> = ica.iter().map(|r| r.b_hat.nrows()).collect();
    let total_rows: usize = rows.iter().sum();
    let specific: Vec<usize> = ica.iter().map(|r| r.s_hat - ell_hat.min(r.s_hat)).collect();
    let total_cols = ell_hat + specific.iter().sum::<usize>();
    let mut b = DMatrix::<f64>::zeros(total_rows, total_cols);
    let mut column_maps: Vec<Vec<(usize, i8)>> = Vec::with_capacity(m);

    let mut row_offset = 0;
    let mut col_offset = ell_hat;
    let mut sources: Vec<SourceDist> = Vec::new();
    // Shared measures use domain 0's orientation.
    for t in tuples {
        sources.push(ica[0].sources[t.indices[0]].clone());
    }
    for (e, result) in ica.iter().enumerate() {
        let mut map = Vec::with_capacity(result.s_hat);
        let mut taken = vec![false; result.s_hat];
        for (k, t) in tuples.iter().enumerate() {
            let i = t.indices[e];
            let sign = t.signs[e];
            taken[i] = true;
            map.push((i, sign));
            for r in 0..rows[e] {
                b[(row_offset + r, k)] = sign as f64 * result.b_hat[(r, i)];
            }
        }
        let mut local_col = 0;
        for i in 0..result.s_hat {
            if !taken[i] {
                map.push((i, 1));
                for r in 0..rows[e] {
                    b[(row_offset + r, col_offset + local_col)] = result.b_hat[(r, i)];
                }
                sources.push(result.sources[i].clone());
                local_col += 1;
            }
        }
        column_maps.push(map);
        row_offset += rows[e];
        col_offset += specific[e];
    }
    Ok(SharedAssembly { ell_hat, b_hat: b, sources, column_maps })
}
