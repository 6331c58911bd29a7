//! Exact ICA test double.
//!
//! Returns the true per-domain mixing matrix with a random signed permutation
//! of the columns and matching exact source labels. No sampling is involved,
//! which isolates the combinatorial content of matching and assembly from
//! estimation error.

use rand::seq::SliceRandom;
use rand::Rng;

use super::IcaResult;
use crate::matching::SourceDist;
use crate::model::MdcrModel;
use crate::rng::Stream;

/// Exact per-domain "ICA" output: `b_hat = B^e R D` for a random permutation
/// `R` and random sign matrix `D`, with source labels permuted and flipped
/// accordingly.
pub fn oracle_ica(model: &MdcrModel, e: usize, rng: &mut Stream) -> IcaResult {
    let b_e = model.domain_mixing(e);
    let s_e = model.graph().latent_parent_set(e);
    let s = s_e.len();
    let mut perm: Vec<usize> = (0..s).collect();
    perm.shuffle(rng);
    let signs: Vec<i8> = (0..s).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();

    let mut b_hat = nalgebra::DMatrix::zeros(b_e.nrows(), s);
    let mut sources = Vec::with_capacity(s);
    for i in 0..s {
        let src_col = perm[i];
        let sign = signs[i] as f64;
        for r in 0..b_e.nrows() {
            b_hat[(r, i)] = sign * b_e[(r, src_col)];
        }
        sources.push(SourceDist::label(model.dist_id(s_e[src_col]), signs[i]));
    }
    IcaResult { s_hat: s, b_hat, eta: nalgebra::DMatrix::zeros(s, 0), sources }
}
