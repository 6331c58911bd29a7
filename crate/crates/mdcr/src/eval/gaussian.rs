//! Constructive demonstration that second moments alone cannot separate
//! shared from domain-specific latent structure: any rank-p covariance can be
//! written as `G Xi G^T` for an arbitrary positive definite `Xi`.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GaussianError {
    #[error("sigma must be square, got {0:?}")]
    NotSquare((usize, usize)),
    #[error("sigma has numerical rank {got}, expected {expected}")]
    RankMismatch { got: usize, expected: usize },
    #[error("sigma is not positive semidefinite (negative pivot at {0})")]
    NotPsd(usize),
    #[error("xi is not positive definite")]
    XiNotPd,
}

/// Rank-revealing Cholesky-type factorization of a positive semidefinite
/// matrix: returns a lower-trapezoidal `t` with `sigma = t t^T`, where `t`
/// keeps only the `rank` columns with positive pivots.
pub fn psd_cholesky(sigma: &DMatrix<f64>) -> Result<(DMatrix<f64>, usize), GaussianError> {
    let d = sigma.nrows();
    if sigma.ncols() != d {
        return Err(GaussianError::NotSquare(sigma.shape()));
    }
    let scale = sigma.diagonal().amax().max(1e-300);
    let tol = 1e-12 * scale;
    let mut t = DMatrix::<f64>::zeros(d, d);
    let mut pivots = Vec::new();
    for j in 0..d {
        let mut pivot = sigma[(j, j)];
        for &k in &pivots {
            pivot -= t[(j, k)] * t[(j, k)];
        }
        if pivot < -tol {
            return Err(GaussianError::NotPsd(j));
        }
        if pivot <= tol {
            continue; // zero column in the full factor
        }
        let col = pivots.len();
        let diag = pivot.sqrt();
        t[(j, col)] = diag;
        for i in (j + 1)..d {
            let mut acc = sigma[(i, j)];
            for &k in &pivots {
                acc -= t[(i, k)] * t[(j, k)];
            }
            t[(i, col)] = acc / diag;
        }
        pivots.push(col);
    }
    let rank = pivots.len();
    Ok((t.columns(0, rank).into_owned(), rank))
}

/// Given `sigma` (psd, rank `p`) and `xi` (p x p, positive definite), returns
/// `g` with `g xi g^T = sigma` to machine precision.
pub fn gaussian_counterexample(
    sigma: &DMatrix<f64>,
    xi: &DMatrix<f64>,
) -> Result<DMatrix<f64>, GaussianError> {
    let (t, rank) = psd_cholesky(sigma)?;
    let p = xi.nrows();
    if rank != p {
        return Err(GaussianError::RankMismatch { got: rank, expected: p });
    }
    let chol = xi.clone().cholesky().ok_or(GaussianError::XiNotPd)?;
    let l = chol.l();
    // g = t * l^{-1}: solve g l^T... rows of g satisfy l g_row^T = t_row^T.
    let lt = l.transpose();
    let g_t = lt
        .solve_upper_triangular(&t.transpose())
        .ok_or(GaussianError::XiNotPd)?;
    Ok(g_t.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn identity_case_is_orthogonal_factor() {
        let p = 4;
        let sigma = DMatrix::<f64>::identity(p, p);
        let xi = DMatrix::<f64>::identity(p, p);
        let g = gaussian_counterexample(&sigma, &xi).unwrap();
        assert_relative_eq!(&g * g.transpose(), sigma, epsilon = 1e-12);
    }

    #[test]
    fn random_low_rank_reconstruction() {
        let mut rng = crate::rng::stream(61, &[0]);
        for _ in 0..20 {
            let d = 6;
            let p = 3;
            let m = DMatrix::from_fn(d, p, |_, _| rng.random_range(-1.0..1.0));
            let sigma = &m * m.transpose();
            let l = DMatrix::from_fn(p, p, |i, j| {
                if i > j {
                    rng.random_range(-0.8..0.8)
                } else if i == j {
                    rng.random_range(0.5..1.5)
                } else {
                    0.0
                }
            });
            let xi = &l * l.transpose();
            let g = gaussian_counterexample(&sigma, &xi).unwrap();
            let residual = (&g * &xi * g.transpose() - &sigma).norm();
            assert!(
                residual < 1e-10 * sigma.norm(),
                "relative residual {}",
                residual / sigma.norm()
            );
        }
    }

    #[test]
    fn rank_mismatch_detected() {
        let mut rng = crate::rng::stream(62, &[0]);
        let m = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0));
        let sigma = &m * m.transpose();
        let xi = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            gaussian_counterexample(&sigma, &xi),
            Err(GaussianError::RankMismatch { got: 2, expected: 3 })
        ));
    }

    #[test]
    fn non_pd_xi_detected() {
        let sigma = DMatrix::<f64>::identity(2, 2);
        let xi = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]); // indefinite
        assert!(matches!(gaussian_counterexample(&sigma, &xi), Err(GaussianError::XiNotPd)));
    }

    #[test]
    fn shared_and_unshared_mechanisms_give_identical_covariances() {
        // Two-domain setup where domain covariances come from a model with a
        // shared latent: the counterexample construction produces a no-sharing
        // model with exactly the same per-domain covariances.
        let mut rng = crate::rng::stream(63, &[0]);
        // Latent covariance of three correlated latents (from a chain SEM).
        let mut ia = DMatrix::<f64>::identity(3, 3);
        ia[(1, 0)] = 0.7; // edge 0 -> 1 in (I - A)^{-1} form
        let latent_cov = &ia * ia.transpose();
        // Domain 0 loads latents {0, 1}; domain 1 loads latents {1, 2}.
        let g0 = DMatrix::from_fn(3, 2, |_, _| rng.random_range(0.3..1.0));
        let g1 = DMatrix::from_fn(4, 2, |_, _| rng.random_range(0.3..1.0));
        let cov0 = latent_cov.view((0, 0), (2, 2)).into_owned();
        let cov1 = latent_cov.view((1, 1), (2, 2)).into_owned();
        let sigma0 = &g0 * &cov0 * g0.transpose();
        let sigma1 = &g1 * &cov1 * g1.transpose();
        // No-sharing alternative: four independent latents, per-domain
        // mixing from the construction.
        let xi = DMatrix::<f64>::identity(2, 2);
        let h0 = gaussian_counterexample(&sigma0, &xi).unwrap();
        let h1 = gaussian_counterexample(&sigma1, &xi).unwrap();
        assert_relative_eq!(&h0 * h0.transpose(), sigma0, epsilon = 1e-10);
        assert_relative_eq!(&h1 * h1.transpose(), sigma1, epsilon = 1e-10);
    }
}
