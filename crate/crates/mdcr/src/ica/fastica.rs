//! Deflation FastICA with the log-cosh contrast.

use std::sync::LazyLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use super::{center_rows, IcaError, IcaOptions};
use crate::rng::stream;

/// `E[log cosh Z]` for standard normal `Z`, the reference point of the
/// contrast. Computed once by Simpson quadrature of
/// `2 * log(cosh(x)) * phi(x)` on `[0, 10]`.
static GAUSS_LOGCOSH: LazyLock<f64> = LazyLock::new(|| {
    let h = 1e-4;
    let steps = (10.0 / h) as usize;
    let integrand = |x: f64| -> f64 {
        let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // log(cosh x) = x + log1p(exp(-2x)) - log 2 avoids overflow.
        let logcosh = x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2;
        2.0 * logcosh * phi
    };
    let mut acc = integrand(0.0) + integrand(10.0);
    for i in 1..steps {
        let x = i as f64 * h;
        acc += integrand(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
});

/// Whitens centered data: returns `(y, back)` with `y = K xc` having identity
/// sample covariance on the retained `s`-dimensional subspace and
/// `back = U_s Lambda_s^{1/2}` mapping whitened coordinates back to the data
/// space.
pub fn whiten(x: &DMatrix<f64>, s: usize) -> Result<(DMatrix<f64>, DMatrix<f64>), IcaError> {
    let d = x.nrows();
    let n = x.ncols();
    let centered = center_rows(x);
    let cov = (&centered * centered.transpose()) / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let lead = eig.eigenvalues[order[0]].max(0.0);
    let rank = order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i] > 1e-12 * lead.max(1e-300))
        .count();
    if rank < s {
        return Err(IcaError::RankDeficient { wanted: s, rank });
    }
    let mut k = DMatrix::zeros(s, d);
    let mut back = DMatrix::zeros(d, s);
    for (row, &i) in order.iter().take(s).enumerate() {
        let lambda = eig.eigenvalues[i];
        let u = eig.eigenvectors.column(i);
        let scale = lambda.sqrt();
        for r in 0..d {
            k[(row, r)] = u[r] / scale;
            back[(r, row)] = u[r] * scale;
        }
    }
    Ok((&k * &centered, back))
}

/// Deflation FastICA. Returns the estimated mixing matrix `b_tilde`
/// (`d x s`, arbitrary column scale) and source rows
/// `eta_tilde = pinv(b_tilde) * xc` (`s x n`).
///
/// Deterministic given `opts.seed`; single-threaded.
pub fn fit_ica(
    x: &DMatrix<f64>,
    s: usize,
    opts: &IcaOptions,
) -> Result<(DMatrix<f64>, DMatrix<f64>), IcaError> {
    let d = x.nrows();
    let n = x.ncols();
    if !(s >= 1 && d >= s && n > d) {
        return Err(IcaError::BadShape { d, n, s });
    }
    let (y, back) = whiten(x, s)?;
    let mut rng = stream(opts.seed, &[0x1ca]);

    // Rows of `w` are the unmixing directions in whitened space.
    let mut w = DMatrix::<f64>::zeros(s, s);
    for unit in 0..s {
        let mut best: Option<(f64, DVector<f64>)> = None;
        let mut deltas = Vec::with_capacity(opts.restarts);
        for _ in 0..opts.restarts {
            let mut v = DVector::from_fn(s, |_, _| rng.random::<f64>() - 0.5);
            deflate(&mut v, &w, unit);
            if v.norm() < 1e-12 {
                deltas.push(f64::INFINITY);
                continue;
            }
            v /= v.norm();
            let mut delta = f64::INFINITY;
            for _ in 0..opts.max_iter {
                let mut next = one_step(&y, &v);
                deflate(&mut next, &w, unit);
                let norm = next.norm();
                if norm < 1e-12 {
                    break;
                }
                next /= norm;
                delta = (next.dot(&v).abs() - 1.0).abs();
                v = next;
                if delta < opts.tol {
                    break;
                }
            }
            deltas.push(delta);
            if delta < opts.tol {
                let contrast = (mean_logcosh(&y, &v) - *GAUSS_LOGCOSH).abs();
                if best.as_ref().map(|(c, _)| contrast > *c).unwrap_or(true) {
                    best = Some((contrast, v.clone()));
                }
            }
        }
        let Some((_, v)) = best else {
            return Err(IcaError::NotConverged { unit, deltas });
        };
        w.row_mut(unit).copy_from(&v.transpose());
    }

    let b_tilde = &back * w.transpose();
    let centered = center_rows(x);
    let svd = b_tilde.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let pinv = svd.pseudo_inverse(1e-10 * smax).expect("pseudo-inverse of a nonzero matrix");
    let eta_tilde = &pinv * centered;
    Ok((b_tilde, eta_tilde))
}

fn deflate(v: &mut DVector<f64>, w: &DMatrix<f64>, found: usize) {
    for j in 0..found {
        let wj = w.row(j).transpose();
        let proj = v.dot(&wj);
        *v -= wj * proj;
    }
}

/// One fixed-point update `w <- E[y g(w'y)] - E[g'(w'y)] w` with `g = tanh`.
fn one_step(y: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = y.ncols();
    let proj = y.tr_mul(v); // n-vector of w'y
    let mut ey_g = DVector::zeros(y.nrows());
    let mut mean_gprime = 0.0;
    for (col, &p) in proj.iter().enumerate() {
        let t = p.tanh();
        mean_gprime += 1.0 - t * t;
        ey_g.axpy(t, &y.column(col).clone_owned(), 1.0);
    }
    ey_g /= n as f64;
    mean_gprime /= n as f64;
    ey_g - v * mean_gprime
}

fn mean_logcosh(y: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    let proj = y.tr_mul(v);
    let n = proj.len() as f64;
    proj.iter()
        .map(|&p| {
            let a = p.abs();
            a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
        })
        .sum::<f64>()
        / n
}

/// Rescales sources to exact unit sample variance, moving the scale into the
/// mixing matrix so the product `b_hat * eta` is unchanged:
/// `Delta_ii = (1/n) [eta eta^T]_ii`, `b_hat = b_tilde Delta^{1/2}`,
/// `eta = Delta^{-1/2} eta_tilde`.
pub fn normalize_unit_variance(
    b_tilde: &DMatrix<f64>,
    eta_tilde: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>), IcaError> {
    let s = eta_tilde.nrows();
    let n = eta_tilde.ncols();
    let mut b = b_tilde.clone();
    let mut eta = eta_tilde.clone();
    for i in 0..s {
        let delta = eta_tilde.row(i).iter().map(|v| v * v).sum::<f64>() / n as f64;
        if delta < 1e-24 {
            return Err(IcaError::ZeroVarianceSource { row: i });
        }
        let scale = delta.sqrt();
        for r in 0..b.nrows() {
            b[(r, i)] *= scale;
        }
        for c in 0..n {
            eta[(i, c)] /= scale;
        }
    }
    Ok((b, eta))
}
