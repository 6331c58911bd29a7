//! Latent error distributions.
//!
//! Each spec names a non-symmetric parametric family; samples are affinely
//! standardized with the exact population moments so that every latent error
//! has mean 0 and variance 1.

use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, Exp, Gumbel, LogNormal, SkewNormal, Weibull};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, PartialEq)]
pub enum ErrorSpecError {
    #[error("{family:?} expects {expected} parameters, got {got}")]
    ParamCount { family: ErrorFamily, expected: usize, got: usize },
    #[error("{family:?} parameters {params:?} are out of range")]
    ParamRange { family: ErrorFamily, params: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorFamily {
    /// Beta(alpha, beta) on (0, 1).
    Beta,
    /// Chi-square with `k` degrees of freedom.
    ChiSquare,
    /// Gumbel(location, scale).
    Gumbel,
    /// LogNormal(mu, sigma) of the underlying normal.
    LogNormal,
    /// Weibull(scale, shape).
    Weibull,
    /// Exponential with rate lambda.
    Exponential,
    /// Skew-normal with shape alpha (location 0, scale 1).
    SkewNormal,
}

/// A standardized error distribution: `(X - mean) / sd` of the named family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub family: ErrorFamily,
    pub params: Vec<f64>,
}

impl ErrorSpec {
    pub fn new(family: ErrorFamily, params: Vec<f64>) -> Result<Self, ErrorSpecError> {
        let expected = match family {
            ErrorFamily::ChiSquare | ErrorFamily::Exponential | ErrorFamily::SkewNormal => 1,
            _ => 2,
        };
        if params.len() != expected {
            return Err(ErrorSpecError::ParamCount { family, expected, got: params.len() });
        }
        let ok = match family {
            ErrorFamily::Beta => params[0] > 0.0 && params[1] > 0.0,
            ErrorFamily::ChiSquare => params[0] > 0.0,
            ErrorFamily::Gumbel => params[1] > 0.0,
            ErrorFamily::LogNormal => params[1] > 0.0,
            ErrorFamily::Weibull => params[0] > 0.0 && params[1] > 0.0,
            ErrorFamily::Exponential => params[0] > 0.0,
            ErrorFamily::SkewNormal => params[0].is_finite(),
        };
        if !ok {
            return Err(ErrorSpecError::ParamRange { family, params });
        }
        Ok(Self { family, params })
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        Self::new(ErrorFamily::Beta, vec![alpha, beta]).unwrap()
    }

    pub fn chi_square(dof: f64) -> Self {
        Self::new(ErrorFamily::ChiSquare, vec![dof]).unwrap()
    }

    pub fn gumbel(location: f64, scale: f64) -> Self {
        Self::new(ErrorFamily::Gumbel, vec![location, scale]).unwrap()
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Self {
        Self::new(ErrorFamily::LogNormal, vec![mu, sigma]).unwrap()
    }

    pub fn weibull(scale: f64, shape: f64) -> Self {
        Self::new(ErrorFamily::Weibull, vec![scale, shape]).unwrap()
    }

    pub fn exponential(rate: f64) -> Self {
        Self::new(ErrorFamily::Exponential, vec![rate]).unwrap()
    }

    pub fn skew_normal(alpha: f64) -> Self {
        Self::new(ErrorFamily::SkewNormal, vec![alpha]).unwrap()
    }

    /// Exact population mean of the raw (unstandardized) distribution.
    pub fn raw_mean(&self) -> f64 {
        let p = &self.params;
        match self.family {
            ErrorFamily::Beta => p[0] / (p[0] + p[1]),
            ErrorFamily::ChiSquare => p[0],
            ErrorFamily::Gumbel => p[0] + p[1] * EULER_GAMMA,
            ErrorFamily::LogNormal => (p[0] + p[1] * p[1] / 2.0).exp(),
            ErrorFamily::Weibull => p[0] * libm::tgamma(1.0 + 1.0 / p[1]),
            ErrorFamily::Exponential => 1.0 / p[0],
            ErrorFamily::SkewNormal => {
                let delta = p[0] / (1.0 + p[0] * p[0]).sqrt();
                delta * (2.0 / std::f64::consts::PI).sqrt()
            }
        }
    }

    /// Exact population variance of the raw distribution.
    pub fn raw_variance(&self) -> f64 {
        let p = &self.params;
        match self.family {
            ErrorFamily::Beta => {
                let s = p[0] + p[1];
                p[0] * p[1] / (s * s * (s + 1.0))
            }
            ErrorFamily::ChiSquare => 2.0 * p[0],
            ErrorFamily::Gumbel => {
                p[1] * p[1] * std::f64::consts::PI * std::f64::consts::PI / 6.0
            }
            ErrorFamily::LogNormal => {
                let s2 = p[1] * p[1];
                (s2.exp() - 1.0) * (2.0 * p[0] + s2).exp()
            }
            ErrorFamily::Weibull => {
                let g1 = libm::tgamma(1.0 + 1.0 / p[1]);
                let g2 = libm::tgamma(1.0 + 2.0 / p[1]);
                p[0] * p[0] * (g2 - g1 * g1)
            }
            ErrorFamily::Exponential => 1.0 / (p[0] * p[0]),
            ErrorFamily::SkewNormal => {
                let delta = p[0] / (1.0 + p[0] * p[0]).sqrt();
                1.0 - 2.0 * delta * delta / std::f64::consts::PI
            }
        }
    }

    fn sample_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = &self.params;
        match self.family {
            ErrorFamily::Beta => Beta::new(p[0], p[1]).unwrap().sample(rng),
            ErrorFamily::ChiSquare => ChiSquared::new(p[0]).unwrap().sample(rng),
            ErrorFamily::Gumbel => Gumbel::new(p[0], p[1]).unwrap().sample(rng),
            ErrorFamily::LogNormal => LogNormal::new(p[0], p[1]).unwrap().sample(rng),
            ErrorFamily::Weibull => Weibull::new(p[0], p[1]).unwrap().sample(rng),
            ErrorFamily::Exponential => Exp::new(p[0]).unwrap().sample(rng),
            ErrorFamily::SkewNormal => SkewNormal::new(0.0, 1.0, p[0]).unwrap().sample(rng),
        }
    }

    /// One standardized draw: `(X - mean) / sd`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        (self.sample_raw(rng) - self.raw_mean()) / self.raw_variance().sqrt()
    }

    /// `n` i.i.d. standardized draws.
    pub fn standardized_sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mean = self.raw_mean();
        let sd = self.raw_variance().sqrt();
        (0..n).map(|_| (self.sample_raw(rng) - mean) / sd).collect()
    }
}

/// The fixed per-index distribution menu used by the data generator. The
/// first nine entries are the standard table; beyond that the menu extends
/// with chi-square and Beta families of strictly increasing parameters, which
/// stay pairwise distinct and non-symmetric.
pub fn appendix_menu(h: usize) -> Vec<ErrorSpec> {
    let base = [
        ErrorSpec::beta(2.0, 3.0),
        ErrorSpec::beta(2.0, 5.0),
        ErrorSpec::chi_square(4.0),
        ErrorSpec::gumbel(0.0, 1.0),
        ErrorSpec::log_normal(0.0, 1.0),
        ErrorSpec::weibull(1.0, 2.0),
        ErrorSpec::exponential(0.1),
        ErrorSpec::skew_normal(6.0),
        ErrorSpec::skew_normal(12.0),
    ];
    (0..h)
        .map(|i| {
            if i < base.len() {
                base[i].clone()
            } else {
                let j = (i - base.len()) as f64;
                if (i - base.len()) % 2 == 0 {
                    ErrorSpec::chi_square(5.0 + j)
                } else {
                    ErrorSpec::beta(2.0, 6.0 + j)
                }
            }
        })
        .collect()
}

/// A deliberately degenerate menu where the shared-block distributions are
/// replayed inside the domain-specific blocks, so distributions are no longer
/// pairwise distinct across domains. Used by the violated-assumption presets.
pub fn duplicate_menu(ell: usize, domain_sizes: &[usize]) -> Vec<ErrorSpec> {
    let shared = appendix_menu(ell.max(1));
    let mut out: Vec<ErrorSpec> = shared.iter().take(ell).cloned().collect();
    for (e, &size) in domain_sizes.iter().enumerate() {
        for slot in 0..size {
            if slot == 0 {
                out.push(shared[e % ell.max(1)].clone());
            } else {
                out.push(ErrorSpec::log_normal(0.0, 1.0));
            }
        }
    }
    out
}
