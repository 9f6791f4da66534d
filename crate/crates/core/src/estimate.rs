//! Least-squares estimators for the reward and variance coefficients.
//!
//! `theta_hat = V^{-1} sum X_s A_s` and
//! `phi_hat = V^{-1} sum ((X_s - <theta_hat, A_s>)^2 - omega) A_s`,
//! where `V = sum A_s A_s^T`, optionally plus the identity.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, SymMatrix};
use crate::model::ActionSet;

/// Gram matrix of the pulled actions.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    v: SymMatrix,
    ridge_applied: bool,
}

impl DesignMatrix {
    pub fn from_actions<'a, I>(dim: usize, pulled: I, ridge: bool) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut v = SymMatrix::zeros(dim);
        for a in pulled {
            v.add_outer(a, 1.0);
        }
        Self::finish(v, ridge)
    }

    /// `sum_a n_a a a^T` from per-action pull counts.
    pub fn from_counts(actions: &ActionSet, counts: &[u64], ridge: bool) -> Self {
        let mut v = SymMatrix::zeros(actions.dim());
        for (a, &n) in actions.iter().zip(counts) {
            if n > 0 {
                v.add_outer(a, n as f64);
            }
        }
        Self::finish(v, ridge)
    }

    fn finish(mut v: SymMatrix, ridge: bool) -> Self {
        if ridge {
            v.add_diagonal(1.0);
        }
        Self { v, ridge_applied: ridge }
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.v
    }

    pub fn ridge_applied(&self) -> bool {
        self.ridge_applied
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn factor(&self) -> Result<Cholesky> {
        self.v.cholesky()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub theta_hat: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub n_samples: u64,
}

impl Estimates {
    /// Score vector `phi_hat - rho theta_hat`; lower `<., a>` is better.
    pub fn score_direction(&self, rho: f64) -> Vec<f64> {
        self.phi_hat.iter().zip(&self.theta_hat).map(|(p, t)| p - rho * t).collect()
    }
}

fn check_dims(pulls: &[(&[f64], f64)], d: usize) -> Result<()> {
    match pulls.iter().find(|(a, _)| a.len() != d) {
        Some((a, _)) => Err(Error::DimensionMismatch { expected: d, got: a.len() }),
        None => Ok(()),
    }
}

pub fn estimate_theta(pulls: &[(&[f64], f64)], v: &DesignMatrix) -> Result<Vec<f64>> {
    let d = v.dim();
    check_dims(pulls, d)?;
    let mut rhs = vec![0.0; d];
    for (a, x) in pulls {
        rhs.iter_mut().zip(a.iter()).for_each(|(r, ai)| *r += x * ai);
    }
    Ok(v.factor()?.solve(&rhs))
}

/// `theta_hat` is passed in explicitly so callers can plug in any estimate
/// (including the truth).
pub fn estimate_phi(
    pulls: &[(&[f64], f64)],
    theta_hat: &[f64],
    v: &DesignMatrix,
    omega: f64,
) -> Result<Vec<f64>> {
    let d = v.dim();
    check_dims(pulls, d)?;
    if theta_hat.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: theta_hat.len() });
    }
    let mut rhs = vec![0.0; d];
    for (a, x) in pulls {
        let r = x - dot(theta_hat, a);
        let y = r * r - omega;
        rhs.iter_mut().zip(a.iter()).for_each(|(acc, ai)| *acc += y * ai);
    }
    Ok(v.factor()?.solve(&rhs))
}

/// `<phi_hat - rho theta_hat, a>`.
#[inline]
pub fn mv_score(theta_hat: &[f64], phi_hat: &[f64], rho: f64, action: &[f64]) -> f64 {
    debug_assert!(theta_hat.len() == action.len() && phi_hat.len() == action.len());
    action
        .iter()
        .zip(theta_hat.iter().zip(phi_hat))
        .map(|(a, (t, p))| (p - rho * t) * a)
        .sum()
}

/// Index of the lowest score, lowest index on ties.
pub fn argmin_score<'a, I>(est: &Estimates, rho: f64, actions: I) -> Option<usize>
where
    I: IntoIterator<Item = (usize, &'a [f64])>,
{
    let dir = est.score_direction(rho);
    let mut best: Option<(usize, f64)> = None;
    for (i, a) in actions {
        let s = dot(&dir, a);
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((i, s));
        }
    }
    best.map(|b| b.0)
}

/// Running per-action sample statistics (count, mean, sum of squared
/// deviations), enough to evaluate both estimators without keeping the raw
/// pulls.
#[derive(Debug, Clone, PartialEq)]
pub struct PullStats {
    count: Vec<u64>,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl PullStats {
    pub fn new(k: usize) -> Self {
        Self { count: vec![0; k], mean: vec![0.0; k], m2: vec![0.0; k] }
    }

    #[inline]
    pub fn record(&mut self, action: usize, x: f64) {
        let n = self.count[action] + 1;
        self.count[action] = n;
        let delta = x - self.mean[action];
        self.mean[action] += delta / n as f64;
        self.m2[action] += delta * (x - self.mean[action]);
    }

    pub fn counts(&self) -> &[u64] {
        &self.count
    }

    pub fn total(&self) -> u64 {
        self.count.iter().sum()
    }

    pub fn count(&self, action: usize) -> u64 {
        self.count[action]
    }

    pub fn mean(&self, action: usize) -> f64 {
        self.mean[action]
    }

    /// Biased (`1/n`) sample variance.
    pub fn variance(&self, action: usize) -> f64 {
        match self.count[action] {
            0 => 0.0,
            n => self.m2[action] / n as f64,
        }
    }

    /// Empirical mean-variance `var_hat - rho mu_hat` of one action's samples.
    pub fn empirical_mv(&self, action: usize, rho: f64) -> f64 {
        self.variance(action) - rho * self.mean[action]
    }

    /// Both least-squares estimates from the aggregated pulls.
    pub fn estimate(&self, actions: &ActionSet, omega: f64, ridge: bool) -> Result<Estimates> {
        let v = DesignMatrix::from_counts(actions, &self.count, ridge);
        let chol = v.factor()?;
        let d = actions.dim();
        let mut rhs = vec![0.0; d];
        for (i, a) in actions.iter().enumerate() {
            let n = self.count[i];
            if n == 0 {
                continue;
            }
            let s = n as f64 * self.mean[i];
            rhs.iter_mut().zip(a).for_each(|(r, ai)| *r += s * ai);
        }
        let theta_hat = chol.solve(&rhs);
        let phi_hat = self.phi_with(actions, &theta_hat, omega, &chol);
        Ok(Estimates { theta_hat, phi_hat, n_samples: self.total() })
    }

    fn phi_with(&self, actions: &ActionSet, theta_hat: &[f64], omega: f64, chol: &Cholesky) -> Vec<f64> {
        let mut rhs = vec![0.0; actions.dim()];
        for (i, a) in actions.iter().enumerate() {
            let n = self.count[i];
            if n == 0 {
                continue;
            }
            // sum_s (X_s - m)^2 = M2 + n (mean - m)^2
            let off = self.mean[i] - dot(theta_hat, a);
            let y = self.m2[i] + n as f64 * off * off - n as f64 * omega;
            rhs.iter_mut().zip(a).for_each(|(r, ai)| *r += y * ai);
        }
        chol.solve(&rhs)
    }
}
