//! Regret bookkeeping.
//!
//! The intermediate regret of a run with pull counts `tau` over `T` rounds is
//! `sum_a tau_a Delta_a + (1/T) sum_{a != b} tau_a tau_b Gamma_ab^2`, where
//! `Delta_a` is the mean-variance gap to the best action and `Gamma_ab` the
//! difference of expected rewards. The cross term is evaluated in `O(K)` via
//! `(1/T) sum_{a,b} tau_a tau_b (mu_a - mu_b)^2 = 2 sum_a tau_a (mu_a - mu_bar)^2`
//! with `mu_bar` the count-weighted mean.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::MVInstance;
use crate::policies::Trajectory;

/// True per-action means, variances and gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub rho: f64,
    /// `argmin_a sigma2_a - rho mu_a`, lowest index on ties.
    pub best: usize,
    /// `Delta_a = MV_a - MV_best >= 0`.
    pub delta: Vec<f64>,
}

impl GapTable {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `Gamma_ab = mu_a - mu_b`.
    #[inline]
    pub fn gamma(&self, a: usize, b: usize) -> f64 {
        self.mu[a] - self.mu[b]
    }

    /// Full `K x K` matrix of `Gamma_ab`, row-major.
    pub fn gamma_matrix(&self) -> Vec<f64> {
        let k = self.len();
        let mut g = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                g[a * k + b] = self.gamma(a, b);
            }
        }
        g
    }

    pub fn mean_variance_of(&self, a: usize) -> f64 {
        self.sigma2[a] - self.rho * self.mu[a]
    }
}

pub fn gap_table(instance: &MVInstance) -> GapTable {
    let mu = instance.means().to_vec();
    let sigma2 = instance.variances().to_vec();
    let rho = instance.rho();
    let mv: Vec<f64> = mu.iter().zip(&sigma2).map(|(m, s)| s - rho * m).collect();
    let mut best = 0;
    for (i, &x) in mv.iter().enumerate() {
        if x < mv[best] {
            best = i;
        }
    }
    let delta = mv.iter().map(|x| (x - mv[best]).max(0.0)).collect();
    GapTable { mu, sigma2, rho, best, delta }
}

/// Cumulative mean-variance `sum_t (X_t - X_bar)^2 - rho sum_t X_t`.
pub fn mean_variance(rewards: &[f64], rho: f64) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::EmptyRewards);
    }
    let (mut mean, mut m2, mut sum) = (0.0, 0.0, 0.0);
    for (i, &x) in rewards.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
        sum += x;
    }
    Ok(m2 - rho * sum)
}

/// Intermediate regret from raw pull counts; `T` is their sum.
pub fn regret_from_counts(counts: &[u64], gaps: &GapTable) -> f64 {
    debug_assert_eq!(counts.len(), gaps.len());
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let mut first = 0.0;
    let mut weighted_mu = 0.0;
    let mut arms = 0;
    for (a, &c) in counts.iter().enumerate() {
        if c > 0 {
            first += c as f64 * gaps.delta[a];
            weighted_mu += c as f64 * gaps.mu[a];
            arms += 1;
        }
    }
    if arms < 2 {
        return first;
    }
    let mu_bar = weighted_mu / n as f64;
    let spread: f64 = counts
        .iter()
        .zip(&gaps.mu)
        .filter(|(c, _)| **c > 0)
        .map(|(&c, &m)| c as f64 * (m - mu_bar) * (m - mu_bar))
        .sum();
    first + 2.0 * spread
}

/// Intermediate regret of a whole trajectory of length `horizon`.
pub fn intermediate_regret(traj: &Trajectory, gaps: &GapTable, horizon: u64) -> Result<f64> {
    let total: u64 = traj.pull_counts.iter().sum();
    if total != horizon {
        return Err(Error::CountMismatch { expected: horizon, got: total });
    }
    if traj.pull_counts.len() != gaps.len() {
        return Err(Error::DimensionMismatch { expected: gaps.len(), got: traj.pull_counts.len() });
    }
    Ok(regret_from_counts(&traj.pull_counts, gaps))
}

/// Intermediate regret of every prefix `t` in `checkpoints` (ascending).
pub fn regret_curve(traj: &Trajectory, gaps: &GapTable, checkpoints: &[u64]) -> Vec<f64> {
    let mut counts = vec![0u64; gaps.len()];
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut t = 0usize;
    for &cp in checkpoints {
        let cp = (cp as usize).min(traj.chosen.len());
        while t < cp {
            counts[traj.chosen[t]] += 1;
            t += 1;
        }
        out.push(regret_from_counts(&counts, gaps));
    }
    out
}

/// `n` log-spaced integer times in `[10, T]` (fewer after de-duplication),
/// always ending at `T`.
pub fn checkpoint_grid(horizon: u64, n: usize) -> Vec<u64> {
    let lo = 10u64.min(horizon).max(1);
    if n <= 1 || horizon <= lo {
        return vec![horizon];
    }
    let (l0, l1) = (math::ln(lo as f64), math::ln(horizon as f64));
    let mut grid: Vec<u64> = (0..n)
        .map(|i| {
            let x = l0 + (l1 - l0) * i as f64 / (n - 1) as f64;
            (libm::round(libm::exp(x)) as u64).clamp(lo, horizon)
        })
        .collect();
    grid.dedup();
    *grid.last_mut().expect("non-empty") = horizon;
    grid
}

/// Both sides of the within/between decomposition of the empirical reward
/// variance: `total = (1/T) sum_t (X_t - X_bar)^2` and
/// `within + between = (1/T) sum_a tau_a var_a + (1/T) sum_a tau_a (mean_a - X_bar)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceDecomposition {
    pub total: f64,
    pub within: f64,
    pub between: f64,
}

pub fn variance_decomposition_check(traj: &Trajectory) -> Result<VarianceDecomposition> {
    let t = traj.rewards.len();
    if t == 0 {
        return Err(Error::EmptyRewards);
    }
    let k = traj.num_actions();
    let tf = t as f64;
    let grand = traj.rewards.iter().sum::<f64>() / tf;
    let total = traj.rewards.iter().map(|x| (x - grand) * (x - grand)).sum::<f64>() / tf;
    let mut sums = vec![0.0; k];
    let mut counts = vec![0u64; k];
    for (&a, &x) in traj.chosen.iter().zip(&traj.rewards) {
        sums[a] += x;
        counts[a] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
    let mut within = 0.0;
    for (&a, &x) in traj.chosen.iter().zip(&traj.rewards) {
        within += (x - means[a]) * (x - means[a]);
    }
    within /= tf;
    let between = counts
        .iter()
        .zip(&means)
        .map(|(&c, &m)| c as f64 * (m - grand) * (m - grand))
        .sum::<f64>()
        / tf;
    Ok(VarianceDecomposition { total, within, between })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReportMeta {
    pub policy: String,
    pub scenario: String,
    pub config_hash: String,
    pub prng: String,
}

/// Intermediate-regret curves of one policy on one scenario across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub meta: ReportMeta,
    pub checkpoints: Vec<u64>,
    /// `(seed, regret at each checkpoint)`, sorted by seed.
    pub per_seed: Vec<(u64, Vec<f64>)>,
    pub mean: Vec<f64>,
    /// Standard error of the mean (sample standard deviation over `sqrt(n)`).
    pub stderr: Vec<f64>,
}

impl RegretReport {
    pub fn new(meta: ReportMeta, checkpoints: Vec<u64>) -> Self {
        let n = checkpoints.len();
        Self { meta, checkpoints, per_seed: Vec::new(), mean: vec![0.0; n], stderr: vec![0.0; n] }
    }

    pub fn add_run(&mut self, seed: u64, curve: Vec<f64>) -> Result<()> {
        if curve.len() != self.checkpoints.len() {
            return Err(Error::DimensionMismatch { expected: self.checkpoints.len(), got: curve.len() });
        }
        self.per_seed.push((seed, curve));
        self.refresh();
        Ok(())
    }

    /// Combines two reports over the same checkpoints; the result does not
    /// depend on argument order.
    pub fn merge(mut self, other: RegretReport) -> Result<Self> {
        if other.checkpoints != self.checkpoints {
            return Err(Error::InvalidConfig("cannot merge reports with different checkpoints".into()));
        }
        self.per_seed.extend(other.per_seed);
        self.refresh();
        Ok(self)
    }

    pub fn n_seeds(&self) -> usize {
        self.per_seed.len()
    }

    fn refresh(&mut self) {
        self.per_seed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.iter().map(|x| x.to_bits()).cmp(b.1.iter().map(|x| x.to_bits()))));
        let n = self.per_seed.len();
        for j in 0..self.checkpoints.len() {
            if n == 0 {
                self.mean[j] = 0.0;
                self.stderr[j] = 0.0;
                continue;
            }
            let m = self.per_seed.iter().map(|r| r.1[j]).sum::<f64>() / n as f64;
            let se = if n > 1 {
                let var = self.per_seed.iter().map(|r| (r.1[j] - m) * (r.1[j] - m)).sum::<f64>() / (n - 1) as f64;
                math::sqrt(var / n as f64)
            } else {
                0.0
            };
            self.mean[j] = m;
            self.stderr[j] = se;
        }
    }
}
