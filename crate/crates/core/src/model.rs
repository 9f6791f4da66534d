//! The linear mean-variance bandit model and its reward sampler.
//!
//! Pulling action `a` yields `<a, theta*> + eta` with
//! `eta ~ N(0, <phi*, a> + omega)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::math;

/// Slack used for every norm bound check.
pub const NORM_TOL: f64 = 1e-12;

/// Identity of the reward generator. Part of the reproducibility contract:
/// outputs record it so runs can be matched to the stream that produced them.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.9+standard_normal-ziggurat/rand_distr-0.5";

/// Finite set of actions in `R^d`, each with Euclidean norm at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    dim: usize,
    data: Vec<f64>,
}

impl ActionSet {
    pub fn new(actions: Vec<Vec<f64>>) -> Result<Self> {
        let dim = actions.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(dim * actions.len());
        for (i, a) in actions.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::InvalidActions(format!(
                    "action {i} has dimension {}, expected {dim}",
                    a.len()
                )));
            }
            data.extend_from_slice(a);
        }
        Self::from_flat(dim, data)
    }

    /// Builds from a row-major buffer of `K * dim` coordinates.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidActions("dimension must be at least 1".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidActions(format!(
                "need a non-empty multiple of {dim} coordinates, got {}",
                data.len()
            )));
        }
        for (i, a) in data.chunks_exact(dim).enumerate() {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidActions(format!("action {i} is not finite")));
            }
            let n = norm2(a);
            if n > 1.0 + NORM_TOL {
                return Err(Error::InvalidActions(format!("action {i} has norm {n} > 1")));
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of actions `K`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<&[f64]> {
        (index < self.len()).then(|| self.action(index))
    }

    /// Unchecked-by-`Result` accessor; panics on a bad index.
    #[inline]
    pub fn action(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + Clone {
        self.data.chunks_exact(self.dim)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// New set with the given members, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            self.check_index(i)?;
            data.extend_from_slice(self.action(i));
        }
        Self::from_flat(self.dim, data)
    }
}

/// Ground truth of a mean-variance linear bandit.
#[derive(Debug, Clone, PartialEq)]
pub struct MVInstance {
    actions: ActionSet,
    theta_star: Vec<f64>,
    phi_star: Vec<f64>,
    omega: f64,
    rho: f64,
    label: String,
    means: Vec<f64>,
    variances: Vec<f64>,
    sigma2_min: f64,
    sigma2_max: f64,
}

impl MVInstance {
    pub fn new(
        actions: ActionSet,
        theta_star: Vec<f64>,
        phi_star: Vec<f64>,
        omega: f64,
        rho: f64,
    ) -> Result<Self> {
        let d = actions.dim();
        for v in [&theta_star, &phi_star] {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInstance(format!("omega must be >= 0, got {omega}")));
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidInstance(format!("rho must be >= 0, got {rho}")));
        }
        if theta_star.iter().chain(&phi_star).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInstance("non-finite coefficient".into()));
        }
        let tn = norm2(&theta_star);
        if tn > 1.0 + NORM_TOL {
            return Err(Error::InvalidInstance(format!("|theta*| = {tn} > 1")));
        }
        let pn = norm2(&phi_star);
        if pn > omega + NORM_TOL {
            return Err(Error::InvalidInstance(format!("|phi*| = {pn} > omega = {omega}")));
        }
        let means: Vec<f64> = actions.iter().map(|a| dot(a, &theta_star)).collect();
        let variances: Vec<f64> = actions.iter().map(|a| dot(a, &phi_star) + omega).collect();
        if let Some((i, v)) = variances.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "action {i} has non-positive variance {v}"
            )));
        }
        let sigma2_min = variances.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma2_max = variances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            actions,
            theta_star,
            phi_star,
            omega,
            rho,
            label: String::new(),
            means,
            variances,
            sigma2_min,
            sigma2_max,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }
    pub fn dim(&self) -> usize {
        self.actions.dim()
    }
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn theta_star(&self) -> &[f64] {
        &self.theta_star
    }
    pub fn phi_star(&self) -> &[f64] {
        &self.phi_star
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn sigma2_min(&self) -> f64 {
        self.sigma2_min
    }
    pub fn sigma2_max(&self) -> f64 {
        self.sigma2_max
    }
    pub fn means(&self) -> &[f64] {
        &self.means
    }
    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    /// Expected reward `<a, theta*>`.
    pub fn mean_of(&self, action_index: usize) -> Result<f64> {
        self.actions.check_index(action_index)?;
        Ok(self.means[action_index])
    }

    /// Reward variance `<phi*, a> + omega`.
    pub fn variance_of(&self, action_index: usize) -> Result<f64> {
        self.actions.check_index(action_index)?;
        Ok(self.variances[action_index])
    }

    /// Copy of this instance with a different risk tolerance.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.actions.clone(), self.theta_star.clone(), self.phi_star.clone(), self.omega, rho)
            .map(|i| i.with_label(self.label.clone()))
    }
}

/// Seeded reward sampler for one replication. Single owner; give every
/// concurrent run its own.
#[derive(Debug, Clone)]
pub struct Environment<'a> {
    instance: &'a MVInstance,
    seed: u64,
    rng: ChaCha8Rng,
    std_devs: Vec<f64>,
}

impl<'a> Environment<'a> {
    pub fn new(instance: &'a MVInstance, seed: u64) -> Self {
        let std_devs = instance.variances.iter().map(|v| math::sqrt(*v)).collect();
        Self { instance, seed, rng: ChaCha8Rng::seed_from_u64(seed), std_devs }
    }

    pub fn instance(&self) -> &'a MVInstance {
        self.instance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws `X = mu_a + sigma_a * z` with one standard normal draw `z`.
    pub fn sample_reward(&mut self, action_index: usize) -> Result<f64> {
        self.instance.actions.check_index(action_index)?;
        Ok(self.pull(action_index))
    }

    /// Like [`sample_reward`](Self::sample_reward) but panics on a bad index.
    #[inline]
    pub fn pull(&mut self, action_index: usize) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.instance.means[action_index] + self.std_devs[action_index] * z
    }

    /// Independent stream for policies that randomize their own choices.
    /// Does not disturb the reward stream.
    pub fn policy_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn basis(d: usize) -> ActionSet {
        ActionSet::new(
            (0..d)
                .map(|i| {
                    let mut v = vec![0.0; d];
                    v[i] = 1.0;
                    v
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mean_and_variance_identity_cases() {
        let inst = MVInstance::new(basis(3), vec![1.0, 0.0, 0.0], vec![0.3, 0.0, 0.0], 1.0, 2.0).unwrap();
        assert_eq!(inst.mean_of(0).unwrap(), 1.0);
        assert_eq!(inst.variance_of(0).unwrap(), 1.3);
        assert_eq!(inst.variance_of(1).unwrap(), 1.0);
        let zero = MVInstance::new(basis(2), vec![0.0; 2], vec![0.0; 2], 1.0, 0.0).unwrap();
        assert_eq!(zero.mean_of(1).unwrap(), 0.0);
        assert_eq!(zero.variance_of(1).unwrap(), 1.0);
    }

    #[test]
    fn bad_indices_and_parameters() {
        let inst = MVInstance::new(basis(2), vec![0.0; 2], vec![0.0; 2], 1.0, 0.0).unwrap();
        assert_eq!(inst.mean_of(2), Err(Error::IndexOutOfRange { index: 2, len: 2 }));
        assert!(inst.variance_of(7).is_err());
        let mut env = Environment::new(&inst, 1);
        assert!(env.sample_reward(9).is_err());
        assert!(MVInstance::new(basis(2), vec![1.0, 1.0], vec![0.0; 2], 1.0, 0.0).is_err());
        assert!(MVInstance::new(basis(2), vec![0.0; 2], vec![0.8, 0.8], 1.0, 0.0).is_err());
        assert!(MVInstance::new(basis(2), vec![0.0; 3], vec![0.0; 2], 1.0, 0.0).is_err());
        // |phi*| <= omega but a negative direction zeroes the variance
        let neg = ActionSet::new(vec![vec![-1.0]]).unwrap();
        assert!(MVInstance::new(neg, vec![0.0], vec![1.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn action_set_validation() {
        assert!(ActionSet::new(vec![]).is_err());
        assert!(ActionSet::new(vec![vec![1.0, 0.0], vec![1.0]]).is_err());
        assert!(ActionSet::new(vec![vec![0.8, 0.8]]).is_err());
        let s = 1.0 / libm::sqrt(2.0);
        assert!(ActionSet::new(vec![vec![s, s]]).is_ok());
    }

    #[test]
    fn sigma_bounds_are_derived_from_actions() {
        let acts = ActionSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let inst = MVInstance::new(acts, vec![0.0; 2], vec![0.2, -0.4], 1.0, 1.0).unwrap();
        assert_eq!(inst.sigma2_min(), 0.6);
        assert_eq!(inst.sigma2_max(), 1.2);
        for i in 0..3 {
            let v = inst.variance_of(i).unwrap();
            assert!(v >= inst.sigma2_min() && v <= inst.sigma2_max());
        }
    }

    #[test]
    fn vanishing_noise_returns_the_mean() {
        let acts = ActionSet::new(vec![vec![0.6, 0.8], vec![1.0, 0.0]]).unwrap();
        let inst = MVInstance::new(acts, vec![0.5, -0.5], vec![0.0; 2], 1e-12, 0.0).unwrap();
        let mut env = Environment::new(&inst, 3);
        for _ in 0..1000 {
            assert!((env.sample_reward(0).unwrap() - (-0.1)).abs() < 1e-4);
        }
    }

    #[test]
    fn same_seed_same_rewards() {
        let inst = MVInstance::new(basis(3), vec![0.1, 0.2, 0.3], vec![0.1, 0.0, -0.2], 1.0, 2.0).unwrap();
        let seq = [0usize, 2, 1, 1, 0, 2, 2, 2, 1];
        let run = || {
            let mut env = Environment::new(&inst, 42);
            seq.iter().map(|&a| env.sample_reward(a).unwrap().to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
        let mut other = Environment::new(&inst, 43);
        let first: Vec<u64> = seq.iter().map(|&a| other.pull(a).to_bits()).collect();
        assert_ne!(first, run());
    }

    #[test]
    fn sample_moments_match_the_model() {
        let acts = ActionSet::new(vec![vec![0.6, 0.8]]).unwrap();
        let inst = MVInstance::new(acts, vec![0.3, 0.4], vec![0.5, 0.25], 1.0, 0.0).unwrap();
        let mu = inst.mean_of(0).unwrap();
        let var = inst.variance_of(0).unwrap();
        let n = 100_000;
        let mut env = Environment::new(&inst, 7);
        let xs: Vec<f64> = (0..n).map(|_| env.pull(0)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let svar = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((mean - mu).abs() < 4.0 * libm::sqrt(var / n as f64));
        assert!((svar - var).abs() < 0.05 * var);
    }
}
