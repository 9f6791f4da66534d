#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskbandit_core::{ActionSet, MVInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` random vectors in the unit ball of `R^d`, the first `d` of them a
/// perturbed basis so the set spans.
pub fn spanning_actions(r: &mut ChaCha8Rng, d: usize, k: usize, max_norm: f64) -> ActionSet {
    assert!(k >= d);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut v: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        if i < d {
            v.iter_mut().for_each(|x| *x *= 0.1);
            v[i] = 1.0;
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target = max_norm * r.random_range(0.2..1.0);
        out.push(v.into_iter().map(|x| x / n * target).collect());
    }
    ActionSet::new(out).unwrap()
}

pub fn random_vector(r: &mut ChaCha8Rng, d: usize, norm: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n * norm).collect()
}

pub fn random_instance(r: &mut ChaCha8Rng, d: usize, k: usize, rho: f64) -> MVInstance {
    let actions = spanning_actions(r, d, k, 1.0);
    let tn = r.random_range(0.1..1.0);
    let theta = random_vector(r, d, tn);
    let omega = 1.0;
    let pn = r.random_range(0.0..0.9);
    let phi = random_vector(r, d, pn);
    MVInstance::new(actions, theta, phi, omega, rho).unwrap()
}

/// `sum_{a != b} tau_a tau_b Gamma_ab^2 / T + sum_a tau_a Delta_a`, literally.
pub fn brute_force_regret(counts: &[u64], mu: &[f64], delta: &[f64]) -> f64 {
    let t: u64 = counts.iter().sum();
    let mut first = 0.0;
    let mut cross = 0.0;
    for a in 0..counts.len() {
        first += counts[a] as f64 * delta[a];
        for b in 0..counts.len() {
            if a != b {
                let g = mu[a] - mu[b];
                cross += counts[a] as f64 * counts[b] as f64 * g * g;
            }
        }
    }
    first + cross / t as f64
}
