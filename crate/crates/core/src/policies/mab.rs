//! Multi-armed mean-variance baselines that ignore the linear structure.

use alloc::vec::Vec;

use rand_distr::{Distribution, Uniform};

use super::{expect_variant, PolicyConfig, Runner, Trajectory, Variant};
use crate::error::{Error, Result};
use crate::estimate::PullStats;
use crate::math;
use crate::model::Environment;

/// `ceil((T/14)^{2/3})` pulls per arm, in exact integer arithmetic.
pub fn expexp_exploration_per_arm(horizon: u64) -> u64 {
    math::ceil_two_thirds(1, horizon, 14)
}

fn argmin_mv(stats: &PullStats, k: usize, rho: f64) -> usize {
    let mut best = (0, f64::INFINITY);
    for a in 0..k {
        if stats.count(a) == 0 {
            continue;
        }
        let mv = stats.empirical_mv(a, rho);
        if mv < best.1 {
            best = (a, mv);
        }
    }
    best.0
}

/// Mean-variance lower confidence bound: after one pull of every arm, plays
/// `argmin_a MV_a - c sqrt(ln(1/delta) / (2 s_a))` with
/// `MV_a = var_hat_a - rho mu_hat_a`, `c = 5 + rho` and `delta = T^-2` by
/// default.
pub fn run_mv_ucb(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    expect_variant(cfg, Variant::MvUcb)?;
    let k = env.instance().num_actions();
    let t = cfg.horizon as f64;
    let delta = cfg.delta.unwrap_or(1.0 / (t * t));
    if !(delta > 0.0) {
        return Err(Error::InvalidConfig("horizon too large for default delta".into()));
    }
    let coeff = cfg.ucb_coeff.unwrap_or(5.0 + cfg.rho);
    let log_term = math::ln(1.0 / delta) / 2.0;
    let index = |stats: &PullStats, a: usize| {
        stats.empirical_mv(a, cfg.rho) - coeff * math::sqrt(log_term / stats.count(a) as f64)
    };

    let mut runner = Runner::new(env, cfg.horizon);
    let mut stats = PullStats::new(k);
    let mut bounds: Vec<f64> = Vec::with_capacity(k);
    for a in 0..k {
        let Some(x) = runner.pull(a) else { return Ok(runner.traj) };
        stats.record(a, x);
        bounds.push(index(&stats, a));
    }
    while !runner.done() {
        let mut best = 0;
        for (a, &b) in bounds.iter().enumerate() {
            if b < bounds[best] {
                best = a;
            }
        }
        let x = runner.pull(best).expect("not done");
        stats.record(best, x);
        bounds[best] = index(&stats, best);
    }
    Ok(runner.traj)
}

/// Mean-variance explore-then-commit on arms: every arm is pulled
/// `ceil((T/14)^{2/3})` times round-robin, then the lowest empirical
/// mean-variance arm is played. With many arms the exploration alone can
/// fill the horizon.
pub fn run_mv_expexp(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    expect_variant(cfg, Variant::MvExpExp)?;
    let k = env.instance().num_actions();
    let per_arm = expexp_exploration_per_arm(cfg.horizon);
    let budgets: Vec<(usize, u64)> = (0..k).map(|a| (a, per_arm)).collect();
    let mut runner = Runner::new(env, cfg.horizon);
    let mut stats = PullStats::new(k);
    let explored = runner.round_robin(&budgets, |a, x| stats.record(a, x));
    runner.traj.exploration_len = Some(explored);
    if runner.done() {
        return Ok(runner.traj);
    }
    let commit = argmin_mv(&stats, k, cfg.rho);
    runner.traj.committed = Some(commit);
    runner.play_until_end(commit);
    Ok(runner.traj)
}

/// Uniformly random actions from the environment's policy stream.
pub fn run_random(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    expect_variant(cfg, Variant::Random)?;
    let k = env.instance().num_actions();
    let mut rng = env.policy_rng();
    let uniform = Uniform::new(0, k).map_err(|e| Error::Internal(alloc::format!("{e}")))?;
    let mut runner = Runner::new(env, cfg.horizon);
    while !runner.done() {
        let a = uniform.sample(&mut rng);
        runner.pull(a);
    }
    Ok(runner.traj)
}
