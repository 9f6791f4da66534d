use alloc::vec::Vec;

use super::{expect_variant, Mode, PolicyConfig, Runner, Trajectory, Variant};
use crate::design::{solve_g_optimal, DesignWeights};
use crate::error::Result;
use crate::estimate::{argmin_score, PullStats};
use crate::math;
use crate::model::Environment;

/// Practical exploration length `ceil(d T^{2/3})`, computed in exact
/// integer arithmetic.
pub fn rise_practical_length(d: usize, horizon: u64) -> u64 {
    math::ceil_two_thirds(d as u64, horizon, 1)
}

/// Per-atom exploration budgets for `RISE`.
///
/// Practical mode spreads `ceil(d T^{2/3})` pulls as `ceil(n Q(a))` and then
/// trims from the largest budgets (lowest index first) so the total is
/// exactly `n`. Theoretical mode uses
/// `ceil(C~^2 d^2 ln(d) ln^2(1/delta) g(Q) Q(a) / eps^2)`. Every atom gets
/// at least one pull.
pub fn rise_budgets(design: &DesignWeights, d: usize, cfg: &PolicyConfig) -> Vec<(usize, u64)> {
    match cfg.mode {
        Mode::Practical => {
            let n = rise_practical_length(d, cfg.horizon);
            allocate_exact(design, n)
        }
        Mode::Theoretical => {
            let df = d as f64;
            let delta = cfg.delta_or_inverse_horizon();
            let eps = cfg
                .epsilon
                .unwrap_or_else(|| df * math::powf(cfg.horizon as f64, -1.0 / 3.0));
            let l = math::ln(1.0 / delta);
            let scale = cfg.c_tilde * cfg.c_tilde * df * df * math::ln(df) * l * l * design.g_value / (eps * eps);
            design
                .pairs()
                .map(|(a, q)| (a, math::ceil_count(scale * q).max(1)))
                .collect()
        }
    }
}

fn allocate_exact(design: &DesignWeights, n: u64) -> Vec<(usize, u64)> {
    let mut budgets: Vec<(usize, u64)> =
        design.pairs().map(|(a, q)| (a, math::ceil_count(n as f64 * q))).collect();
    let mut total: u64 = budgets.iter().map(|b| b.1).sum();
    while total > n {
        let slot = largest(&budgets);
        budgets[slot].1 -= 1;
        total -= 1;
    }
    while total < n {
        let slot = largest(&budgets);
        budgets[slot].1 += 1;
        total += 1;
    }
    budgets
}

fn largest(budgets: &[(usize, u64)]) -> usize {
    let mut best = 0;
    for (i, b) in budgets.iter().enumerate() {
        if b.1 > budgets[best].1 {
            best = i;
        }
    }
    best
}

/// Risk-aware explore-then-commit.
///
/// Explores the G-optimal design (round-robin over its atoms), fits both
/// least-squares estimates without regularisation, then commits to the
/// action with the lowest estimated mean-variance score for the rest of
/// the horizon.
pub fn run_rise(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    expect_variant(cfg, Variant::Rise)?;
    let inst = env.instance();
    let actions = inst.actions();
    let d = actions.dim();
    let design = solve_g_optimal(actions, &cfg.design)?;
    let budgets = rise_budgets(&design, d, cfg);

    let mut runner = Runner::new(env, cfg.horizon);
    let mut stats = PullStats::new(actions.len());
    let explored = runner.round_robin(&budgets, |a, x| stats.record(a, x));
    runner.traj.exploration_len = Some(explored);
    if runner.done() {
        return Ok(runner.traj);
    }
    let commit = if explored >= d as u64 {
        match stats.estimate(actions, inst.omega(), false) {
            Ok(est) => argmin_score(&est, cfg.rho, actions.iter().enumerate()).unwrap_or(0),
            Err(_) => 0,
        }
    } else {
        0
    };
    runner.traj.committed = Some(commit);
    runner.play_until_end(commit);
    Ok(runner.traj)
}
