use alloc::vec::Vec;

use super::{expect_variant, Mode, PhaseRecord, PolicyConfig, Runner, Trajectory, Variant};
use crate::design::solve_g_optimal_in_span;
use crate::error::{Error, Result};
use crate::estimate::{mv_score, Estimates, PullStats};
use crate::math;
use crate::model::{ActionSet, Environment};

/// Source of per-phase estimates. The default is least squares with the
/// identity ridge; tests swap in exact values.
pub trait PhaseEstimator {
    fn estimate(&mut self, phase: u32, stats: &PullStats, actions: &ActionSet, omega: f64) -> Result<Estimates>;
}

/// Ridge-regularised least squares on the current phase's pulls.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeastSquares;

impl PhaseEstimator for LeastSquares {
    fn estimate(&mut self, _phase: u32, stats: &PullStats, actions: &ActionSet, omega: f64) -> Result<Estimates> {
        stats.estimate(actions, omega, true)
    }
}

/// Ignores the data and reports fixed coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactEstimates {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl PhaseEstimator for ExactEstimates {
    fn estimate(&mut self, _phase: u32, stats: &PullStats, _actions: &ActionSet, _omega: f64) -> Result<Estimates> {
        Ok(Estimates { theta_hat: self.theta.clone(), phi_hat: self.phi.clone(), n_samples: stats.total() })
    }
}

/// Pulls planned for one design atom in phase `phase` (tolerance
/// `eps = 2^-phase`), at least one.
///
/// Practical: `ceil(coeff d^3 ln(d) Q(a) / eps^2 ln^2(K T^2))`.
/// Theoretical: `ceil(C^^2 d^2 g ln(d) Q(a) / eps^2 ln^2(K T / delta))`.
pub fn risepp_budget(cfg: &PolicyConfig, d: usize, k: usize, g: f64, q: f64, eps: f64) -> u64 {
    let df = d as f64;
    let t = cfg.horizon as f64;
    let raw = match cfg.mode {
        Mode::Practical => {
            let l = math::ln(k as f64 * t * t);
            cfg.practical_coeff * df * df * df * math::ln(df) * q / (eps * eps) * l * l
        }
        Mode::Theoretical => {
            let l = math::ln(k as f64 * t / cfg.delta_or_inverse_horizon());
            cfg.c_hat * cfg.c_hat * df * df * g * math::ln(df) * q / (eps * eps) * l * l
        }
    };
    math::ceil_count(raw).max(1)
}

/// Keeps `a` in `active` iff `max_b <rho theta - phi, b - a> <= 2 eps`,
/// i.e. its score is within `2 eps` of the best score.
pub fn eliminate(active: &[usize], actions: &ActionSet, est: &Estimates, rho: f64, eps: f64) -> Vec<usize> {
    let scores: Vec<f64> = active
        .iter()
        .map(|&a| mv_score(&est.theta_hat, &est.phi_hat, rho, actions.action(a)))
        .collect();
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    active
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s - best <= 2.0 * eps)
        .map(|(&a, _)| a)
        .collect()
}

/// Risk-aware successive elimination with least-squares estimates.
pub fn run_risepp(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    run_risepp_with(env, cfg, &mut LeastSquares)
}

/// Phased elimination: each phase solves a G-optimal design on the active
/// set (within its span when the survivors no longer span `R^d`), pulls
/// the design, re-estimates from that phase's data only, and drops actions
/// whose estimated score trails the best by more than `2 eps`.
pub fn run_risepp_with<E: PhaseEstimator + ?Sized>(
    env: &mut Environment<'_>,
    cfg: &PolicyConfig,
    estimator: &mut E,
) -> Result<Trajectory> {
    expect_variant(cfg, Variant::RisePP)?;
    let inst = env.instance();
    let actions = inst.actions();
    let (k, d) = (actions.len(), actions.dim());
    let mut runner = Runner::new(env, cfg.horizon);
    let mut active: Vec<usize> = (0..k).collect();
    let mut phase: u32 = 1;

    while !runner.done() {
        if active.len() == 1 {
            runner.play_until_end(active[0]);
            break;
        }
        let eps = math::powf(2.0, -(phase as f64));
        let sub = actions.subset(&active)?;
        let design = solve_g_optimal_in_span(&sub, &cfg.design)?.remap(&active);
        let budgets: Vec<(usize, u64)> = design
            .pairs()
            .map(|(a, q)| (a, risepp_budget(cfg, d, k, design.g_value, q, eps)))
            .collect();

        let mut stats = PullStats::new(k);
        let pulled = runner.round_robin(&budgets, |a, x| stats.record(a, x));
        let planned: u64 = budgets.iter().map(|b| b.1).sum();
        let record = PhaseRecord {
            phase,
            active: active.clone(),
            epsilon: eps,
            budgets,
            pulled,
            g_value: design.g_value,
        };
        if pulled < planned || runner.done() {
            runner.traj.phase_log.push(record);
            break;
        }
        let est = estimator.estimate(phase, &stats, actions, inst.omega())?;
        let survivors = eliminate(&active, actions, &est, cfg.rho, eps);
        if survivors.is_empty() {
            return Err(Error::Internal("elimination emptied the active set".into()));
        }
        runner.traj.phase_log.push(record);
        active = survivors;
        phase += 1;
    }
    Ok(runner.traj)
}
