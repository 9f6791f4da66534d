//! Bandit policies: `RISE` (explore-then-commit on a G-optimal design),
//! `RISE++` (phased elimination on G-optimal designs), the multi-armed
//! mean-variance baselines `MV-UCB` and `MV-ExpExp`, and a uniform-random
//! control.

mod mab;
mod rise;
mod risepp;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use mab::{expexp_exploration_per_arm, run_mv_expexp, run_mv_ucb, run_random};
pub use rise::{rise_budgets, rise_practical_length, run_rise};
pub use risepp::{
    eliminate, risepp_budget, run_risepp, run_risepp_with, ExactEstimates, LeastSquares, PhaseEstimator,
};

use crate::design::DesignOptions;
use crate::error::{Error, Result};
use crate::model::Environment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Rise,
    RisePP,
    MvUcb,
    MvExpExp,
    Random,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Self::Rise, Self::RisePP, Self::MvUcb, Self::MvExpExp, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rise => "RISE",
            Self::RisePP => "RISEPP",
            Self::MvUcb => "MV_UCB",
            Self::MvExpExp => "MV_EXPEXP",
            Self::Random => "RANDOM",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name().eq_ignore_ascii_case(s))
    }
}

/// Budget rule: the simplified schedules used in practice, or the formulas
/// with explicit (user-supplied) constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Practical,
    Theoretical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub variant: Variant,
    pub horizon: u64,
    pub rho: f64,
    pub mode: Mode,
    /// `RISE` theoretical-mode constant.
    pub c_tilde: f64,
    /// `RISE++` theoretical-mode constant.
    pub c_hat: f64,
    /// `RISE++` practical-mode multiplier.
    pub practical_coeff: f64,
    /// Confidence level; `None` picks the policy default (`1/T` for the
    /// linear policies, `T^-2` for MV-UCB).
    pub delta: Option<f64>,
    /// `RISE` theoretical accuracy; `None` means `d T^{-1/3}`.
    pub epsilon: Option<f64>,
    /// MV-UCB exploration coefficient; `None` means `5 + rho`.
    pub ucb_coeff: Option<f64>,
    pub design: DesignOptions,
}

impl PolicyConfig {
    pub fn new(variant: Variant, horizon: u64, rho: f64) -> Self {
        Self {
            variant,
            horizon,
            rho,
            mode: Mode::Practical,
            c_tilde: 1.0,
            c_hat: 1.0,
            practical_coeff: 1e-4,
            delta: None,
            epsilon: None,
            ucb_coeff: None,
            design: DesignOptions::default(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.horizon < 1 {
            return bad("horizon must be >= 1".into());
        }
        if !(self.rho >= 0.0) || !self.rho.is_finite() {
            return bad(format!("rho must be >= 0, got {}", self.rho));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("delta must lie in (0, 1), got {d}"));
            }
        }
        for (name, v) in [
            ("c_tilde", self.c_tilde),
            ("c_hat", self.c_hat),
            ("practical_coeff", self.practical_coeff),
            ("design.tolerance", self.design.tolerance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        if let Some(c) = self.ucb_coeff {
            if !(c >= 0.0) {
                return bad(format!("ucb_coeff must be >= 0, got {c}"));
            }
        }
        Ok(())
    }

    /// `delta`, defaulting to `1/T` (kept inside `(0, 1)` for `T = 1`).
    pub(crate) fn delta_or_inverse_horizon(&self) -> f64 {
        self.delta.unwrap_or(1.0 / self.horizon.max(2) as f64)
    }
}

/// One `RISE++` phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub phase: u32,
    /// Active set at the start of the phase, ascending indices.
    pub active: Vec<usize>,
    pub epsilon: f64,
    /// Planned pulls per design atom.
    pub budgets: Vec<(usize, u64)>,
    /// Pulls actually made (short of the plan only when the horizon hit).
    pub pulled: u64,
    pub g_value: f64,
}

/// Everything one policy run did.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub chosen: Vec<usize>,
    pub rewards: Vec<f64>,
    pub pull_counts: Vec<u64>,
    pub phase_log: Vec<PhaseRecord>,
    /// Length of the exploration stage for the explore-then-commit policies.
    pub exploration_len: Option<u64>,
    /// Committed action for the explore-then-commit policies.
    pub committed: Option<usize>,
}

impl Trajectory {
    pub fn with_capacity(k: usize, horizon: u64) -> Self {
        Self {
            chosen: Vec::with_capacity(horizon as usize),
            rewards: Vec::with_capacity(horizon as usize),
            pull_counts: vec![0; k],
            phase_log: Vec::new(),
            exploration_len: None,
            committed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn num_actions(&self) -> usize {
        self.pull_counts.len()
    }

    fn push(&mut self, action: usize, reward: f64) {
        self.chosen.push(action);
        self.rewards.push(reward);
        self.pull_counts[action] += 1;
    }

    /// Pull counts over the first `t` rounds.
    pub fn counts_prefix(&self, t: usize) -> Vec<u64> {
        let mut c = vec![0; self.pull_counts.len()];
        for &a in &self.chosen[..t.min(self.chosen.len())] {
            c[a] += 1;
        }
        c
    }

    /// Checks the bookkeeping invariants: counts agree with `chosen`, sum to
    /// the length, and logged active sets are nested.
    pub fn check(&self) -> Result<()> {
        let recount = self.counts_prefix(self.chosen.len());
        if recount != self.pull_counts {
            return Err(Error::Internal("pull counts disagree with chosen actions".into()));
        }
        if self.rewards.len() != self.chosen.len() {
            return Err(Error::Internal("rewards and actions differ in length".into()));
        }
        for w in self.phase_log.windows(2) {
            if !w[1].active.iter().all(|a| w[0].active.binary_search(a).is_ok()) {
                return Err(Error::Internal(format!("phase {} active set not nested", w[1].phase)));
            }
        }
        Ok(())
    }
}

/// Shared pull loop bookkeeping: stops at the horizon.
pub(crate) struct Runner<'e, 'a> {
    pub env: &'e mut Environment<'a>,
    pub traj: Trajectory,
    pub horizon: u64,
}

impl<'e, 'a> Runner<'e, 'a> {
    pub fn new(env: &'e mut Environment<'a>, horizon: u64) -> Self {
        let k = env.instance().num_actions();
        Self { env, traj: Trajectory::with_capacity(k, horizon), horizon }
    }

    #[inline]
    pub fn t(&self) -> u64 {
        self.traj.chosen.len() as u64
    }

    #[inline]
    pub fn done(&self) -> bool {
        self.t() >= self.horizon
    }

    /// Pulls `action`; `None` once the horizon is reached.
    #[inline]
    pub fn pull(&mut self, action: usize) -> Option<f64> {
        if self.done() {
            return None;
        }
        let x = self.env.pull(action);
        self.traj.push(action, x);
        Some(x)
    }

    pub fn play_until_end(&mut self, action: usize) {
        while self.pull(action).is_some() {}
    }

    /// Pulls each `(action, n)` round-robin until every budget is spent or
    /// the horizon hits; calls `on_pull` with each observation. Returns the
    /// number of pulls made.
    pub fn round_robin(&mut self, budgets: &[(usize, u64)], mut on_pull: impl FnMut(usize, f64)) -> u64 {
        let mut left: Vec<u64> = budgets.iter().map(|b| b.1).collect();
        let mut made = 0;
        let mut active = left.iter().any(|&n| n > 0);
        while active {
            active = false;
            for (slot, &(a, _)) in budgets.iter().enumerate() {
                if left[slot] == 0 {
                    continue;
                }
                let Some(x) = self.pull(a) else { return made };
                on_pull(a, x);
                made += 1;
                left[slot] -= 1;
                active |= left[slot] > 0;
            }
        }
        made
    }
}

/// Runs the policy selected by `cfg.variant`.
pub fn run_policy(env: &mut Environment<'_>, cfg: &PolicyConfig) -> Result<Trajectory> {
    match cfg.variant {
        Variant::Rise => run_rise(env, cfg),
        Variant::RisePP => run_risepp(env, cfg),
        Variant::MvUcb => run_mv_ucb(env, cfg),
        Variant::MvExpExp => run_mv_expexp(env, cfg),
        Variant::Random => run_random(env, cfg),
    }
}

pub(crate) fn expect_variant(cfg: &PolicyConfig, v: Variant) -> Result<()> {
    cfg.validate()?;
    if cfg.variant != v {
        return Err(Error::InvalidConfig(format!(
            "expected variant {}, got {}",
            v.name(),
            cfg.variant.name()
        )));
    }
    Ok(())
}
