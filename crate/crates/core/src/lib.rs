//! Risk-aware linear bandits under the mean-variance criterion.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the
//! algorithmic pieces: the bandit model and its reward sampler, a G-optimal
//! design solver, the least-squares estimators for the reward mean and
//! variance coefficients, the `RISE` explore-then-commit and `RISE++`
//! successive-elimination policies along with two multi-armed baselines,
//! the smart-order-routing instance generator, and regret metrics.
//!
//! File formats, the experiment harness and the command line live in the
//! `riskbandit-sim` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod design;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod model;
pub mod policies;
pub mod sor;

pub use design::{g_of, solve_g_optimal, solve_g_optimal_in_span, DesignOptions, DesignWeights};
pub use error::{Error, Result};
pub use estimate::{estimate_phi, estimate_theta, mv_score, DesignMatrix, Estimates, PullStats};
pub use metrics::{
    checkpoint_grid, gap_table, intermediate_regret, mean_variance, regret_curve, regret_from_counts,
    variance_decomposition_check, GapTable, RegretReport, ReportMeta, VarianceDecomposition,
};
pub use model::{ActionSet, Environment, MVInstance, PRNG_ID};
pub use policies::{run_policy, Mode, PolicyConfig, Trajectory, Variant};
pub use sor::{enumerate_allocations, load_scenario, sample_random_spec, to_instance, SorSpec};
