//! Runs every (policy, seed) pair of a config and aggregates the
//! checkpointed intermediate regret.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use riskbandit_core::design::DesignOptions;
use riskbandit_core::sor::rescale_factor;
use riskbandit_core::{
    checkpoint_grid, gap_table, intermediate_regret, load_scenario, regret_curve, run_policy, solve_g_optimal,
    to_instance, Environment, GapTable, MVInstance, RegretReport, ReportMeta, PRNG_ID,
};
use serde_json::json;

use crate::config::{scenario_name, NamedPolicy, RunConfig};
use crate::error::{Result, SimError};
use crate::formats::{self, TrajectorySidecar};
use crate::plot;
use crate::seeds::GOLDEN;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));
/// Fallback output directory when neither `--out` nor `output_dir` is set.
pub const OUTPUT_ENV: &str = "RISKBANDIT_OUT";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    /// Where to write files; `None` keeps everything in memory.
    pub out_dir: Option<PathBuf>,
    pub save_trajectories: bool,
    pub dump_design: bool,
    pub plot: bool,
}

/// Everything a run needs besides the seeds, built once and shared.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub label: String,
    pub instance: MVInstance,
    pub rescale: f64,
    pub gaps: GapTable,
    pub checkpoints: Vec<u64>,
    pub policies: Vec<NamedPolicy>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: String,
    pub seed: u64,
    pub exploration_len: Option<u64>,
    pub committed: Option<usize>,
    pub phases: usize,
    pub final_regret: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub prepared: Prepared,
    /// One report per policy, in config order.
    pub reports: Vec<RegretReport>,
    /// Policy-major, seeds ascending.
    pub runs: Vec<RunSummary>,
    pub per_seed_csv: Vec<u8>,
    pub aggregate_csv: Vec<u8>,
    pub metadata: serde_json::Value,
    pub written: Vec<PathBuf>,
}

impl ExperimentOutput {
    pub fn report(&self, policy: &str) -> Option<&RegretReport> {
        self.reports.iter().find(|r| r.meta.policy == policy)
    }
}

/// `--out`, then the config's `output_dir`, then `$RISKBANDIT_OUT`, then
/// `results/<label>`.
pub fn resolve_output_dir(cli: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| Path::new("results").join(cfg.label().replace('/', "_")))
}

/// Log-spaced grid plus `T/4`, `T/2` and any requested extras.
pub fn checkpoints(cfg: &RunConfig) -> Vec<u64> {
    let t = cfg.horizon;
    let mut c = checkpoint_grid(t, cfg.checkpoints);
    c.extend([t / 4, t / 2].into_iter().filter(|&x| x > 0));
    c.extend(&cfg.extra_checkpoints);
    c.sort_unstable();
    c.dedup();
    c
}

pub fn build_instance(cfg: &RunConfig) -> Result<(MVInstance, f64)> {
    match scenario_name(&cfg.scenario) {
        Some(name) => {
            let mut spec = load_scenario(name)?;
            if let Some(rho) = cfg.rho {
                spec.rho = rho;
            }
            Ok((to_instance(&spec, cfg.shares)?, rescale_factor(&spec)))
        }
        None => {
            let inst = formats::read_instance(Path::new(&cfg.scenario))?;
            let inst = match cfg.rho {
                Some(rho) => inst.with_rho(rho)?,
                None => inst,
            };
            Ok((inst, 1.0))
        }
    }
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let (instance, rescale) = build_instance(cfg)?;
    let policies = cfg.policy_configs(instance.rho())?;
    Ok(Prepared {
        label: cfg.label(),
        gaps: gap_table(&instance),
        checkpoints: checkpoints(cfg),
        policies,
        seeds: cfg.seeds.resolve(),
        instance,
        rescale,
    })
}

pub fn run_experiment(cfg: &RunConfig, opts: &RunOptions) -> Result<ExperimentOutput> {
    let prep = prepare(cfg)?;
    let traj_dir = match (&opts.out_dir, opts.save_trajectories) {
        (Some(dir), true) => Some(dir.join("trajectories")),
        _ => None,
    };
    if let Some(dir) = opts.out_dir.iter().chain(traj_dir.iter()).last() {
        fs::create_dir_all(dir).map_err(SimError::io(dir))?;
    }
    let mut seeds = prep.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let tasks: Vec<(usize, u64)> =
        (0..prep.policies.len()).flat_map(|p| seeds.iter().map(move |&s| (p, s))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| SimError::Invalid(format!("thread pool: {e}")))?;
    let results: Vec<Result<(Vec<f64>, RunSummary)>> =
        pool.install(|| tasks.par_iter().map(|&(p, seed)| run_one(&prep, p, seed, traj_dir.as_deref())).collect());

    let hash = cfg.hash();
    let mut reports: Vec<RegretReport> = prep
        .policies
        .iter()
        .map(|p| {
            let meta = ReportMeta {
                policy: p.name.clone(),
                scenario: prep.label.clone(),
                config_hash: hash.clone(),
                prng: PRNG_ID.to_string(),
            };
            RegretReport::new(meta, prep.checkpoints.clone())
        })
        .collect();
    let mut runs = Vec::with_capacity(results.len());
    for (&(p, seed), res) in tasks.iter().zip(results) {
        let (curve, summary) = res?;
        reports[p].add_run(seed, curve)?;
        runs.push(summary);
    }

    let per_seed_csv = formats::per_seed_csv(&reports);
    let aggregate_csv = formats::aggregate_csv(&reports);
    let metadata = metadata(cfg, &prep, &hash);
    let mut written = Vec::new();
    if let Some(dir) = &opts.out_dir {
        let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
            let path = dir.join(name);
            formats::write_bytes(&path, bytes)?;
            written.push(path);
            Ok(())
        };
        put("per_seed.csv", &per_seed_csv)?;
        put("aggregate.csv", &aggregate_csv)?;
        put("metadata.json", (serde_json::to_string_pretty(&metadata).expect("json") + "\n").as_bytes())?;
        let inst_path = dir.join("instance.json");
        formats::write_instance(&inst_path, &prep.instance)?;
        written.push(inst_path);
        if opts.dump_design {
            let q = solve_g_optimal(prep.instance.actions(), &DesignOptions::with_tolerance(cfg.design_tolerance))?;
            let path = dir.join("design.json");
            formats::write_design(&path, &q)?;
            written.push(path);
        }
        if opts.plot {
            let rows = formats::read_aggregate_csv(&dir.join("aggregate.csv"))?;
            let svg = plot::render(&rows, &format!("{} (T = {})", prep.label, cfg.horizon))?;
            let path = dir.join("regret.svg");
            formats::write_bytes(&path, svg.as_bytes())?;
            written.push(path);
        }
    }
    Ok(ExperimentOutput { prepared: prep, reports, runs, per_seed_csv, aggregate_csv, metadata, written })
}

fn run_one(prep: &Prepared, p: usize, seed: u64, traj_dir: Option<&Path>) -> Result<(Vec<f64>, RunSummary)> {
    let policy = &prep.policies[p];
    let mut env = Environment::new(&prep.instance, seed);
    let traj = run_policy(&mut env, &policy.config)?;
    let curve = regret_curve(&traj, &prep.gaps, &prep.checkpoints);
    let final_regret = intermediate_regret(&traj, &prep.gaps, policy.config.horizon)?;
    if let Some(dir) = traj_dir {
        let sidecar = TrajectorySidecar::new(&policy.name, seed, &traj);
        formats::write_trajectory(dir, &format!("{}_{seed}", policy.name), &sidecar, &traj)?;
    }
    let summary = RunSummary {
        policy: policy.name.clone(),
        seed,
        exploration_len: traj.exploration_len,
        committed: traj.committed,
        phases: traj.phase_log.len(),
        final_regret,
    };
    Ok((curve, summary))
}

fn metadata(cfg: &RunConfig, prep: &Prepared, hash: &str) -> serde_json::Value {
    let inst = &prep.instance;
    json!({
        "tool": "riskbandit-sim",
        "version": VERSION,
        "config": cfg,
        "config_hash": hash,
        "prng": PRNG_ID,
        "seed_derivation": format!("splitmix64(master_seed + (i + 1) * {GOLDEN:#018x})"),
        "seeds": prep.seeds,
        "log_convention": "natural",
        "checkpoints": prep.checkpoints,
        "instance": {
            "label": inst.label(),
            "d": inst.dim(),
            "K": inst.num_actions(),
            "omega": inst.omega(),
            "rho": inst.rho(),
            "best_index": prep.gaps.best,
            "rescale_factor": prep.rescale,
        },
        "policies": prep.policies.iter().map(|p| json!({
            "name": p.name,
            "variant": p.config.variant.name(),
            "mode": format!("{:?}", p.config.mode).to_ascii_lowercase(),
            "c_tilde": p.config.c_tilde,
            "c_hat": p.config.c_hat,
            "practical_coeff": p.config.practical_coeff,
            "delta": p.config.delta,
            "epsilon": p.config.epsilon,
            "ucb_coeff": p.config.ucb_coeff,
        })).collect::<Vec<_>>(),
    })
}
