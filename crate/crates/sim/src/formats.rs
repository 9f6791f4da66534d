//! On-disk formats: instance JSON, trajectory CSV with its JSON sidecar,
//! design dumps, and the per-seed and aggregate regret CSVs.

use std::fs;
use std::io::Write;
use std::path::Path;

use riskbandit_core::policies::PhaseRecord;
use riskbandit_core::{ActionSet, DesignWeights, MVInstance, RegretReport, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub actions: Vec<Vec<f64>>,
    pub theta_star: Vec<f64>,
    pub phi_star: Vec<f64>,
    pub omega: f64,
    pub rho: f64,
    #[serde(default)]
    pub label: String,
}

impl InstanceFile {
    pub fn from_instance(inst: &MVInstance) -> Self {
        Self {
            d: inst.dim(),
            k: inst.num_actions(),
            actions: inst.actions().to_vecs(),
            theta_star: inst.theta_star().to_vec(),
            phi_star: inst.phi_star().to_vec(),
            omega: inst.omega(),
            rho: inst.rho(),
            label: inst.label().to_string(),
        }
    }

    pub fn into_instance(self) -> Result<MVInstance> {
        if self.actions.len() != self.k {
            return Err(SimError::Invalid(format!("K = {} but {} actions given", self.k, self.actions.len())));
        }
        if let Some(a) = self.actions.iter().find(|a| a.len() != self.d) {
            return Err(SimError::Invalid(format!("d = {} but an action has {} entries", self.d, a.len())));
        }
        let actions = ActionSet::new(self.actions)?;
        Ok(MVInstance::new(actions, self.theta_star, self.phi_star, self.omega, self.rho)?.with_label(self.label))
    }
}

pub fn write_instance(path: &Path, inst: &MVInstance) -> Result<()> {
    let text = serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serialises");
    fs::write(path, text + "\n").map_err(SimError::io(path))
}

pub fn read_instance(path: &Path) -> Result<MVInstance> {
    let text = fs::read_to_string(path).map_err(SimError::io(path))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(SimError::json(path))?;
    file.into_instance()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub phase: u32,
    pub active: Vec<usize>,
    pub epsilon: f64,
    pub budgets: Vec<(usize, u64)>,
    pub pulled: u64,
    pub g_value: f64,
}

impl From<&PhaseRecord> for PhaseEntry {
    fn from(p: &PhaseRecord) -> Self {
        Self {
            phase: p.phase,
            active: p.active.clone(),
            epsilon: p.epsilon,
            budgets: p.budgets.clone(),
            pulled: p.pulled,
            g_value: p.g_value,
        }
    }
}

/// Trajectory summary stored next to the row-per-round CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySidecar {
    pub policy: String,
    pub seed: u64,
    pub horizon: u64,
    pub pull_counts: Vec<u64>,
    pub exploration_len: Option<u64>,
    pub committed: Option<usize>,
    pub phase_log: Vec<PhaseEntry>,
}

impl TrajectorySidecar {
    pub fn new(policy: &str, seed: u64, traj: &Trajectory) -> Self {
        Self {
            policy: policy.to_string(),
            seed,
            horizon: traj.len() as u64,
            pull_counts: traj.pull_counts.clone(),
            exploration_len: traj.exploration_len,
            committed: traj.committed,
            phase_log: traj.phase_log.iter().map(PhaseEntry::from).collect(),
        }
    }
}

/// Writes `<stem>.csv` with rows `(t, action_index, reward)` (t from 1)
/// and `<stem>.json` with the sidecar.
pub fn write_trajectory(dir: &Path, stem: &str, sidecar: &TrajectorySidecar, traj: &Trajectory) -> Result<()> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| csv_error(&csv_path, 0, e))?;
    w.write_record(["t", "action_index", "reward"]).map_err(|e| csv_error(&csv_path, 0, e))?;
    for (t, (&a, &x)) in traj.chosen.iter().zip(&traj.rewards).enumerate() {
        w.write_record([(t + 1).to_string(), a.to_string(), x.to_string()])
            .map_err(|e| csv_error(&csv_path, t as u64 + 1, e))?;
    }
    w.flush().map_err(SimError::io(&csv_path))?;
    let json_path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(sidecar).expect("sidecar serialises");
    fs::write(&json_path, text + "\n").map_err(SimError::io(&json_path))
}

/// Reads back `(action_index, reward)` rows, checking that `t` counts up
/// from 1.
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, 0, e))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i as u64 + 1;
        let rec = rec.map_err(|e| csv_error(path, row, e))?;
        let t: u64 = field(&rec, 0, "t", path, row)?;
        if t != row {
            return Err(SimError::Csv { path: path.into(), row, msg: format!("expected t = {row}, found {t}") });
        }
        out.push((field(&rec, 1, "action_index", path, row)?, field(&rec, 2, "reward", path, row)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDump {
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    pub g: f64,
    pub gap: f64,
}

impl From<&DesignWeights> for DesignDump {
    fn from(q: &DesignWeights) -> Self {
        Self { support: q.support().to_vec(), weights: q.weights().to_vec(), g: q.g_value, gap: q.duality_gap }
    }
}

pub fn write_design(path: &Path, q: &DesignWeights) -> Result<()> {
    let text = serde_json::to_string_pretty(&DesignDump::from(q)).expect("design serialises");
    fs::write(path, text + "\n").map_err(SimError::io(path))
}

pub const PER_SEED_HEADER: [&str; 5] = ["policy", "scenario", "seed", "t", "intermediate_regret"];
pub const AGGREGATE_HEADER: [&str; 6] = ["policy", "scenario", "t", "mean_regret", "stderr", "n_seeds"];

/// Per-seed rows of every report, in report order then seed order.
pub fn per_seed_csv(reports: &[RegretReport]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PER_SEED_HEADER).expect("in-memory write");
    for r in reports {
        for (seed, curve) in &r.per_seed {
            for (t, v) in r.checkpoints.iter().zip(curve) {
                w.write_record([&r.meta.policy, &r.meta.scenario, &seed.to_string(), &t.to_string(), &v.to_string()])
                    .expect("in-memory write");
            }
        }
    }
    w.into_inner().expect("in-memory write")
}

pub fn aggregate_csv(reports: &[RegretReport]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_HEADER).expect("in-memory write");
    for r in reports {
        let n = r.n_seeds().to_string();
        for ((t, m), s) in r.checkpoints.iter().zip(&r.mean).zip(&r.stderr) {
            w.write_record([&r.meta.policy, &r.meta.scenario, &t.to_string(), &m.to_string(), &s.to_string(), &n])
                .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory write")
}

/// One aggregate CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub policy: String,
    pub scenario: String,
    pub t: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub n_seeds: usize,
}

/// Parses an aggregate CSV; errors name the offending row (1 = first data
/// row).
pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let file = fs::File::open(path).map_err(SimError::io(path))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| csv_error(path, 0, e))?.clone();
    if header.iter().collect::<Vec<_>>() != AGGREGATE_HEADER {
        return Err(SimError::Csv {
            path: path.into(),
            row: 0,
            msg: format!("header must be {}", AGGREGATE_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i as u64 + 1;
        let rec = rec.map_err(|e| csv_error(path, row, e))?;
        let parsed = AggregateRow {
            policy: rec[0].to_string(),
            scenario: rec[1].to_string(),
            t: field(&rec, 2, "t", path, row)?,
            mean_regret: field(&rec, 3, "mean_regret", path, row)?,
            stderr: field(&rec, 4, "stderr", path, row)?,
            n_seeds: field(&rec, 5, "n_seeds", path, row)?,
        };
        if !parsed.mean_regret.is_finite() || !(parsed.stderr >= 0.0) {
            return Err(SimError::Csv { path: path.into(), row, msg: "non-finite regret or negative stderr".into() });
        }
        out.push(parsed);
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str, path: &Path, row: u64) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| SimError::Csv { path: path.into(), row, msg: format!("missing {name}") })?;
    raw.trim()
        .parse()
        .map_err(|_| SimError::Csv { path: path.into(), row, msg: format!("bad {name} value {raw:?}") })
}

fn csv_error(path: &Path, row: u64, e: csv::Error) -> SimError {
    SimError::Csv { path: path.into(), row, msg: e.to_string() }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(SimError::io(path))?;
    f.write_all(bytes).map_err(SimError::io(path))
}
