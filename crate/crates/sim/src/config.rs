//! Experiment configuration (JSON) and the built-in figure presets.

use std::fs;
use std::path::{Path, PathBuf};

use riskbandit_core::design::DesignOptions;
use riskbandit_core::{Mode, PolicyConfig, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};
use crate::seeds::derive_seeds;

pub const DEFAULT_CHECKPOINTS: usize = 100;
pub const DEFAULT_SEEDS: usize = 20;
pub const PRESET_HORIZON: u64 = 100_000;
pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `I`, `II`, `III`, or a path to an instance JSON file (relative paths
    /// resolve against the config file's directory).
    pub scenario: String,
    /// Shares per round; ignored for instance files.
    #[serde(default = "default_shares")]
    pub shares: u32,
    pub horizon: u64,
    /// Overrides the scenario's risk tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub policies: Vec<PolicyEntry>,
    pub seeds: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_checkpoints: Vec<u64>,
    #[serde(default = "default_tolerance")]
    pub design_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn default_shares() -> u32 {
    4
}

fn default_checkpoints() -> usize {
    DEFAULT_CHECKPOINTS
}

fn default_tolerance() -> f64 {
    DesignOptions::default().tolerance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Derived { master_seed: u64, count: usize },
}

impl SeedSpec {
    pub fn resolve(&self) -> Vec<u64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Derived { master_seed, count } => derive_seeds(*master_seed, *count),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::List(v) => v.len(),
            Self::Derived { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A policy given either by name or with explicit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyEntry {
    Name(String),
    Full(PolicyParams),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyParams {
    pub variant: String,
    /// Column label in the reports; defaults to the variant name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub practical_coeff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ucb_coeff: Option<f64>,
}

impl PolicyEntry {
    fn params(&self) -> PolicyParams {
        match self {
            Self::Name(n) => PolicyParams { variant: n.clone(), ..Default::default() },
            Self::Full(p) => p.clone(),
        }
    }
}

/// A resolved policy: its report label and the core configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedPolicy {
    pub name: String,
    pub config: PolicyConfig,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(SimError::io(path))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(SimError::json(path))?;
        if scenario_name(&cfg.scenario).is_none() {
            let p = Path::new(&cfg.scenario);
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.scenario = dir.join(p).to_string_lossy().into_owned();
                }
            }
        }
        Ok(cfg)
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| match scenario_name(&self.scenario) {
            Some(n) => format!("{n}/S={}", self.shares),
            None => Path::new(&self.scenario)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into()),
        })
    }

    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        if self.scenario.trim().is_empty() {
            return Err(SimError::config("scenario", "must be I, II, III or a path"));
        }
        if self.shares == 0 {
            return Err(SimError::config("shares", "must be >= 1"));
        }
        if self.horizon < 10 {
            return Err(SimError::config("horizon", format!("must be >= 10, got {}", self.horizon)));
        }
        if let Some(rho) = self.rho {
            if !(rho >= 0.0) || !rho.is_finite() {
                return Err(SimError::config("rho", format!("must be >= 0, got {rho}")));
            }
        }
        if self.policies.is_empty() {
            return Err(SimError::config("policies", "at least one policy is required"));
        }
        if self.seeds.is_empty() {
            return Err(SimError::config("seeds", "at least one seed is required"));
        }
        if self.checkpoints == 0 {
            return Err(SimError::config("checkpoints", "must be >= 1"));
        }
        if let Some(&t) = self.extra_checkpoints.iter().find(|&&t| t == 0 || t > self.horizon) {
            return Err(SimError::config("extra_checkpoints", format!("{t} is outside [1, horizon]")));
        }
        if !(self.design_tolerance > 0.0) {
            return Err(SimError::config("design_tolerance", "must be positive"));
        }
        let policies = self.policy_configs(2.0)?;
        let mut names: Vec<&str> = policies.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(SimError::config("policies", format!("duplicate policy name {}", w[0])));
        }
        Ok(())
    }

    /// Policy configurations for a scenario whose risk tolerance is
    /// `scenario_rho` (the config's own `rho` wins when given).
    pub fn policy_configs(&self, scenario_rho: f64) -> Result<Vec<NamedPolicy>> {
        let rho = self.rho.unwrap_or(scenario_rho);
        self.policies
            .iter()
            .map(|entry| {
                let p = entry.params();
                let variant = Variant::from_name(&p.variant).ok_or_else(|| {
                    SimError::config("policies", format!("unknown variant {:?}", p.variant))
                })?;
                let mut cfg = PolicyConfig::new(variant, self.horizon, rho);
                cfg.mode = match p.mode.as_deref().map(str::to_ascii_lowercase).as_deref() {
                    None | Some("practical") => Mode::Practical,
                    Some("theoretical") => Mode::Theoretical,
                    Some(other) => return Err(SimError::config("policies", format!("unknown mode {other:?}"))),
                };
                if let Some(v) = p.c_tilde {
                    cfg.c_tilde = v;
                }
                if let Some(v) = p.c_hat {
                    cfg.c_hat = v;
                }
                if let Some(v) = p.practical_coeff {
                    cfg.practical_coeff = v;
                }
                cfg.delta = p.delta;
                cfg.epsilon = p.epsilon;
                cfg.ucb_coeff = p.ucb_coeff;
                cfg.design = DesignOptions::with_tolerance(self.design_tolerance);
                cfg.validate()
                    .map_err(|e| SimError::config("policies", format!("{}: {e}", variant.name())))?;
                Ok(NamedPolicy { name: p.name.unwrap_or_else(|| variant.name().to_string()), config: cfg })
            })
            .collect()
    }

    /// Keeps the first `n` seeds of a list, or sets the count of derived seeds.
    pub fn with_seed_count(mut self, n: usize) -> Result<Self> {
        self.seeds = match self.seeds {
            SeedSpec::Derived { master_seed, .. } => SeedSpec::Derived { master_seed, count: n },
            SeedSpec::List(v) if n <= v.len() => SeedSpec::List(v[..n].to_vec()),
            SeedSpec::List(v) => {
                return Err(SimError::config("seeds", format!("{n} seeds requested but the list has {}", v.len())))
            }
        };
        Ok(self)
    }

    /// SHA-256 of the canonical JSON of the config without its output
    /// directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let text = serde_json::to_string(&c).expect("config serialises");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// `Some("I" | "II" | "III")` for built-in scenario names.
pub fn scenario_name(s: &str) -> Option<&'static str> {
    ["I", "II", "III"].into_iter().find(|n| n.eq_ignore_ascii_case(s.trim()))
}

/// The four figure setups: scenarios I, II, III with four shares and
/// scenario III with eight, all at `T = 10^5` with 20 seeds.
pub fn preset(name: &str) -> Result<RunConfig> {
    let (scenario, shares) = match name.to_ascii_lowercase().as_str() {
        "fig1" => ("I", 4),
        "fig2" => ("II", 4),
        "fig3" => ("III", 4),
        "fig4" => ("III", 8),
        _ => return Err(SimError::Invalid(format!("unknown preset {name:?}; expected one of {PRESETS:?}"))),
    };
    Ok(RunConfig {
        scenario: scenario.into(),
        shares,
        horizon: PRESET_HORIZON,
        rho: None,
        policies: ["RISE", "RISEPP", "MV_UCB", "MV_EXPEXP"].iter().map(|s| PolicyEntry::Name(s.to_string())).collect(),
        seeds: SeedSpec::Derived { master_seed: 0, count: DEFAULT_SEEDS },
        output_dir: None,
        checkpoints: DEFAULT_CHECKPOINTS,
        extra_checkpoints: Vec::new(),
        design_tolerance: default_tolerance(),
        label: Some(name.to_ascii_lowercase()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> RunConfig {
        serde_json::from_str(r#"{"scenario": "I", "horizon": 1000, "policies": ["RISE"], "seeds": [1, 2]}"#).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = minimal();
        assert_eq!(c.shares, 4);
        assert_eq!(c.checkpoints, 100);
        assert_eq!(c.design_tolerance, 1e-3);
        assert!(c.validate().is_ok());
        assert_eq!(c.label(), "I/S=4");
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = minimal();
        c.horizon = 5;
        assert!(c.validate().unwrap_err().to_string().contains("`horizon`"));
        let mut c = minimal();
        c.policies.clear();
        assert!(c.validate().unwrap_err().to_string().contains("`policies`"));
        let mut c = minimal();
        c.seeds = SeedSpec::List(vec![]);
        assert!(c.validate().unwrap_err().to_string().contains("`seeds`"));
        let mut c = minimal();
        c.policies = vec![PolicyEntry::Name("THOMPSON".into())];
        assert!(c.validate().unwrap_err().to_string().contains("unknown variant"));
        let mut c = minimal();
        c.policies = vec![PolicyEntry::Name("RISE".into()), PolicyEntry::Name("rise".into())];
        assert!(c.validate().unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: std::result::Result<RunConfig, _> =
            serde_json::from_str(r#"{"scenario": "I", "horizon": 1000, "policies": ["RISE"], "seeds": [1], "horizn": 3}"#);
        assert!(r.is_err());
    }

    #[test]
    fn full_policy_entries() {
        let c: RunConfig = serde_json::from_str(
            r#"{"scenario": "II", "horizon": 1000, "seeds": {"master_seed": 7, "count": 3},
                "policies": [{"variant": "RISEPP", "mode": "theoretical", "c_hat": 0.5, "name": "RISEPP-theory"}, "MV_UCB"]}"#,
        )
        .unwrap();
        let p = c.policy_configs(2.0).unwrap();
        assert_eq!(p[0].name, "RISEPP-theory");
        assert_eq!(p[0].config.mode, Mode::Theoretical);
        assert_eq!(p[0].config.c_hat, 0.5);
        assert_eq!(p[1].config.variant, Variant::MvUcb);
        assert_eq!(c.seeds.resolve().len(), 3);
    }

    #[test]
    fn presets() {
        let f1 = preset("fig1").unwrap();
        assert_eq!((f1.scenario.as_str(), f1.shares, f1.horizon), ("I", 4, 100_000));
        assert_eq!(f1.seeds.len(), 20);
        assert_eq!(f1.policies.len(), 4);
        let f4 = preset("FIG4").unwrap();
        assert_eq!((f4.scenario.as_str(), f4.shares), ("III", 8));
        assert!(preset("fig5").is_err());
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = minimal();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let mut c = a.clone();
        c.horizon += 1;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn seed_count_override() {
        let c = preset("fig1").unwrap().with_seed_count(3).unwrap();
        assert_eq!(c.seeds.len(), 3);
        assert!(minimal().with_seed_count(5).is_err());
        assert_eq!(minimal().with_seed_count(1).unwrap().seeds, SeedSpec::List(vec![1]));
    }
}
