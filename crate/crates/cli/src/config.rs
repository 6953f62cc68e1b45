//! Run configuration: one TOML file with flat dotted keys, overridable from
//! the command line.

use std::path::{Path, PathBuf};

use pfaffkp::correlation::FactorizationSettings;
use pfaffkp::goemc::GoeConfig;
use pfaffkp::hierarchy::{HierarchySettings, VirasoroForm};
use pfaffkp::partition::PartitionSettings;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Value;

/// Failure to read, parse or validate a configuration. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Damping ladder for the real-axis kernel oracle; must halve.
    pub eta_ladder: [f64; 3],
    /// Frequency at which the bosonic kernel is cross-checked.
    pub kernel_omega: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            eta_ladder: [0.01, 0.005, 0.0025],
            kernel_omega: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfkpConfig {
    pub interval_n_plus: [f64; 2],
    pub interval_n_minus: [f64; 2],
    pub points: usize,
    pub tolerance: f64,
    /// Factor applied to `ẑ_{n±1}`; anything but 1 is a deliberate fault.
    pub gauge: f64,
}

impl Default for PfkpConfig {
    fn default() -> Self {
        Self {
            interval_n_plus: [0.2, 1.2],
            interval_n_minus: [0.3, 2.0],
            points: 20,
            tolerance: 1e-5,
            gauge: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauConfig {
    /// Fermionic points `s = −iπω/2`, given by `ω`.
    pub fermionic_omegas: Vec<f64>,
    /// Real positive `s` for the bosonic Virasoro checks.
    pub bosonic_s: Vec<f64>,
    pub tolerance: f64,
    /// Smallest acceptable measured finite-difference order.
    pub min_order: f64,
    pub virasoro_forms: Vec<VirasoroForm>,
}

impl Default for TauConfig {
    fn default() -> Self {
        Self {
            fermionic_omegas: vec![0.5, 1.0],
            bosonic_s: vec![1.3],
            tolerance: 1e-4,
            min_order: 1.8,
            virasoro_forms: vec![VirasoroForm::AsPrinted, VirasoroForm::Reparametrization],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvesConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub resolution: usize,
    pub factorization: FactorizationSettings,
}

impl Default for CurvesConfig {
    fn default() -> Self {
        Self {
            omega_min: 0.05,
            omega_max: 10.0,
            resolution: 200,
            factorization: FactorizationSettings::default(),
        }
    }
}

/// Keys that change neither the numbers nor the report contents.
pub const EXECUTION_KEYS: [&str; 2] = ["output_dir", "threads"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
    pub partition: PartitionSettings,
    pub hierarchy: HierarchySettings,
    pub oracle: OracleConfig,
    pub pfkp: PfkpConfig,
    pub tau: TauConfig,
    pub curves: CurvesConfig,
    pub goe: GoeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            threads: 0,
            partition: PartitionSettings::default(),
            hierarchy: HierarchySettings::default(),
            oracle: OracleConfig::default(),
            pfkp: PfkpConfig::default(),
            tau: TauConfig::default(),
            curves: CurvesConfig::default(),
            goe: GoeConfig::default(),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        err(format!("{key} = {v} must be finite and > 0"))
    }
}

fn interval(key: &str, iv: [f64; 2]) -> Result<(), ConfigError> {
    if iv[0] > 0.0 && iv[1].is_finite() && iv[0] < iv[1] {
        Ok(())
    } else {
        err(format!("{key} = {iv:?} must satisfy 0 < lo < hi < inf"))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.partition;
        positive("partition.finite_tolerance", p.finite_tolerance)?;
        positive("partition.path.tolerance", p.path.tolerance)?;
        positive("partition.path.v_max", p.path.v_max)?;
        if !(2..=512).contains(&p.finite_order) || !(2..=512).contains(&p.path.nodes_per_panel) {
            return err("quadrature orders must lie in [2, 512]");
        }
        if p.path.panels == 0 {
            return err("partition.path.panels must be > 0");
        }
        let h = &self.hierarchy;
        positive("hierarchy.fit_tail_tolerance", h.fit_tail_tolerance)?;
        positive("hierarchy.fd_step_pfkp", h.fd_step_pfkp)?;
        positive("hierarchy.fd_step_virasoro", h.fd_step_virasoro)?;
        positive("hierarchy.fd_step_tolerance", h.fd_step_tolerance)?;
        positive("hierarchy.budget_factor", h.budget_factor)?;
        positive("hierarchy.residual_floor", h.residual_floor)?;
        if h.fit_degree < 4 {
            return err("hierarchy.fit_degree must be at least 4");
        }
        let ladder = self.oracle.eta_ladder;
        if !(ladder[0] > ladder[1] && ladder[1] > ladder[2] && ladder[2] > 0.0) {
            return err(format!("oracle.eta_ladder = {ladder:?} must be strictly decreasing and positive"));
        }
        positive("oracle.kernel_omega", self.oracle.kernel_omega)?;
        interval("pfkp.interval_n_plus", self.pfkp.interval_n_plus)?;
        interval("pfkp.interval_n_minus", self.pfkp.interval_n_minus)?;
        positive("pfkp.tolerance", self.pfkp.tolerance)?;
        positive("pfkp.gauge", self.pfkp.gauge)?;
        if self.pfkp.points == 0 {
            return err("pfkp.points must be > 0");
        }
        positive("tau.tolerance", self.tau.tolerance)?;
        positive("tau.min_order", self.tau.min_order)?;
        for &w in &self.tau.fermionic_omegas {
            positive("tau.fermionic_omegas", w)?;
        }
        for &s in &self.tau.bosonic_s {
            positive("tau.bosonic_s", s)?;
        }
        interval("curves", [self.curves.omega_min, self.curves.omega_max])?;
        if self.curves.resolution < 2 {
            return err("curves.resolution must be at least 2");
        }
        positive("curves.factorization.closure_tolerance", self.curves.factorization.closure_tolerance)?;
        positive("curves.factorization.panel_width", self.curves.factorization.panel_width)?;
        self.goe.validate().map_err(|e| ConfigError(e.to_string()))
    }

    /// Reads `path` (if any), applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut root = toml::Table::try_from(RunConfig::default()).expect("defaults serialize");
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            let file: toml::Table = text
                .parse()
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            for (key, value) in flatten(&file) {
                set_path(&mut root, &key, value)?;
            }
        }
        for item in overrides {
            let Some((key, raw)) = item.split_once('=') else {
                return err(format!("override `{item}` is not key=value"));
            };
            set_path(&mut root, key.trim(), parse_value(raw.trim()))?;
        }
        let cfg: RunConfig = Value::Table(root)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every setting as one `key = value` line, sorted by key.
    pub fn to_flat_toml(&self) -> String {
        let table = toml::Table::try_from(self).expect("config serializes");
        let mut lines: Vec<String> = flatten(&table)
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        lines.sort();
        lines.join("\n") + "\n"
    }

    /// SHA-256 of the flat rendering without the execution keys, so the
    /// hash names the computation and not where or how fast it ran.
    pub fn hash(&self) -> String {
        let text: String = self
            .to_flat_toml()
            .lines()
            .filter(|l| !EXECUTION_KEYS.iter().any(|k| l.starts_with(&format!("{k} ="))))
            .map(|l| format!("{l}\n"))
            .collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn parse_value(raw: &str) -> Value {
    // Bare words such as `as-printed` are taken as strings.
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn flatten(table: &toml::Table) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    for (k, v) in table {
        match v {
            Value::Table(inner) => {
                out.extend(flatten(inner).into_iter().map(|(ik, iv)| (format!("{k}.{ik}"), iv)));
            }
            other => out.push((k.clone(), other.clone())),
        }
    }
    out
}

fn set_path(root: &mut toml::Table, key: &str, value: Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields one part");
    let mut table = root;
    for part in parents {
        table = match table.get_mut(*part) {
            Some(Value::Table(t)) => t,
            _ => return err(format!("unknown configuration key `{key}`")),
        };
    }
    match table.get(*last) {
        None | Some(Value::Table(_)) => return err(format!("unknown configuration key `{key}`")),
        Some(old) => {
            let value = match (old, value) {
                (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
                (_, v) => v,
            };
            table.insert((*last).to_string(), value);
        }
    }
    Ok(())
}
