//! Run configuration: a TOML document with the sections `[model]`,
//! `[grid]`, `[time]`, `[initial]`, `[norms]`, `[tracer]`, `[output]` and
//! `[hooks]`. Unknown keys are rejected.
//!
//! ```toml
//! name = "subcritical_s1_sech"
//! integrator = "splitting"      # rk4 (default) | irk4 | splitting
//!
//! [model]
//! epsilon = 0.1
//! s = 1.0
//! p = 1
//!
//! [grid]
//! L = 10.0                      # x ∈ [-Lπ, Lπ]
//! N = 16384
//!
//! [time]
//! t_end = 20.0
//! n_steps = 1000
//!
//! [initial]
//! kind = "sech"                 # sech | gaussian | supergaussian
//! amplitude = 1.0
//! ```
//!
//! Defaults for the optional parts:
//!
//! | key | default |
//! |-----|---------|
//! | `name` | `"run"` |
//! | `description` | `""` |
//! | `long` | `false` |
//! | `integrator` | `"rk4"` |
//! | `norms.lq_exponents` | `[2, 8, 10]` |
//! | `norms.sobolev_orders` | `["s", 0.5, 1]` |
//! | `norms.cadence` | `10` |
//! | `norms.normalize` | `false` |
//! | `tracer.enabled` | `true` (stop when `δ ≤ m`) |
//! | `tracer.n_fit` | `100` |
//! | `tracer.window.*` | see [`WindowPolicy`] |
//! | `tracer.peaks.*` | see [`PeakPolicy`] |
//! | `output.dir` | the run name, below the output root |
//! | `output.snapshot_times` | `t_end · {0, 1/4, 1/2, 3/4, 1}` |
//! | `output.spectrum_dump` | `true` |
//! | `hooks.terms` | `"full"` |
//! | `hooks.dealias` | `false` |

use std::path::Path;

use fnls_core::dynamics::{IntegratorKind, ModelParams, PropagatorOptions, TimeGrid};
use fnls_core::initial::InitialProfile;
use fnls_core::diagnostics::NormConfig;
use fnls_core::monitor::MonitorConfig;
use fnls_core::spectral::build_grid;
use fnls_core::tracer::{PeakPolicy, WindowPolicy};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Full-resolution runs that take hours; skipped by the test suite.
    #[serde(default)]
    pub long: bool,
    #[serde(default)]
    pub integrator: IntegratorKind,
    pub model: ModelParams,
    pub grid: GridConfig,
    pub time: TimeGrid,
    pub initial: InitialProfile,
    #[serde(default)]
    pub norms: NormConfig,
    #[serde(default)]
    pub tracer: TracerConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub hooks: PropagatorOptions,
}

fn default_name() -> String {
    "run".to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_period: f64,
    #[serde(rename = "N")]
    pub modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TracerConfig {
    pub enabled: bool,
    pub n_fit: usize,
    pub window: WindowPolicy,
    pub peaks: PeakPolicy,
}

impl Default for TracerConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            n_fit: 100,
            window: WindowPolicy::default(),
            peaks: PeakPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    pub spectrum_dump: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            snapshot_times: None,
            spectrum_dump: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text`, applies `key=value` overrides and validates.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::config("<document>", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<document>".to_string() } else { path };
            CliError::config(key, e.into_inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_with(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configurations always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(CliError::config(
                "name",
                format!("must be a non-empty file-safe identifier, got {:?}", self.name),
            ));
        }
        self.model.validate()?;
        build_grid(self.grid.half_period, self.grid.modes)?;
        self.time.validate()?;
        self.initial.validate()?;
        self.norms.validate()?;

        let t = &self.tracer;
        if t.n_fit < 1 {
            return Err(CliError::config("tracer.n_fit", "must be at least 1"));
        }
        let w = &t.window;
        if w.first_mode < 1 {
            return Err(CliError::config("tracer.window.first_mode", "must be at least 1"));
        }
        if !(w.relative_floor >= 0.0 && w.relative_floor < 1.0) {
            return Err(CliError::config(
                "tracer.window.relative_floor",
                format!("must lie in [0, 1), got {}", w.relative_floor),
            ));
        }
        if !(w.absolute_floor >= 0.0 && w.absolute_floor.is_finite()) {
            return Err(CliError::config(
                "tracer.window.absolute_floor",
                format!("must be finite and non-negative, got {}", w.absolute_floor),
            ));
        }
        if w.min_points < 3 {
            return Err(CliError::config("tracer.window.min_points", "must be at least 3"));
        }
        if !(t.peaks.fraction > 0.0 && t.peaks.fraction <= 1.0) {
            return Err(CliError::config(
                "tracer.peaks.fraction",
                format!("must lie in (0, 1], got {}", t.peaks.fraction),
            ));
        }
        if !(t.peaks.merge_radius >= 0.0 && t.peaks.merge_radius.is_finite()) {
            return Err(CliError::config(
                "tracer.peaks.merge_radius",
                format!("must be finite and non-negative, got {}", t.peaks.merge_radius),
            ));
        }
        if let Some(times) = &self.output.snapshot_times {
            if let Some(bad) = times
                .iter()
                .find(|&&s| !(s >= 0.0 && s <= self.time.t_end))
            {
                return Err(CliError::config(
                    "output.snapshot_times",
                    format!("{bad} lies outside [0, {}]", self.time.t_end),
                ));
            }
        }
        Ok(())
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.output.snapshot_times {
            Some(t) => t.clone(),
            None => [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|f| f * self.time.t_end)
                .collect(),
        }
    }

    /// Steps nearest to the requested snapshot times, ascending and unique.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let h = self.time.step();
        let mut steps: Vec<usize> = self
            .snapshot_times()
            .iter()
            .map(|t| ((t / h).round() as usize).min(self.time.n_steps))
            .collect();
        steps.sort_unstable();
        steps.dedup();
        steps
    }

    pub fn monitor_config(&self) -> MonitorConfig {
        let mut m = MonitorConfig::new(self.time.n_steps);
        m.norms = self.norms.clone();
        m.fit_every = self.tracer.n_fit;
        m.stop_on_singularity = self.tracer.enabled;
        m.window = self.tracer.window.clone();
        m.peaks = self.tracer.peaks.clone();
        m.snapshot_steps = self.snapshot_steps();
        m.terms = self.hooks.terms;
        m
    }

    /// Minimal resolved distance `2πL/N` of the configured grid.
    pub fn min_resolved_distance(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.grid.half_period / self.grid.modes as f64
    }
}

/// Sets `dotted.key = value` in `table`. The value is read as a TOML value
/// (`0.2`, `true`, `"rk4"`, `[1, 2]`); anything that does not parse is
/// taken as a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(spec.trim(), "override must have the form key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if key.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(key, "override key must be a dotted path"));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (last, parents) = parts.split_last().expect("non-empty path");
    let mut cur = table;
    for (i, p) in parents.iter().enumerate() {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| {
            CliError::config(parts[..=i].join("."), "is not a section and cannot take sub-keys")
        })?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
