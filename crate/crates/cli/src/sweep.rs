//! Batches of independent runs.
//!
//! ```toml
//! name = "supergaussian_table"       # output subdirectory, default: file stem
//!
//! [[run]]
//! preset = "super_s02_supergaussian"
//!
//! [[run]]
//! preset = "super_s02_supergaussian"
//! name = "s019"
//! overrides = ["model.s = 0.19"]
//!
//! [[run]]
//! config = "my_run.toml"            # relative to the sweep file
//! ```
//!
//! Each run writes its own directory below the sweep directory, and
//! `sweep.csv` collects one row per run. A run that fails to configure or
//! to integrate gets a row with the error message; the others proceed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::presets::load_preset;
use crate::run::{run, RunSummary};

pub const SWEEP_HEADER: &str = "name,s,p,stop_reason,t_f,mu,error";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub name: Option<String>,
    #[serde(default, rename = "run")]
    pub runs: Vec<SweepEntry>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    /// Replaces the configuration's own name.
    pub name: Option<String>,
    #[serde(default)]
    pub overrides: Vec<String>,
}

impl SweepEntry {
    fn label(&self, index: usize) -> String {
        self.name
            .clone()
            .or_else(|| self.preset.clone())
            .or_else(|| {
                self.config
                    .as_ref()
                    .and_then(|p| p.file_stem())
                    .map(|s| s.to_string_lossy().into_owned())
            })
            .unwrap_or_else(|| format!("run{index}"))
    }

    /// Resolves the entry; relative `config` paths are taken from `base`.
    pub fn resolve(&self, base: &Path) -> Result<RunConfig> {
        let mut overrides = self.overrides.clone();
        if let Some(n) = &self.name {
            overrides.push(format!("name = {}", toml::Value::String(n.clone())));
        }
        match (&self.preset, &self.config) {
            (Some(p), None) => load_preset(p, &overrides),
            (None, Some(c)) => RunConfig::from_path(&base.join(c), &overrides),
            _ => Err(CliError::config("run", "each entry needs exactly one of `preset` or `config`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub name: String,
    pub s: Option<f64>,
    pub p: Option<u32>,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

impl SweepFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::config("<document>", e.message().to_string()))?;
        serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let key = e.path().to_string();
            CliError::config(key, e.into_inner().message().to_string())
        })
    }
}

/// Runs every entry (in parallel) into `dir/<name>` and writes
/// `dir/sweep.csv`. Rows keep the order of the entries.
pub fn sweep(entries: &[SweepEntry], base: &Path, dir: &Path) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let resolved: Vec<(String, Result<RunConfig>)> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label(i), e.resolve(base)))
        .collect();
    let mut names: Vec<String> = Vec::with_capacity(resolved.len());
    for (label, cfg) in &resolved {
        let stem = cfg.as_ref().map(|c| c.name.clone()).unwrap_or_else(|_| label.clone());
        let mut name = stem.clone();
        let mut n = 1;
        while names.contains(&name) {
            n += 1;
            name = format!("{stem}_{n}");
        }
        names.push(name);
    }

    let rows: Vec<SweepRow> = resolved
        .into_par_iter()
        .zip(names.into_par_iter())
        .map(|((_, cfg), name)| match cfg {
            Err(e) => SweepRow {
                name,
                s: None,
                p: None,
                summary: None,
                error: Some(e.to_string()),
            },
            Ok(mut cfg) => {
                cfg.output.dir = Some(name.clone());
                let (s, p) = (cfg.model.s, cfg.model.p);
                match run(&cfg, dir) {
                    Ok((sim, _)) => SweepRow {
                        name,
                        s: Some(s),
                        p: Some(p),
                        summary: Some(sim.summary),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        name,
                        s: Some(s),
                        p: Some(p),
                        summary: None,
                        error: Some(e.to_string()),
                    },
                }
            }
        })
        .collect();

    let path = dir.join("sweep.csv");
    fs::write(&path, sweep_csv(&rows)).map_err(|e| CliError::io(&path, e))?;
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let stop = r
            .summary
            .as_ref()
            .map(|s| {
                serde_json::to_value(s.stop_reason)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default()
            })
            .unwrap_or_default();
        let sm = r.summary.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.name,
            num(r.s),
            r.p.map(|p| p.to_string()).unwrap_or_default(),
            stop,
            num(sm.and_then(|s| s.t_f)),
            num(sm.and_then(|s| s.mu_at_tf)),
            csv_quote(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
