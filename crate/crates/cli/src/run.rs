//! Executes one configuration and writes its output directory:
//!
//! - `config.toml`: the validated configuration, re-parseable
//! - `diagnostics.csv`: one row per recorded step
//! - `snapshot_t<t>.csv`: `x, re_u, im_u, abs_u` at the snapshot times and
//!   at the final time
//! - `spectrum_t<t>.csv`: `k` ascending and `abs_uhat`, when enabled
//! - `summary.json`: [`RunSummary`]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fnls_core::dynamics::{evolve, ModelParams, StopReason, Trajectory};
use fnls_core::initial::evaluate_profile;
use fnls_core::monitor::{Monitor, Sample};
use fnls_core::spectral::{build_grid, inverse_transform, Field, Spectrum};
use fnls_core::tracer::SingularityFit;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Environment variable that sets the directory runs are written below.
pub const OUTPUT_ROOT_VAR: &str = "FNLS_OUTPUT_ROOT";

pub const DIAGNOSTICS_HEADER: &str =
    "t,mass,energy,delta_E,linf,l2,l8,l10,hs_s,hs_half,hs_1,delta_fit,mu_fit,fit_residual";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub stop_reason: StopReason,
    /// Time of the last state.
    pub t_final: f64,
    pub steps: usize,
    pub t_f: Option<f64>,
    pub mu_at_tf: Option<f64>,
    pub x0_estimates: Vec<f64>,
    /// Last tail fit of the run; the one at `t_f` after a tracer stop.
    pub final_fit: Option<SingularityFit>,
    pub min_resolved_distance: f64,
    pub max_delta_e: f64,
    pub max_mass_drift: f64,
    pub overflow_at: Option<f64>,
    pub wall_clock_seconds: f64,
    pub config: RunConfig,
    pub version: String,
}

impl RunSummary {
    pub fn succeeded(&self) -> bool {
        self.stop_reason != StopReason::Overflow
    }
}

/// Everything a run produced, kept in memory.
pub struct Simulation {
    pub trajectory: Trajectory,
    pub monitor: Monitor,
    pub summary: RunSummary,
}

/// `$FNLS_OUTPUT_ROOT`, or `runs` in the working directory.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// `output.dir` if set (relative paths are taken below `root`), else
/// `root/<name>`.
pub fn output_dir(cfg: &RunConfig, root: &Path) -> PathBuf {
    match &cfg.output.dir {
        Some(d) => root.join(d),
        None => root.join(&cfg.name),
    }
}

/// Evolves the configuration without touching the file system.
pub fn simulate(cfg: &RunConfig) -> Result<Simulation> {
    simulate_inner(cfg).map_err(|(e, _)| e)
}

fn simulate_inner(cfg: &RunConfig) -> std::result::Result<Simulation, (CliError, Option<Monitor>)> {
    cfg.validate().map_err(|e| (e, None))?;
    let grid = build_grid(cfg.grid.half_period, cfg.grid.modes).map_err(|e| (e.into(), None))?;
    let u0 = evaluate_profile(&cfg.initial, &grid);
    let mut monitor = Monitor::new(cfg.model, cfg.monitor_config());
    let start = Instant::now();
    let result = evolve(&u0, &cfg.time, &cfg.model, cfg.integrator, cfg.hooks, &mut monitor);
    let wall = start.elapsed().as_secs_f64();
    let trajectory = match result {
        Ok(t) => t,
        Err(e) => return Err((e.into(), Some(monitor))),
    };
    let summary = summarize(cfg, &trajectory, &monitor, wall);
    Ok(Simulation {
        trajectory,
        monitor,
        summary,
    })
}

fn summarize(cfg: &RunConfig, traj: &Trajectory, mon: &Monitor, wall: f64) -> RunSummary {
    let final_fit = match mon.trace.t_f {
        Some(tf) => mon.trace.samples.iter().find(|(t, _)| *t == tf).map(|(_, f)| *f),
        None => mon.trace.samples.last().map(|(_, f)| *f),
    };
    RunSummary {
        name: cfg.name.clone(),
        stop_reason: traj.stop,
        t_final: traj.t,
        steps: traj.steps,
        t_f: mon.trace.t_f,
        mu_at_tf: mon.trace.mu_at_tf,
        x0_estimates: mon.trace.x0_estimate.clone(),
        final_fit,
        min_resolved_distance: cfg.min_resolved_distance(),
        max_delta_e: mon.max_delta_e,
        max_mass_drift: mon.max_mass_drift,
        overflow_at: traj.overflow_at,
        wall_clock_seconds: wall,
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Runs `cfg` and writes its output directory below `root`.
///
/// If the integrator fails, the diagnostics recorded so far are written
/// before the error is returned.
pub fn run(cfg: &RunConfig, root: &Path) -> Result<(Simulation, PathBuf)> {
    cfg.validate()?;
    let dir = output_dir(cfg, root);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write_file(&dir.join("config.toml"), &cfg.to_toml())?;
    match simulate_inner(cfg) {
        Ok(sim) => {
            write_outputs(&sim, &dir)?;
            Ok((sim, dir))
        }
        Err((e, monitor)) => {
            if let Some(m) = monitor {
                write_file(&dir.join("diagnostics.csv"), &diagnostics_csv(&m.samples, &cfg.model))?;
            }
            Err(e)
        }
    }
}

fn write_outputs(sim: &Simulation, dir: &Path) -> Result<()> {
    let cfg = &sim.summary.config;
    write_file(
        &dir.join("diagnostics.csv"),
        &diagnostics_csv(&sim.monitor.samples, &cfg.model),
    )?;
    let mut states: Vec<(f64, Field, Spectrum)> = sim
        .monitor
        .snapshots
        .iter()
        .map(|s| (s.t, s.field.clone(), s.spectrum.clone()))
        .collect();
    if !sim.monitor.snapshots.iter().any(|s| s.step == sim.trajectory.steps) {
        let spec = sim.trajectory.state.clone();
        states.push((sim.trajectory.t, inverse_transform(&spec), spec));
    }
    for (t, field, spec) in &states {
        write_file(&dir.join(format!("snapshot_t{}.csv", time_tag(*t))), &snapshot_csv(field))?;
        if cfg.output.spectrum_dump {
            write_file(&dir.join(format!("spectrum_t{}.csv", time_tag(*t))), &spectrum_csv(spec))?;
        }
    }
    let json = serde_json::to_string_pretty(&sim.summary).expect("summaries always serialize");
    write_file(&dir.join("summary.json"), &json)
}

/// Zero-padded fixed-point time for file names, so that names sort by time.
pub fn time_tag(t: f64) -> String {
    format!("{t:012.6}")
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| CliError::io(path, e))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn diagnostics_csv(samples: &[Sample], model: &ModelParams) -> String {
    let mut out = String::with_capacity(160 * (samples.len() + 1));
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for smp in samples {
        let r = &smp.record;
        let f = smp.fit.as_ref();
        let cells = [
            Some(r.t),
            Some(r.mass),
            Some(r.energy),
            Some(r.delta_e),
            Some(r.linf),
            r.lq(2.0),
            r.lq(8.0),
            r.lq(10.0),
            r.hs(model.s),
            r.hs(0.5),
            r.hs(1.0),
            f.map(|f| f.delta),
            f.map(|f| f.mu),
            f.map(|f| f.residual),
        ];
        let row: Vec<String> = cells.into_iter().map(cell).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn snapshot_csv(f: &Field) -> String {
    let mut out = String::from("x,re_u,im_u,abs_u\n");
    for (x, u) in f.grid().x().iter().zip(f.values()) {
        let _ = writeln!(out, "{x:e},{:e},{:e},{:e}", u.re, u.im, u.norm());
    }
    out
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("k,abs_uhat\n");
    for (k, a) in s.sorted_moduli() {
        let _ = writeln!(out, "{k:e},{a:e}");
    }
    out
}
