//! Standard [`Observer`]: records diagnostics, runs the singularity tracer
//! and keeps requested snapshots while a trajectory is evolved.

use crate::diagnostics::{record, relative_energy_drift, Baseline, EnergyParts, DiagnosticsRecord, NormConfig};
use crate::dynamics::{Flow, ModelParams, Observer, Terms};
use crate::error::Result;
use crate::spectral::{inverse_transform, Field, Spectrum};
use crate::tracer::{fit_tail, locate_singularity, FitTrace, PeakPolicy, SingularityFit, WindowPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorConfig {
    pub norms: NormConfig,
    /// Fit the spectral tail every `fit_every` steps and at the last step.
    pub fit_every: usize,
    /// When false, fits are still recorded but never stop the run.
    pub stop_on_singularity: bool,
    pub window: WindowPolicy,
    pub peaks: PeakPolicy,
    /// Steps at which the full state is kept.
    pub snapshot_steps: Vec<usize>,
    pub n_steps: usize,
    /// Active terms of the evolution; `delta_e` tracks their Hamiltonian.
    pub terms: Terms,
}

impl MonitorConfig {
    pub fn new(n_steps: usize) -> Self {
        Self {
            norms: NormConfig::default(),
            fit_every: 100,
            stop_on_singularity: true,
            window: WindowPolicy::default(),
            peaks: PeakPolicy::default(),
            snapshot_steps: Vec::new(),
            n_steps,
            terms: Terms::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub record: DiagnosticsRecord,
    pub fit: Option<SingularityFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: Field,
    pub spectrum: Spectrum,
}

pub struct Monitor {
    model: ModelParams,
    cfg: MonitorConfig,
    baseline: Option<Baseline>,
    pub samples: Vec<Sample>,
    pub trace: FitTrace,
    pub snapshots: Vec<Snapshot>,
    pub max_delta_e: f64,
    pub max_mass_drift: f64,
}

impl Monitor {
    pub fn new(model: ModelParams, cfg: MonitorConfig) -> Self {
        Self {
            model,
            cfg,
            baseline: None,
            samples: Vec::new(),
            trace: FitTrace::new(),
            snapshots: Vec::new(),
            max_delta_e: 0.0,
            max_mass_drift: 0.0,
        }
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.cfg
    }

    pub fn records(&self) -> impl Iterator<Item = &DiagnosticsRecord> {
        self.samples.iter().map(|s| &s.record)
    }

    fn is_fit_step(&self, step: usize) -> bool {
        step % self.cfg.fit_every.max(1) == 0 || step == self.cfg.n_steps
    }
}

impl Observer for Monitor {
    fn wants(&self, step: usize) -> bool {
        step % self.cfg.norms.cadence.max(1) == 0
            || self.is_fit_step(step)
            || self.cfg.snapshot_steps.contains(&step)
    }

    fn observe(&mut self, step: usize, t: f64, state: &Spectrum) -> Result<Flow> {
        let field = inverse_transform(state);
        let baseline = self
            .baseline
            .get_or_insert_with(|| Baseline::new(&field, state, &self.cfg.norms, &self.model));
        let mut rec = record(&field, state, t, &self.cfg.norms, &self.model, baseline);
        if self.cfg.terms != Terms::Full {
            let now = EnergyParts {
                kinetic: rec.kinetic,
                potential: rec.potential,
            };
            let terms = self.cfg.terms;
            rec.delta_e =
                relative_energy_drift(now.conserved(terms), baseline.energy.conserved(terms)).value;
        }
        self.max_delta_e = self.max_delta_e.max(rec.delta_e);
        self.max_mass_drift = self.max_mass_drift.max(rec.mass_drift);

        let mut flow = Flow::Continue;
        let fit = if self.is_fit_step(step) {
            match fit_tail(state, &self.cfg.window) {
                Ok(fit) => {
                    let m = state.grid().min_resolved_distance();
                    let was_stopped = self.trace.stopped();
                    if self.trace.update(fit, t, m) && !was_stopped {
                        self.trace.x0_estimate = locate_singularity(&field, &self.cfg.peaks);
                        if self.cfg.stop_on_singularity {
                            flow = Flow::Stop;
                        }
                    }
                    Some(fit)
                }
                Err(e) => {
                    log::debug!("t = {t}: tail fit unavailable: {e}");
                    None
                }
            }
        } else {
            None
        };

        if self.cfg.snapshot_steps.contains(&step) {
            self.snapshots.push(Snapshot {
                step,
                t,
                field,
                spectrum: state.clone(),
            });
        }
        self.samples.push(Sample { step, record: rec, fit });
        Ok(flow)
    }
}
