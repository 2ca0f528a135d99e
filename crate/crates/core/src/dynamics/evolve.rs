use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagator::{Propagator, PropagatorOptions};
use super::steppers::{Irk4, Rk4, Splitting, TimeStepper, RK4_IMAGINARY_AXIS_LIMIT};
use super::{ModelParams, TimeGrid};
use crate::error::{Error, Result};
use crate::spectral::{forward_transform, Field, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    #[default]
    Rk4,
    Irk4,
    Splitting,
}

impl IntegratorKind {
    fn stepper(self, n: usize) -> Box<dyn TimeStepper> {
        match self {
            IntegratorKind::Rk4 => Box::new(Rk4::new(n)),
            IntegratorKind::Irk4 => Box::new(Irk4::new(n)),
            IntegratorKind::Splitting => Box::new(Splitting::new()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    /// The observer requested a stop (the singularity tracer saw `δ ≤ m`).
    DeltaHitZero,
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Receives the state at selected steps. `observe` is always called for
/// step 0 and for the last state of the run, whatever `wants` says.
pub trait Observer {
    fn wants(&self, step: usize) -> bool;
    fn observe(&mut self, step: usize, t: f64, state: &Spectrum) -> Result<Flow>;
}

/// Observer that never stops the run.
pub struct NoObserver;

impl Observer for NoObserver {
    fn wants(&self, _step: usize) -> bool {
        false
    }

    fn observe(&mut self, _step: usize, _t: f64, _state: &Spectrum) -> Result<Flow> {
        Ok(Flow::Continue)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Last finite state.
    pub state: Spectrum,
    pub t: f64,
    pub steps: usize,
    pub stop: StopReason,
    /// Time of the step that produced non-finite values.
    pub overflow_at: Option<f64>,
}

/// Steps from `t = 0` to `t_end` with the fixed step `t_end / N_t`.
///
/// Overflow ends the run with [`StopReason::Overflow`] and the last finite
/// state; other integrator failures are returned as errors (the observer
/// keeps whatever it recorded up to then).
pub fn evolve(
    initial: &Field,
    tg: &TimeGrid,
    model: &ModelParams,
    integrator: IntegratorKind,
    options: PropagatorOptions,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    tg.validate()?;
    let grid = initial.grid().clone();
    let mut prop = Propagator::new(grid.clone(), *model, options)?;
    let h = tg.step();
    if integrator == IntegratorKind::Rk4 {
        let stiffness = h * prop.max_rate();
        if stiffness > RK4_IMAGINARY_AXIS_LIMIT {
            log::warn!(
                "RK4 step h = {h:e} times max linear rate {:.3e} is {stiffness:.3e}, \
                 beyond the stability limit {RK4_IMAGINARY_AXIS_LIMIT}",
                prop.max_rate()
            );
        }
    }
    let mut stepper = integrator.stepper(grid.len());

    let mut y = forward_transform(initial).into_coeffs();
    let mut last_good = y.clone();
    let snapshot = |y: &[Complex64]| Spectrum::from_parts(grid.clone(), y.to_vec());

    if observer.observe(0, 0.0, &snapshot(&y))? == Flow::Stop {
        return Ok(Trajectory {
            state: snapshot(&y),
            t: 0.0,
            steps: 0,
            stop: StopReason::DeltaHitZero,
            overflow_at: None,
        });
    }
    let mut observed_last = true;

    for i in 1..=tg.n_steps {
        let t_prev = tg.time_at(i - 1);
        last_good.copy_from_slice(&y);
        let result = stepper
            .step(&mut prop, &mut y, t_prev, h)
            .and_then(|()| check_finite(&y, tg.time_at(i)));
        match result {
            Ok(()) => {}
            Err(Error::Overflow { t }) => {
                if !observed_last {
                    observer.observe(i - 1, t_prev, &snapshot(&last_good))?;
                }
                return Ok(Trajectory {
                    state: snapshot(&last_good),
                    t: t_prev,
                    steps: i - 1,
                    stop: StopReason::Overflow,
                    overflow_at: Some(t),
                });
            }
            Err(e) => return Err(e),
        }
        let t = tg.time_at(i);
        observed_last = false;
        if observer.wants(i) || i == tg.n_steps {
            observed_last = true;
            if observer.observe(i, t, &snapshot(&y))? == Flow::Stop {
                return Ok(Trajectory {
                    state: snapshot(&y),
                    t,
                    steps: i,
                    stop: StopReason::DeltaHitZero,
                    overflow_at: None,
                });
            }
        }
    }
    Ok(Trajectory {
        state: snapshot(&y),
        t: tg.t_end,
        steps: tg.n_steps,
        stop: StopReason::Completed,
        overflow_at: None,
    })
}

fn check_finite(y: &[Complex64], t: f64) -> Result<()> {
    if y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Overflow { t })
    }
}
