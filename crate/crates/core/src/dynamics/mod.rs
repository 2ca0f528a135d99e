//! Time evolution of the semiclassically scaled equation
//!
//! ```text
//! iε ∂_t u = (-ε²Δ)^s u + |u|^{2p} u
//! ```
//!
//! carried out on the Fourier coefficients. Besides the steppers this
//! module provides the closed-form solutions used as oracles: the exact
//! linear propagator and the non-dispersive limit `s → 0`.

mod evolve;
mod propagator;
mod steppers;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use evolve::{evolve, Flow, IntegratorKind, NoObserver, Observer, StopReason, Trajectory};
pub use propagator::{Propagator, PropagatorOptions, Terms};
pub use steppers::{Irk4, Rk4, Splitting, TimeStepper, RK4_IMAGINARY_AXIS_LIMIT};

use crate::error::{Error, Result};
use crate::spectral::{
    check_fractional_power, forward_transform, inverse_transform, symbol_value, Field, Spectrum,
};

/// Physical parameters `(ε, s, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub epsilon: f64,
    pub s: f64,
    pub p: u32,
}

impl ModelParams {
    pub fn new(epsilon: f64, s: f64, p: u32) -> Result<Self> {
        let m = Self { epsilon, s, p };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config(
                "model.epsilon",
                format!("must be positive, got {}", self.epsilon),
            ));
        }
        check_fractional_power(self.s)?;
        if self.p < 1 {
            return Err(Error::config("model.p", "must be at least 1"));
        }
        Ok(())
    }

    /// `ε^{2s-1}`, the weight of the linear rotation rate.
    pub fn linear_weight(&self) -> f64 {
        self.epsilon.powf(2.0 * self.s - 1.0)
    }

    pub fn critical_indices(&self) -> CriticalIndices {
        CriticalIndices::new(self.s, self.p)
    }
}

/// Criticality data in one space dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalIndices {
    /// Scaling-critical Sobolev index `1/2 - s/p`.
    pub sigma_c: f64,
    /// Energy-critical power `p/(2p+2)`.
    pub s_star: f64,
    pub supercritical: bool,
}

impl CriticalIndices {
    pub fn new(s: f64, p: u32) -> Self {
        let pf = p as f64;
        let s_star = 0.5 * pf / (pf + 1.0);
        Self {
            sigma_c: 0.5 - s / pf,
            s_star,
            supercritical: s < s_star,
        }
    }
}

/// Fixed step schedule `h = t_end / N_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_end: f64,
    #[serde(rename = "n_steps")]
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        let tg = Self { t_end, n_steps };
        tg.validate()?;
        Ok(tg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::config(
                "time.t_end",
                format!("must be positive, got {}", self.t_end),
            ));
        }
        if self.n_steps < 1 {
            return Err(Error::config("time.n_steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Time after `i` steps, computed as `i·h` (no accumulation).
    pub fn time_at(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.t_end
        } else {
            i as f64 * self.step()
        }
    }
}

/// `dû/dt` for the full equation.
pub fn rhs_fourier(s: &Spectrum, mp: &ModelParams) -> Result<Spectrum> {
    let mut prop = Propagator::new(s.grid().clone(), *mp, PropagatorOptions::default())?;
    let mut out = vec![Complex64::default(); s.coeffs().len()];
    prop.rhs(s.coeffs(), &mut out, 0.0)?;
    Ok(Spectrum::from_parts(s.grid().clone(), out))
}

fn single_step(
    s: &Spectrum,
    h: f64,
    mp: &ModelParams,
    stepper: &mut dyn TimeStepper,
) -> Result<Spectrum> {
    if !(h > 0.0) {
        return Err(Error::config("time.h", format!("step must be positive, got {h}")));
    }
    let mut prop = Propagator::new(s.grid().clone(), *mp, PropagatorOptions::default())?;
    let mut y = s.coeffs().to_vec();
    stepper.step(&mut prop, &mut y, 0.0, h)?;
    Ok(Spectrum::from_parts(s.grid().clone(), y))
}

pub fn rk4_step(s: &Spectrum, h: f64, mp: &ModelParams) -> Result<Spectrum> {
    single_step(s, h, mp, &mut Rk4::new(s.coeffs().len()))
}

pub fn splitting_step(s: &Spectrum, h: f64, mp: &ModelParams) -> Result<Spectrum> {
    single_step(s, h, mp, &mut Splitting::new())
}

pub fn irk4_step(s: &Spectrum, h: f64, mp: &ModelParams) -> Result<Spectrum> {
    single_step(s, h, mp, &mut Irk4::new(s.coeffs().len()))
}

/// Solution of the linear equation at time `t`:
/// `F⁻¹(υ̂(k) e^{-iε^{2s-1}|k|^{2s} t})`.
pub fn exact_linear_solution(v: &Field, t: f64, mp: &ModelParams) -> Field {
    if t == 0.0 {
        return v.clone();
    }
    inverse_transform(&exact_linear_spectrum(&forward_transform(v), t, mp))
}

pub fn exact_linear_spectrum(s: &Spectrum, t: f64, mp: &ModelParams) -> Spectrum {
    let weight = mp.linear_weight();
    let coeffs = s
        .coeffs()
        .iter()
        .zip(s.grid().k())
        .map(|(&c, &k)| c * Complex64::from_polar(1.0, -weight * symbol_value(k, mp.s) * t))
        .collect();
    Spectrum::from_parts(s.grid().clone(), coeffs)
}

/// Closed-form solution of the non-dispersive limit
/// `iε ∂_t u = (1 + |u|^{2p}) u`:  `υ·e^{-it(1+|υ|^{2p})/ε}`.
pub fn limiting_solution(v: &Field, t: f64, mp: &ModelParams) -> Field {
    let p = mp.p as i32;
    let values = v
        .values()
        .iter()
        .map(|&u| u * Complex64::from_polar(1.0, -t * (1.0 + u.norm_sqr().powi(p)) / mp.epsilon))
        .collect();
    Field::from_parts(v.grid().clone(), values)
}

/// Group velocity `2s·sgn(ξ)|ξ|^{2s-1}` of the symbol `|ξ|^{2s}`.
pub fn group_velocity(xi: f64, s: f64) -> Result<f64> {
    check_fractional_power(s)?;
    if xi == 0.0 {
        // sgn(0) = 0 makes the value 0 wherever it is defined
        return if s < 0.5 {
            Err(Error::Domain(format!(
                "group velocity is singular at ξ = 0 for s = {s} < 1/2"
            )))
        } else {
            Ok(0.0)
        };
    }
    let exponent = 2.0 * s - 1.0;
    let mag = if exponent == 0.0 { 1.0 } else { xi.abs().powf(exponent) };
    Ok(2.0 * s * xi.signum() * mag)
}
