use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::{symbol_value, Grid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which parts of the equation are active. Anything other than `Full` is a
/// verification hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terms {
    #[default]
    Full,
    LinearOnly,
    NonlinearOnly,
}

impl Terms {
    pub fn linear(self) -> bool {
        self != Terms::NonlinearOnly
    }

    pub fn nonlinear(self) -> bool {
        self != Terms::LinearOnly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorOptions {
    pub terms: Terms,
    /// Zero the nonlinear term outside `|m| ≤ N/3`.
    pub dealias: bool,
}

/// Right-hand side of the Fourier-space system
///
/// ```text
/// dû/dt = -i ε^{2s-1} |k|^{2s} û - (i/ε) F(|u|^{2p} u)
/// ```
///
/// together with the two exact sub-flows used by the splitting scheme.
/// Owns the transform buffers so repeated evaluations do not allocate.
pub struct Propagator {
    grid: Arc<Grid>,
    model: ModelParams,
    options: PropagatorOptions,
    rates: Vec<f64>,
    mask: Option<Vec<bool>>,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: Arc<Grid>, model: ModelParams, options: PropagatorOptions) -> Result<Self> {
        model.validate()?;
        let n = grid.len();
        let weight = model.epsilon.powf(2.0 * model.s - 1.0);
        let rates = if options.terms.linear() {
            grid.k()
                .iter()
                .map(|&k| weight * symbol_value(k, model.s))
                .collect()
        } else {
            vec![0.0; n]
        };
        let mask = options.dealias.then(|| grid.dealias_mask());
        let scratch = vec![Complex64::default(); grid.scratch_len()];
        Ok(Self {
            grid,
            model,
            options,
            rates,
            mask,
            work: vec![Complex64::default(); n],
            scratch,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn options(&self) -> PropagatorOptions {
        self.options
    }

    /// Linear rotation rates `ε^{2s-1}|k|^{2s}` per natural-order mode.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }

    /// `dû/dt` for the coefficient vector `y`.
    pub fn rhs(&mut self, y: &[Complex64], out: &mut [Complex64], t: f64) -> Result<()> {
        if !self.options.terms.nonlinear() {
            for ((o, &c), &w) in out.iter_mut().zip(y).zip(&self.rates) {
                *o = -I * (c * w);
            }
            return Ok(());
        }
        self.cubic_like_term_raw(y, t)?;
        let inv_eps = 1.0 / self.model.epsilon;
        let phase = self.grid.forward_phase();
        match &self.mask {
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = -I * (y[j] * self.rates[j] + phase[j] * self.work[j] * inv_eps);
                }
            }
            Some(mask) => {
                for (j, o) in out.iter_mut().enumerate() {
                    let nl = if mask[j] { phase[j] * self.work[j] * inv_eps } else { Complex64::default() };
                    *o = -I * (y[j] * self.rates[j] + nl);
                }
            }
        }
        Ok(())
    }

    /// Nonlinear part `-(i/ε) F(|u|^{2p} u)` alone.
    pub fn nonlinear_term(&mut self, y: &[Complex64], out: &mut [Complex64], t: f64) -> Result<()> {
        if !self.options.terms.nonlinear() {
            out.fill(Complex64::default());
            return Ok(());
        }
        self.cubic_like_term_raw(y, t)?;
        let scale = -I / self.model.epsilon;
        let phase = self.grid.forward_phase();
        for (j, o) in out.iter_mut().enumerate() {
            let keep = self.mask.as_ref().is_none_or(|m| m[j]);
            *o = if keep { scale * phase[j] * self.work[j] } else { Complex64::default() };
        }
        Ok(())
    }

    /// Leaves the unnormalized FFT of `|u|^{2p} u` in `self.work`.
    fn cubic_like_term_raw(&mut self, y: &[Complex64], t: f64) -> Result<()> {
        self.work.copy_from_slice(y);
        self.grid.inverse_in_place(&mut self.work, &mut self.scratch);
        let p = self.model.p as i32;
        let mut finite = true;
        for w in self.work.iter_mut() {
            let amp = w.norm_sqr().powi(p);
            *w *= amp;
            finite &= w.re.is_finite() & w.im.is_finite();
        }
        if !finite {
            return Err(Error::Overflow { t });
        }
        self.grid.raw_forward(&mut self.work, &mut self.scratch);
        Ok(())
    }

    /// Exact linear flow over `tau`: `û ↦ û·e^{-i ω_k τ}`.
    pub fn linear_flow(&self, y: &mut [Complex64], tau: f64) {
        for (c, &w) in y.iter_mut().zip(&self.rates) {
            *c *= Complex64::from_polar(1.0, -w * tau);
        }
    }

    /// Precomputed factors `e^{-i ω_k τ}` for repeated linear flows.
    pub fn linear_factors(&self, tau: f64) -> Vec<Complex64> {
        self.rates
            .iter()
            .map(|&w| Complex64::from_polar(1.0, -w * tau))
            .collect()
    }

    /// Exact nonlinear flow over `tau`: `u ↦ u·e^{-i|u|^{2p} τ/ε}` applied in
    /// physical space. Leaves `|u|` unchanged pointwise.
    pub fn nonlinear_flow(&mut self, y: &mut [Complex64], tau: f64, t: f64) -> Result<()> {
        if !self.options.terms.nonlinear() {
            return Ok(());
        }
        self.grid.inverse_in_place(y, &mut self.scratch);
        let p = self.model.p as i32;
        let rate = tau / self.model.epsilon;
        let mut finite = true;
        for u in y.iter_mut() {
            let angle = u.norm_sqr().powi(p) * rate;
            finite &= angle.is_finite();
            *u *= Complex64::from_polar(1.0, -angle);
        }
        if !finite {
            return Err(Error::Overflow { t });
        }
        self.grid.forward_in_place(y, &mut self.scratch);
        if let Some(mask) = &self.mask {
            for (c, &keep) in y.iter_mut().zip(mask) {
                if !keep {
                    *c = Complex64::default();
                }
            }
        }
        Ok(())
    }

    /// Nonlinear phase flow on physical samples, no transforms.
    pub fn nonlinear_phase(&self, u: &mut [Complex64], tau: f64) {
        let p = self.model.p as i32;
        let rate = tau / self.model.epsilon;
        for v in u.iter_mut() {
            let angle = v.norm_sqr().powi(p) * rate;
            *v *= Complex64::from_polar(1.0, -angle);
        }
    }
}
