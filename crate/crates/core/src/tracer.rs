//! Singularity tracing from the decay of Fourier coefficients.
//!
//! If `u(t, ·)` extends analytically into a strip and has a singularity
//! `u ~ (z - z₀)^μ` at `z₀ = x₀ + iδ`, its Fourier coefficients behave like
//!
//! ```text
//! |û(k)| ~ C |k|^{-(1+μ)} e^{-δ|k|},   |k| → ∞.
//! ```
//!
//! [`fit_tail`] estimates `(δ, μ, log C)` by linear least squares on
//! `log|û|`; once `δ` drops to the grid's resolved distance
//! `m = 2πL/N` the singularity is indistinguishable from one on the real
//! axis and [`FitTrace::update`] signals a stop.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{Field, Spectrum};

/// Which coefficients enter the regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowPolicy {
    /// First positive mode index used; skips the non-asymptotic head.
    pub first_mode: usize,
    /// Coefficients at or below `max(relative_floor·max|û|, absolute_floor)`
    /// are round-off and excluded.
    pub relative_floor: f64,
    pub absolute_floor: f64,
    /// Fit the decreasing upper envelope of `|û|`: the modes that exceed
    /// every coefficient at larger `k`. On an oscillating tail these are the
    /// tops of the lobes, on a monotone tail every mode.
    pub envelope: bool,
    /// Fewest points a fit is attempted with.
    pub min_points: usize,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            first_mode: 20,
            relative_floor: 1e-12,
            absolute_floor: 1e-16,
            envelope: true,
            min_points: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitUnavailable {
    #[error("only {found} usable modes above the round-off floor (need {needed})")]
    TooFewModes { found: usize, needed: usize },
    #[error("least-squares system is singular")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityFit {
    /// Distance of the nearest complex singularity to the real axis.
    pub delta: f64,
    /// Algebraic order of the singularity.
    pub mu: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    /// Root-mean-square residual of `log|û|`.
    pub residual: f64,
    /// `(k_min, k_max)` of the fitted points.
    pub window: (f64, f64),
    pub n_points: usize,
}

impl SingularityFit {
    /// Model value `log C - (1+μ) log k - δ k`.
    pub fn log_model(&self, k: f64) -> f64 {
        self.intercept - (1.0 + self.mu) * k.ln() - self.delta * k
    }
}

/// Selected `(k, |û(k)|)` points for the regression, before fitting.
pub fn select_tail_points(s: &Spectrum, policy: &WindowPolicy) -> Vec<(f64, f64)> {
    let grid = s.grid();
    let n = grid.len();
    let moduli: Vec<f64> = s.coeffs().iter().map(|c| c.norm()).collect();
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let floor = (policy.relative_floor * max).max(policy.absolute_floor);
    let half = n / 2;
    let first = policy.first_mode.max(1);
    if first > half {
        return Vec::new();
    }
    let Some(last) = (first..=half).rev().find(|&j| moduli[j] > floor) else {
        return Vec::new();
    };
    let candidates: Vec<usize> = (first..=last).filter(|&j| moduli[j] > floor).collect();
    let chosen = if policy.envelope {
        let mut running = f64::NEG_INFINITY;
        let mut env: Vec<usize> = candidates
            .iter()
            .rev()
            .copied()
            .filter(|&j| {
                let keep = moduli[j] > running;
                running = running.max(moduli[j]);
                keep
            })
            .collect();
        env.reverse();
        env
    } else {
        candidates
    };
    chosen.into_iter().map(|j| (grid.k()[j], moduli[j])).collect()
}

/// Fits `log|û(k)| = log C - (1+μ) log k - δ k` over positive `k`.
pub fn fit_tail(s: &Spectrum, policy: &WindowPolicy) -> Result<SingularityFit, FitUnavailable> {
    let points = select_tail_points(s, policy);
    let needed = policy.min_points.max(3);
    if points.len() < needed {
        return Err(FitUnavailable::TooFewModes {
            found: points.len(),
            needed,
        });
    }
    fit_points(&points)
}

/// Least-squares fit on explicit `(k, |û|)` pairs with `k > 0`, `|û| > 0`.
pub fn fit_points(points: &[(f64, f64)]) -> Result<SingularityFit, FitUnavailable> {
    let n = points.len();
    if n < 3 {
        return Err(FitUnavailable::TooFewModes { found: n, needed: 3 });
    }
    // Columns scaled to comparable magnitude for conditioning.
    let k_scale = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let log_scale = k_scale.ln().abs().max(1.0);
    let a = DMatrix::from_fn(n, 3, |i, c| match c {
        0 => 1.0,
        1 => -points[i].0.ln() / log_scale,
        _ => -points[i].0 / k_scale,
    });
    let b = DVector::from_iterator(n, points.iter().map(|p| p.1.ln()));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-13 * smax) {
        return Err(FitUnavailable::Degenerate);
    }
    let x = svd.solve(&b, 0.0).map_err(|_| FitUnavailable::Degenerate)?;
    let intercept = x[0];
    let order = x[1] / log_scale;
    let delta = x[2] / k_scale;
    let r = &a * &x - &b;
    let residual = (r.norm_squared() / n as f64).sqrt();
    Ok(SingularityFit {
        delta,
        mu: order - 1.0,
        intercept,
        residual,
        window: (points[0].0, points[n - 1].0),
        n_points: n,
    })
}

/// Time series of fits and the detected singularity time.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FitTrace {
    pub samples: Vec<(f64, SingularityFit)>,
    pub t_f: Option<f64>,
    pub mu_at_tf: Option<f64>,
    pub x0_estimate: Vec<f64>,
}

impl FitTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a fit taken at time `t`. Returns `true` once `δ ≤ m` has
    /// been observed; `t_f` is the first such time and is never reset.
    pub fn update(&mut self, fit: SingularityFit, t: f64, m: f64) -> bool {
        debug_assert!(self.samples.last().is_none_or(|(tp, _)| *tp <= t));
        self.samples.push((t, fit));
        if self.t_f.is_none() && fit.delta <= m {
            self.t_f = Some(t);
            self.mu_at_tf = Some(fit.mu);
        }
        self.t_f.is_some()
    }

    pub fn stopped(&self) -> bool {
        self.t_f.is_some()
    }
}

/// Free-function form of [`FitTrace::update`].
pub fn update_trace(trace: &mut FitTrace, fit: SingularityFit, t: f64, m: f64) -> bool {
    trace.update(fit, t, m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakPolicy {
    /// Peaks must reach this fraction of `max|u|`.
    pub fraction: f64,
    /// Peaks closer than this (in `x`) are one estimate: the highest.
    pub merge_radius: f64,
}

impl Default for PeakPolicy {
    fn default() -> Self {
        Self {
            fraction: 0.8,
            merge_radius: 1.0,
        }
    }
}

/// Grid locations of the strong peaks of `|u|`, ascending in `x`.
pub fn locate_singularity(f: &Field, policy: &PeakPolicy) -> Vec<f64> {
    let a = f.moduli();
    let n = a.len();
    let max = a.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Vec::new();
    }
    let x = f.grid().x();
    let level = policy.fraction * max;
    let peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let left = a[(j + n - 1) % n];
            let right = a[(j + 1) % n];
            a[j] >= level && a[j] > left && a[j] >= right
        })
        .collect();

    let mut out = Vec::new();
    let mut cluster: Option<(usize, usize)> = None; // (last index, best index)
    for j in peaks {
        cluster = match cluster {
            Some((last, best)) if x[j] - x[last] <= policy.merge_radius => {
                Some((j, if a[j] > a[best] { j } else { best }))
            }
            Some((_, best)) => {
                out.push(x[best]);
                Some((j, j))
            }
            None => Some((j, j)),
        };
    }
    if let Some((_, best)) = cluster {
        out.push(x[best]);
    }
    out
}
