//! Periodic collocation grid, discrete Fourier transform and the
//! fractional-Laplacian symbol.
//!
//! The domain is `x ∈ [-Lπ, Lπ]` sampled at `x_n = (-π + 2nπ/N)·L`,
//! `n = 1..N`. Sample `j` of a [`Field`] sits at `x_{j+1}`, so `x` is sorted
//! ascending and ends exactly at `Lπ`.
//!
//! Transform convention: for wavenumber `k`,
//!
//! ```text
//! û(k) = (1/N) Σ_j u_j e^{-i k x_j},      u_j = Σ_k û(k) e^{i k x_j}
//! ```
//!
//! so a pure exponential `e^{i k₀ x}` has the single coefficient `1` at
//! `k₀`. The Parseval constant is `dx·Σ|u_j|² = 2πL·Σ|û(k)|²`.
//!
//! Coefficients are stored in FFT-natural order: index `j ≤ N/2` carries
//! `k = j/L`, index `j > N/2` carries `k = (j - N)/L`. The Nyquist mode is
//! kept once, at `+N/(2L)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid together with its planned transforms.
pub struct Grid {
    half_period: f64,
    n: usize,
    x: Vec<f64>,
    k: Vec<f64>,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // e^{-i k x_0} / N and e^{i k x_0}, per natural-order index
    phase_forward: Vec<Complex64>,
    phase_inverse: Vec<Complex64>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("L", &self.half_period)
            .field("N", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_period == other.half_period
    }
}

/// Builds the collocation grid for `x ∈ [-Lπ, Lπ]` with `N` points.
pub fn build_grid(half_period: f64, n: usize) -> Result<Arc<Grid>> {
    Grid::new(half_period, n).map(Arc::new)
}

impl Grid {
    pub fn new(half_period: f64, n: usize) -> Result<Self> {
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::config("grid.L", format!("must be positive, got {half_period}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::config(
                "grid.N",
                format!("must be a power of two ≥ 8, got {n}"),
            ));
        }
        let nf = n as f64;
        let dx = 2.0 * PI * half_period / nf;
        // (2n - N)/N is exact, so mirrored points are exact negatives.
        let scale = PI * half_period;
        let x = (1..=n)
            .map(|m| scale * ((2 * m) as f64 - nf) / nf)
            .collect();

        let mode_numbers: Vec<i64> = (0..n).map(|j| mode_number(j, n)).collect();
        let k = mode_numbers
            .iter()
            .map(|&m| m as f64 / half_period)
            .collect();

        // e^{-i k x_0} with x_0 = -πL + dx and k = m/L equals (-1)^m e^{-2πi m/N}.
        let phase_inverse: Vec<Complex64> = mode_numbers
            .iter()
            .map(|&m| {
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let (sin, cos) = (2.0 * PI * m as f64 / nf).sin_cos();
                Complex64::new(sign * cos, sign * sin)
            })
            .collect();
        let phase_forward = phase_inverse.iter().map(|p| p.conj() / nf).collect();

        let mut planner = FftPlanner::new();
        Ok(Self {
            half_period,
            n,
            x,
            k,
            dx,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            phase_forward,
            phase_inverse,
        })
    }

    /// Half-period scale `L`.
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Wavenumbers in FFT-natural order.
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Minimal distance resolved by the grid, `m = 2πL/N`.
    pub fn min_resolved_distance(&self) -> f64 {
        self.dx
    }

    /// Period `2πL`; the constant in Parseval's identity.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.half_period
    }

    /// Natural-order indices arranged by ascending wavenumber.
    pub fn ascending_order(&self) -> impl Iterator<Item = usize> + '_ {
        let half = self.n / 2;
        (half + 1..self.n).chain(0..=half)
    }

    /// Wavenumbers sorted ascending: `(1/L)·{-N/2+1, …, N/2}`.
    pub fn k_sorted(&self) -> Vec<f64> {
        self.ascending_order().map(|j| self.k[j]).collect()
    }

    /// Index of the grid point mirroring sample `j` through `x = 0`.
    pub fn mirror_index(&self, j: usize) -> usize {
        (2 * self.n - j - 2) % self.n
    }

    /// Forward transform in place; `scratch` must hold
    /// [`Grid::scratch_len`] elements.
    pub fn forward_in_place(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(data, scratch);
        for (c, p) in data.iter_mut().zip(&self.phase_forward) {
            *c *= p;
        }
    }

    /// Inverse transform in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        for (c, p) in data.iter_mut().zip(&self.phase_inverse) {
            *c *= p;
        }
        self.inverse.process_with_scratch(data, scratch);
    }

    /// Forward FFT without the phase/normalization pass. Callers fold
    /// [`Grid::forward_phase`] into their own loop.
    pub(crate) fn raw_forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(data, scratch);
    }

    pub(crate) fn forward_phase(&self) -> &[Complex64] {
        &self.phase_forward
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// Mask that keeps modes with `|m| ≤ N/3` (2/3 rule).
    pub fn dealias_mask(&self) -> Vec<bool> {
        let cutoff = self.n as i64 / 3;
        (0..self.n)
            .map(|j| mode_number(j, self.n).abs() <= cutoff)
            .collect()
    }
}

/// Integer mode number `m = L·k` for natural-order index `j`.
fn mode_number(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Complex samples `u(x_n)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Length {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite sample at index {j}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    /// Samples `f(x_n)` at every collocation point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.x().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// Fourier coefficients `û(k)`, indexed like [`Grid::k`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Length {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_parts(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `(k, |û(k)|)` pairs with `k` ascending.
    pub fn sorted_moduli(&self) -> Vec<(f64, f64)> {
        self.grid
            .ascending_order()
            .map(|j| (self.grid.k()[j], self.coeffs[j].norm()))
            .collect()
    }
}

pub fn forward_transform(f: &Field) -> Spectrum {
    let grid = f.grid.clone();
    let mut data = f.values.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    grid.forward_in_place(&mut data, &mut scratch);
    Spectrum::from_parts(grid, data)
}

pub fn inverse_transform(s: &Spectrum) -> Field {
    let grid = s.grid.clone();
    let mut data = s.coeffs.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    grid.inverse_in_place(&mut data, &mut scratch);
    Field::from_parts(grid, data)
}

/// `|k|^{2s}` element-wise. Zero at `k = 0`.
pub fn fractional_symbol(k: &[f64], s: f64) -> Result<Vec<f64>> {
    check_fractional_power(s)?;
    Ok(k.iter().map(|&kk| symbol_value(kk, s)).collect())
}

pub(crate) fn symbol_value(k: f64, s: f64) -> f64 {
    let a = k.abs();
    if s == 1.0 {
        a * a
    } else if s == 0.5 {
        a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(2.0 * s)
    }
}

pub(crate) fn check_fractional_power(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::config("model.s", format!("must lie in (0, 1], got {s}")))
    }
}

/// Rectangle-rule weight `dx`; `∫|u|² ≈ dx·Σ|u_n|²`.
pub fn quadrature_weight(g: &Grid) -> f64 {
    g.dx()
}
