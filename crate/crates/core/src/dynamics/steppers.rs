//! Fixed-step integrators for the Fourier-space system.

use num_complex::Complex64;

use super::propagator::Propagator;
use crate::error::{Error, Result};

/// Advances a coefficient vector by one step of size `h`.
///
/// On error the contents of `y` are unspecified; callers that need the
/// last good state keep their own copy.
pub trait TimeStepper {
    fn step(&mut self, prop: &mut Propagator, y: &mut [Complex64], t: f64, h: f64) -> Result<()>;
}

/// Classical explicit fourth-order Runge–Kutta.
pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    stage: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        let z = vec![Complex64::default(); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            stage: z,
        }
    }
}

/// Imaginary-axis stability limit of classical RK4 is 2√2 ≈ 2.83.
pub const RK4_IMAGINARY_AXIS_LIMIT: f64 = 2.8;

impl TimeStepper for Rk4 {
    fn step(&mut self, prop: &mut Propagator, y: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        let half = 0.5 * h;
        prop.rhs(y, &mut self.k1, t)?;
        axpy(&mut self.stage, y, half, &self.k1);
        prop.rhs(&self.stage, &mut self.k2, t + half)?;
        axpy(&mut self.stage, y, half, &self.k2);
        prop.rhs(&self.stage, &mut self.k3, t + half)?;
        axpy(&mut self.stage, y, h, &self.k3);
        prop.rhs(&self.stage, &mut self.k4, t + h)?;
        let w = h / 6.0;
        for j in 0..y.len() {
            y[j] += (self.k1[j] + 2.0 * (self.k2[j] + self.k3[j]) + self.k4[j]) * w;
        }
        Ok(())
    }
}

fn axpy(out: &mut [Complex64], y: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, &yy), &kk) in out.iter_mut().zip(y).zip(k) {
        *o = yy + kk * a;
    }
}

/// Yoshida's fourth-order composition of the symmetric Strang splitting
/// `L(τ/2) N(τ) L(τ/2)`, with `L` the exact diagonal linear flow and `N`
/// the exact nonlinear phase flow:
///
/// ```text
/// S₄(h) = S(w₁h) S(w₀h) S(w₁h),   w₁ = 1/(2 - 2^{1/3}),   w₀ = 1 - 2w₁
/// ```
///
/// Adjacent linear half-steps are merged, so one step costs three
/// nonlinear flows.
pub struct Splitting {
    cached_h: Option<f64>,
    outer: Vec<Complex64>,
    inner: Vec<Complex64>,
}

impl Splitting {
    pub fn new() -> Self {
        Self {
            cached_h: None,
            outer: Vec::new(),
            inner: Vec::new(),
        }
    }

    pub fn weights() -> (f64, f64) {
        let w1 = 1.0 / (2.0 - 2f64.cbrt());
        (w1, 1.0 - 2.0 * w1)
    }
}

impl Default for Splitting {
    fn default() -> Self {
        Self::new()
    }
}

impl TimeStepper for Splitting {
    fn step(&mut self, prop: &mut Propagator, y: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        let (w1, w0) = Self::weights();
        if self.cached_h != Some(h) {
            self.outer = prop.linear_factors(0.5 * w1 * h);
            self.inner = prop.linear_factors(0.5 * (w0 + w1) * h);
            self.cached_h = Some(h);
        }
        let apply = |y: &mut [Complex64], f: &[Complex64]| {
            for (c, &e) in y.iter_mut().zip(f) {
                *c *= e;
            }
        };
        apply(y, &self.outer);
        prop.nonlinear_flow(y, w1 * h, t)?;
        apply(y, &self.inner);
        prop.nonlinear_flow(y, w0 * h, t + w1 * h)?;
        apply(y, &self.inner);
        prop.nonlinear_flow(y, w1 * h, t + (w1 + w0) * h)?;
        apply(y, &self.outer);
        Ok(())
    }
}

/// Two-stage Gauss–Legendre collocation (order 4).
///
/// The stage equations `K = Λ(y + hAK) + N(y + hAK)` are solved by a
/// fixed-point iteration on the nonlinear term in which the diagonal
/// linear part `Λ` is inverted exactly, mode by mode:
/// `K ← (I - hΛ⊗A)⁻¹ (Λy𝟙 + N(Y(K)))`.
pub struct Irk4 {
    pub tolerance: f64,
    pub max_iterations: usize,
    cached_h: Option<f64>,
    // per mode: entries of (I - hλA)⁻¹, row major
    inverse: Vec<[Complex64; 4]>,
    y1: Vec<Complex64>,
    y2: Vec<Complex64>,
    n1: Vec<Complex64>,
    n2: Vec<Complex64>,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    pub last_iterations: usize,
}

const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const A11: f64 = 0.25;
const A12: f64 = 0.25 - SQRT3_6;
const A21: f64 = 0.25 + SQRT3_6;
const A22: f64 = 0.25;

impl Irk4 {
    pub fn new(n: usize) -> Self {
        let z = vec![Complex64::default(); n];
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            cached_h: None,
            inverse: Vec::new(),
            y1: z.clone(),
            y2: z.clone(),
            n1: z.clone(),
            n2: z.clone(),
            k1: z.clone(),
            k2: z,
            last_iterations: 0,
        }
    }

    fn prepare(&mut self, prop: &Propagator, h: f64) {
        if self.cached_h == Some(h) {
            return;
        }
        let one = Complex64::new(1.0, 0.0);
        self.inverse = prop
            .rates()
            .iter()
            .map(|&w| {
                let hl = Complex64::new(0.0, -w * h);
                let m11 = one - hl * A11;
                let m12 = -hl * A12;
                let m21 = -hl * A21;
                let m22 = one - hl * A22;
                let det = m11 * m22 - m12 * m21;
                [m22 / det, -m12 / det, -m21 / det, m11 / det]
            })
            .collect();
        self.cached_h = Some(h);
    }
}

impl TimeStepper for Irk4 {
    fn step(&mut self, prop: &mut Propagator, y: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        self.prepare(prop, h);
        let c1 = 0.5 - SQRT3_6;
        let c2 = 0.5 + SQRT3_6;
        let scale = y.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let threshold = self.tolerance * scale;

        prop.nonlinear_term(y, &mut self.n1, t)?;
        self.n2.copy_from_slice(&self.n1);
        self.y1.copy_from_slice(y);
        self.y2.copy_from_slice(y);

        let mut update = f64::INFINITY;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.max_iterations {
            iterations += 1;
            update = 0.0;
            for j in 0..y.len() {
                let lambda = Complex64::new(0.0, -prop.rates()[j]);
                let r1 = lambda * y[j] + self.n1[j];
                let r2 = lambda * y[j] + self.n2[j];
                let [i11, i12, i21, i22] = self.inverse[j];
                let k1 = i11 * r1 + i12 * r2;
                let k2 = i21 * r1 + i22 * r2;
                let s1 = y[j] + (k1 * A11 + k2 * A12) * h;
                let s2 = y[j] + (k1 * A21 + k2 * A22) * h;
                update = update
                    .max((s1 - self.y1[j]).norm())
                    .max((s2 - self.y2[j]).norm());
                self.k1[j] = k1;
                self.k2[j] = k2;
                self.y1[j] = s1;
                self.y2[j] = s2;
            }
            if update <= threshold {
                converged = true;
                break;
            }
            prop.nonlinear_term(&self.y1, &mut self.n1, t + c1 * h)?;
            prop.nonlinear_term(&self.y2, &mut self.n2, t + c2 * h)?;
        }
        self.last_iterations = iterations;
        if !converged {
            return Err(Error::StageIteration {
                t,
                iterations,
                update,
                tolerance: threshold,
            });
        }
        for j in 0..y.len() {
            y[j] += (self.k1[j] + self.k2[j]) * (0.5 * h);
        }
        Ok(())
    }
}
