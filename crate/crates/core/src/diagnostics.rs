//! Conserved quantities and norms, computed consistently with the
//! transform convention of [`crate::spectral`].
//!
//! Integrals use the rectangle rule `∫g ≈ dx·Σ g(x_n)`; spectral sums carry
//! the Parseval factor `2πL`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelParams, Terms};
use crate::error::{Error, Result};
use crate::spectral::{forward_transform, symbol_value, Field, Spectrum};

/// `M(u) = ∫|u|² dx`.
pub fn mass(f: &Field) -> f64 {
    f.grid().dx() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// Kinetic and potential parts of the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `½ ε^{2s} ∫ |(-Δ)^{s/2} u|²`, evaluated in Fourier space.
    pub kinetic: f64,
    /// `1/(2p+2) ∫ |u|^{2p+2}`.
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }

    /// The part conserved by the flow of `terms`.
    pub fn conserved(&self, terms: Terms) -> f64 {
        match terms {
            Terms::Full => self.total(),
            Terms::LinearOnly => self.kinetic,
            Terms::NonlinearOnly => self.potential,
        }
    }
}

pub fn energy_parts(f: &Field, s: &Spectrum, mp: &ModelParams) -> EnergyParts {
    let grid = f.grid();
    let weighted: f64 = s
        .coeffs()
        .iter()
        .zip(grid.k())
        .map(|(c, &k)| symbol_value(k, mp.s) * c.norm_sqr())
        .sum();
    let kinetic = 0.5 * mp.epsilon.powf(2.0 * mp.s) * grid.period() * weighted;
    let p = mp.p as i32;
    let power: f64 = f.values().iter().map(|v| v.norm_sqr().powi(p + 1)).sum();
    let potential = grid.dx() * power / (2.0 * mp.p as f64 + 2.0);
    EnergyParts { kinetic, potential }
}

/// Energy of the rescaled equation; both parts are non-negative.
pub fn energy(f: &Field, mp: &ModelParams) -> f64 {
    energy_parts(f, &forward_transform(f), mp).total()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDrift {
    pub value: f64,
    /// Set when the reference energy was zero and `value` is `|E_now|`.
    pub absolute: bool,
}

/// `|E_now/E_initial - 1|`, or `|E_now|` flagged as absolute when the
/// reference vanishes.
pub fn relative_energy_drift(e_now: f64, e_initial: f64) -> EnergyDrift {
    if e_initial == 0.0 {
        EnergyDrift {
            value: e_now.abs(),
            absolute: true,
        }
    } else {
        EnergyDrift {
            value: (e_now / e_initial - 1.0).abs(),
            absolute: false,
        }
    }
}

/// `(dx·Σ|u_n|^q)^{1/q}`; `q = f64::INFINITY` gives the grid maximum.
pub fn lq_norm(f: &Field, q: f64) -> f64 {
    let v = f.values();
    if q.is_infinite() {
        return v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if q == 2.0 {
        return mass(f).sqrt();
    }
    let sum: f64 = v.iter().map(|z| z.norm().powf(q)).sum();
    (f.grid().dx() * sum).powf(1.0 / q)
}

/// Homogeneous seminorm `‖u‖_{Ḣ^σ} = (2πL Σ |k|^{2σ}|û(k)|²)^{1/2}`.
pub fn sobolev_seminorm(s: &Spectrum, sigma: f64) -> f64 {
    let grid = s.grid();
    let sum: f64 = s
        .coeffs()
        .iter()
        .zip(grid.k())
        .map(|(c, &k)| {
            let w = if sigma == 0.0 { 1.0 } else if k == 0.0 { 0.0 } else { k.abs().powf(2.0 * sigma) };
            w * c.norm_sqr()
        })
        .sum();
    (grid.period() * sum).sqrt()
}

/// Sobolev order either tied to the model's fractional power or fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SobolevOrder {
    /// The model's `s`; written as `"s"` in configuration files.
    ModelPower,
    Fixed(f64),
}

impl SobolevOrder {
    pub fn resolve(self, mp: &ModelParams) -> f64 {
        match self {
            SobolevOrder::ModelPower => mp.s,
            SobolevOrder::Fixed(v) => v,
        }
    }
}

impl fmt::Display for SobolevOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SobolevOrder::ModelPower => f.write_str("s"),
            SobolevOrder::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SobolevRepr {
    Name(String),
    Value(f64),
}

impl Serialize for SobolevOrder {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SobolevOrder::ModelPower => SobolevRepr::Name("s".into()),
            SobolevOrder::Fixed(v) => SobolevRepr::Value(*v),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SobolevOrder {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match SobolevRepr::deserialize(de)? {
            SobolevRepr::Name(n) if n == "s" => Ok(SobolevOrder::ModelPower),
            SobolevRepr::Name(n) => Err(serde::de::Error::custom(format!(
                "unknown Sobolev order `{n}` (expected \"s\" or a number)"
            ))),
            SobolevRepr::Value(v) => Ok(SobolevOrder::Fixed(v)),
        }
    }
}

/// Which norms to track and how often.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormConfig {
    /// Finite `q ≥ 2`; the sup norm is always tracked.
    pub lq_exponents: Vec<f64>,
    pub sobolev_orders: Vec<SobolevOrder>,
    /// Record every `cadence` steps.
    pub cadence: usize,
    /// Divide tracked norms by their `t = 0` values.
    pub normalize: bool,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self {
            lq_exponents: vec![2.0, 8.0, 10.0],
            sobolev_orders: vec![
                SobolevOrder::ModelPower,
                SobolevOrder::Fixed(0.5),
                SobolevOrder::Fixed(1.0),
            ],
            cadence: 10,
            normalize: false,
        }
    }
}

impl NormConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(q) = self.lq_exponents.iter().find(|&&q| !(q >= 2.0 && q.is_finite())) {
            return Err(Error::config(
                "norms.lq_exponents",
                format!("exponents must be finite and ≥ 2, got {q}"),
            ));
        }
        for o in &self.sobolev_orders {
            if let SobolevOrder::Fixed(v) = o {
                if !(*v >= 0.0 && v.is_finite()) {
                    return Err(Error::config(
                        "norms.sobolev_orders",
                        format!("orders must be finite and ≥ 0, got {v}"),
                    ));
                }
            }
        }
        if self.cadence < 1 {
            return Err(Error::config("norms.cadence", "must be at least 1"));
        }
        Ok(())
    }
}

/// Raw `t = 0` values that later records are measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub mass: f64,
    pub energy: EnergyParts,
    pub linf: f64,
    pub lq: Vec<f64>,
    pub hs: Vec<f64>,
}

impl Baseline {
    pub fn new(f: &Field, s: &Spectrum, cfg: &NormConfig, mp: &ModelParams) -> Self {
        Self {
            mass: mass(f),
            energy: energy_parts(f, s, mp),
            linf: lq_norm(f, f64::INFINITY),
            lq: cfg.lq_exponents.iter().map(|&q| lq_norm(f, q)).collect(),
            hs: cfg
                .sobolev_orders
                .iter()
                .map(|o| sobolev_seminorm(s, o.resolve(mp)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub delta_e: f64,
    pub mass_drift: f64,
    pub linf: f64,
    /// `(q, ‖u‖_{L^q})`, normalized when the config asks for it.
    pub lq: Vec<(f64, f64)>,
    /// `(σ, ‖u‖_{Ḣ^σ})`, normalized when the config asks for it.
    pub hs: Vec<(f64, f64)>,
}

impl DiagnosticsRecord {
    pub fn lq(&self, q: f64) -> Option<f64> {
        if q.is_infinite() {
            return Some(self.linf);
        }
        self.lq.iter().find(|(e, _)| *e == q).map(|(_, v)| *v)
    }

    pub fn hs(&self, sigma: f64) -> Option<f64> {
        self.hs.iter().find(|(e, _)| *e == sigma).map(|(_, v)| *v)
    }
}

fn ratio(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if value == 0.0 { 1.0 } else { f64::INFINITY }
    } else {
        value / reference
    }
}

/// Assembles one record at time `t`.
pub fn record(
    f: &Field,
    s: &Spectrum,
    t: f64,
    cfg: &NormConfig,
    mp: &ModelParams,
    baseline: &Baseline,
) -> DiagnosticsRecord {
    let m = mass(f);
    let parts = energy_parts(f, s, mp);
    let e = parts.total();
    let linf = lq_norm(f, f64::INFINITY);
    let norm = |v: f64, r: f64| if cfg.normalize { ratio(v, r) } else { v };
    let lq = cfg
        .lq_exponents
        .iter()
        .zip(&baseline.lq)
        .map(|(&q, &r)| (q, norm(lq_norm(f, q), r)))
        .collect();
    let hs = cfg
        .sobolev_orders
        .iter()
        .zip(&baseline.hs)
        .map(|(o, &r)| {
            let sigma = o.resolve(mp);
            (sigma, norm(sobolev_seminorm(s, sigma), r))
        })
        .collect();
    DiagnosticsRecord {
        t,
        mass: m,
        energy: e,
        kinetic: parts.kinetic,
        potential: parts.potential,
        delta_e: relative_energy_drift(e, baseline.energy.total()).value,
        mass_drift: relative_energy_drift(m, baseline.mass).value,
        linf: norm(linf, baseline.linf),
        lq,
        hs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mp(epsilon: f64, s: f64, p: u32) -> ModelParams {
        ModelParams::new(epsilon, s, p).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = build_grid(10.0, 64).unwrap();
        let f = Field::zeros(g);
        assert_eq!(mass(&f), 0.0);
        assert_eq!(energy(&f, &mp(0.1, 0.3, 1)), 0.0);
    }

    #[test]
    fn closed_form_masses() {
        let g = build_grid(10.0, 1 << 12).unwrap();
        let sech = Field::from_real(g.clone(), |x| 1.0 / x.cosh());
        assert!((mass(&sech) - 2.0).abs() < 1e-10);
        assert!((lq_norm(&sech, 2.0) - 2f64.sqrt()).abs() < 1e-10);
        assert_eq!(lq_norm(&sech, f64::INFINITY), 1.0);
        let gauss = Field::from_real(g, |x| (-x * x).exp());
        assert!((mass(&gauss) - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_energy_closed_form() {
        let g = build_grid(10.0, 1 << 12).unwrap();
        let f = Field::from_real(g, |x| (-x * x).exp());
        let parts = energy_parts(&f, &forward_transform(&f), &mp(1.0, 1.0, 1));
        let kinetic = 0.5 * (PI / 2.0).sqrt();
        let potential = PI.sqrt() / 8.0;
        assert!((parts.kinetic - kinetic).abs() < 1e-9, "{}", parts.kinetic);
        assert!((parts.potential - potential).abs() < 1e-9);
        assert!((parts.total() - kinetic - potential).abs() < 1e-9);
    }

    #[test]
    fn single_mode_kinetic_energy() {
        let l = 3.0;
        let g = build_grid(l, 128).unwrap();
        let k0 = g.k()[7];
        let c = Complex64::new(0.4, -0.3);
        let f = Field::from_fn(g, |x| c * Complex64::from_polar(1.0, k0 * x));
        let model = mp(0.1, 0.35, 2);
        let parts = energy_parts(&f, &forward_transform(&f), &model);
        let expected =
            0.5 * model.epsilon.powf(2.0 * model.s) * k0.abs().powf(2.0 * model.s) * c.norm_sqr() * 2.0 * PI * l;
        assert!((parts.kinetic - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn drift() {
        assert_eq!(relative_energy_drift(2.0, 2.0).value, 0.0);
        let d = relative_energy_drift(1.0000001 * 3.0, 3.0);
        assert!((d.value - 1e-7).abs() < 1e-13);
        assert!(!d.absolute);
        let d = relative_energy_drift(-0.5, 0.0);
        assert!(d.absolute);
        assert_eq!(d.value, 0.5);
    }

    #[test]
    fn single_cell_indicator() {
        let g = build_grid(5.0, 256).unwrap();
        let mut f = Field::zeros(g.clone());
        f.values_mut()[100] = Complex64::new(1.0, 0.0);
        for q in [2.0, 3.5, 8.0, 10.0] {
            let expected = g.dx().powf(1.0 / q);
            assert!((lq_norm(&f, q) - expected).abs() < 1e-14 * expected.max(1.0));
        }
        assert_eq!(lq_norm(&f, f64::INFINITY), 1.0);
    }

    #[test]
    fn seminorms() {
        let g = build_grid(10.0, 1 << 12).unwrap();
        let gauss = Field::from_real(g.clone(), |x| (-x * x).exp());
        let s = forward_transform(&gauss);
        assert!((sobolev_seminorm(&s, 0.0) / lq_norm(&gauss, 2.0) - 1.0).abs() < 1e-12);
        assert!((sobolev_seminorm(&s, 1.0) - (PI / 2.0).powf(0.25)).abs() < 1e-9);

        let k0 = g.k()[12];
        let mode = Field::from_fn(g, |x| Complex64::from_polar(0.7, k0 * x));
        let sm = forward_transform(&mode);
        let l2 = lq_norm(&mode, 2.0);
        for sigma in [0.25, 0.5, 1.0] {
            let expected = k0.abs().powf(sigma) * l2;
            assert!((sobolev_seminorm(&sm, sigma) - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn normalized_record_at_baseline_is_one() {
        let g = build_grid(10.0, 1 << 10).unwrap();
        let f = Field::from_real(g, |x| 1.0 / x.cosh());
        let s = forward_transform(&f);
        let model = mp(0.1, 0.2, 1);
        let cfg = NormConfig {
            normalize: true,
            ..NormConfig::default()
        };
        let base = Baseline::new(&f, &s, &cfg, &model);
        let r = record(&f, &s, 0.0, &cfg, &model, &base);
        assert_eq!(r.linf, 1.0);
        assert!(r.lq.iter().all(|(_, v)| *v == 1.0));
        assert!(r.hs.iter().all(|(_, v)| *v == 1.0));
        assert_eq!(r.delta_e, 0.0);
        assert_eq!(r.hs(0.2), Some(1.0));
        assert_eq!(r.lq(8.0), Some(1.0));
    }

    #[test]
    fn config_validation() {
        assert!(NormConfig::default().validate().is_ok());
        let bad = NormConfig {
            lq_exponents: vec![1.5],
            ..NormConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = NormConfig {
            cadence: 0,
            ..NormConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
