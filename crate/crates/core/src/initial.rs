//! Initial profiles: sech, Gaussian and super-Gaussian, each with an
//! amplitude factor.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `sech(x)`
    Sech,
    /// `e^{-x²}`
    Gaussian,
    /// `e^{-x⁴}`
    SuperGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialProfile {
    pub kind: ProfileKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

impl InitialProfile {
    pub fn new(kind: ProfileKind, amplitude: f64) -> Result<Self> {
        let p = Self { kind, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn unit(kind: ProfileKind) -> Self {
        Self {
            kind,
            amplitude: 1.0,
        }
    }

    /// Amplitude zero is accepted so that trivial runs can be configured.
    pub fn validate(&self) -> Result<()> {
        if self.amplitude.is_finite() && self.amplitude >= 0.0 {
            Ok(())
        } else {
            Err(Error::config(
                "initial.amplitude",
                format!("must be finite and non-negative, got {}", self.amplitude),
            ))
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let shape = match self.kind {
            ProfileKind::Sech => 1.0 / x.cosh(),
            ProfileKind::Gaussian => (-x * x).exp(),
            ProfileKind::SuperGaussian => (-(x * x) * (x * x)).exp(),
        };
        self.amplitude * shape
    }
}

/// Samples the profile at the collocation points.
pub fn evaluate_profile(p: &InitialProfile, g: &Arc<Grid>) -> Field {
    Field::from_real(g.clone(), |x| p.value_at(x))
}

/// Largest modulus at the two outermost grid points; periodic wrap-around
/// is negligible when this is below `1e-13`.
pub fn boundary_magnitude(f: &Field) -> f64 {
    let v = f.values();
    match (v.first(), v.last()) {
        (Some(a), Some(b)) => a.norm().max(b.norm()),
        _ => 0.0,
    }
}
