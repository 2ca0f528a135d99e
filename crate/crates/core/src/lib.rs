//! Pseudospectral laboratory for the semiclassically scaled defocusing
//! fractional nonlinear Schrödinger equation on a periodic interval,
//!
//! ```text
//! iε ∂_t u = (-ε²Δ)^s u + |u|^{2p} u,    x ∈ [-Lπ, Lπ],
//! ```
//!
//! with conservation monitoring and detection of singularity formation
//! from the exponential decay rate of the Fourier coefficients.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod initial;
pub mod monitor;
pub mod spectral;
pub mod tracer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
