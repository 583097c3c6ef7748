//! Steady-state responses of driven harmonic and Duffing oscillators.
//!
//! The rotating-wave approximation is carried out in two operator bases:
//! the bare frame, whose ladder operators are built on the natural frequency
//! `ω₀`, and the drive frame, built on the drive frequency `ω`. For the
//! harmonic oscillator the drive-frame stationary solution is exact; for the
//! Duffing oscillator both frames reduce to a real cubic whose roots are
//! compared against a damped time-domain integration.
//!
//! Modules:
//! - [`model`]: parameters, frames, amplitude/displacement conversions.
//! - [`harmonic`]: exact and RWA responses, phase-space paths, micromotion.
//! - [`duffing`]: slow flow, steady cubic, stability, folds.
//! - [`oracle`]: time-domain integration, Fourier projection, sweeps.
//! - [`analysis`]: discrepancy metrics, phase diagrams, boundary comparison.

pub mod analysis;
pub mod duffing;
pub mod error;
pub mod harmonic;
pub mod model;
pub mod oracle;

pub use duffing::{CubicCondition, SlowFlowParams, SteadyBranch};
pub use error::{Result, RwaError};
pub use model::{Frame, FrameKind, PhysicalConfig, SlowAmplitude};
pub use num_complex::Complex64;
pub use oracle::{IntegratorConfig, PhaseState, SweepPlan, SweepRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
