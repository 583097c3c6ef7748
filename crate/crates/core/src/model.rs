//! Physical parameters, operator-basis frames and the conversions between
//! rotating-frame mean-field amplitudes and laboratory displacements.
//!
//! A frame is characterised by its reference frequency `Ω`: the bare frame
//! uses the natural frequency `ω₀`, the drive frame uses the drive frequency
//! `ω`. Position and momentum are expanded as
//!
//! ```text
//! x = √(ħ / 2mΩ) (c† + c),   p = i √(ħmΩ / 2) (c† − c)
//! ```
//!
//! so a stationary rotating-frame amplitude `β = |β| e^{iθ}` maps to the
//! displacement `x(t) = 2|β| √(ħ / 2mΩ) cos(ωt − θ)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RwaError};

/// Parameters of `H = p²/2m + mω₀²x²/2 + αx⁴/4 − F₀ cos(ωt) x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub m: f64,
    pub omega0: f64,
    /// Quartic coefficient; zero reduces every Duffing computation to the
    /// harmonic oscillator.
    pub alpha: f64,
    pub f0: f64,
    pub hbar: f64,
}

impl Default for PhysicalConfig {
    /// Natural units with unit drive and no nonlinearity.
    fn default() -> Self {
        Self {
            m: 1.0,
            omega0: 1.0,
            alpha: 0.0,
            f0: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalConfig {
    pub fn new(m: f64, omega0: f64, alpha: f64, f0: f64, hbar: f64) -> Result<Self> {
        let cfg = Self {
            m,
            omega0,
            alpha,
            f0,
            hbar,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Driven harmonic oscillator with `ħ = 1`.
    pub fn harmonic(m: f64, omega0: f64, f0: f64) -> Result<Self> {
        Self::new(m, omega0, 0.0, f0, 1.0)
    }

    /// Driven Duffing oscillator with `ħ = 1`.
    pub fn duffing(m: f64, omega0: f64, alpha: f64, f0: f64) -> Result<Self> {
        Self::new(m, omega0, alpha, f0, 1.0)
    }

    pub fn with_f0(self, f0: f64) -> Self {
        Self { f0, ..self }
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        Self { hbar, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(RwaError::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )))
            }
        };
        positive("m", self.m)?;
        positive("omega0", self.omega0)?;
        positive("hbar", self.hbar)?;
        if !(self.f0.is_finite() && self.f0 >= 0.0) {
            return Err(RwaError::InvalidParameter(format!(
                "f0 must be >= 0, got {}",
                self.f0
            )));
        }
        if !self.alpha.is_finite() {
            return Err(RwaError::InvalidParameter(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Which operator basis underlies a rotating-frame computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    /// Operators built on the natural frequency `ω₀` (the standard `a`, `a†`).
    Bare,
    /// Operators built on the drive frequency `ω` (`b`, `b†`).
    Drive,
}

impl FrameKind {
    pub const ALL: [FrameKind; 2] = [FrameKind::Bare, FrameKind::Drive];

    pub fn name(self) -> &'static str {
        match self {
            FrameKind::Bare => "bare",
            FrameKind::Drive => "drive",
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub reference_frequency: f64,
}

impl Frame {
    /// Frame of the given kind for drive frequency `omega`.
    pub fn new(kind: FrameKind, cfg: &PhysicalConfig, omega: f64) -> Self {
        match kind {
            FrameKind::Bare => Self::bare(cfg),
            FrameKind::Drive => Self::drive(omega),
        }
    }

    pub fn bare(cfg: &PhysicalConfig) -> Self {
        Self {
            kind: FrameKind::Bare,
            reference_frequency: cfg.omega0,
        }
    }

    pub fn drive(omega: f64) -> Self {
        Self {
            kind: FrameKind::Drive,
            reference_frequency: omega,
        }
    }

    /// Zero-point length `√(ħ / 2mΩ)` of this frame's ladder operators.
    pub fn length_scale(&self, cfg: &PhysicalConfig) -> f64 {
        (cfg.hbar / (2.0 * cfg.m * self.reference_frequency)).sqrt()
    }
}

/// Mean-field rotating-frame amplitude `⟨ã⟩` or `⟨b̃⟩` (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlowAmplitude(pub Complex64);

impl SlowAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self(Complex64::new(re, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn phase(&self) -> f64 {
        self.0.arg()
    }

    pub fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }
}

impl From<Complex64> for SlowAmplitude {
    fn from(c: Complex64) -> Self {
        Self(c)
    }
}

/// `Δ = ω − ω₀`.
pub fn detuning(cfg: &PhysicalConfig, omega: f64) -> f64 {
    omega - cfg.omega0
}

/// Drive strength `F₀ / (2√(2mΩħ))` in the given frame, in units of angular
/// frequency.
pub fn drive_coupling(cfg: &PhysicalConfig, frame: &Frame) -> f64 {
    cfg.f0 / (2.0 * (2.0 * cfg.m * frame.reference_frequency * cfg.hbar).sqrt())
}

/// Magnitude and phase of the laboratory displacement produced by a
/// stationary rotating-frame amplitude: `X = 2|β|√(ħ/2mΩ)`, `θ = arg β`.
pub fn amplitude_to_displacement(
    beta: SlowAmplitude,
    cfg: &PhysicalConfig,
    frame: &Frame,
) -> (f64, f64) {
    (2.0 * beta.norm() * frame.length_scale(cfg), beta.phase())
}

/// Inverse of [`amplitude_to_displacement`].
pub fn displacement_to_amplitude(
    magnitude: f64,
    theta: f64,
    cfg: &PhysicalConfig,
    frame: &Frame,
) -> SlowAmplitude {
    let r = magnitude / (2.0 * frame.length_scale(cfg));
    SlowAmplitude(Complex64::from_polar(r, theta))
}

/// Signed displacement amplitude for a real rotating-frame amplitude
/// (phase 0 or π), i.e. `x(t) = X cos(ωt)`.
pub fn signed_displacement(beta_re: f64, cfg: &PhysicalConfig, frame: &Frame) -> f64 {
    2.0 * beta_re * frame.length_scale(cfg)
}

/// Real rotating-frame amplitude producing the signed displacement `x`.
pub fn signed_amplitude(x: f64, cfg: &PhysicalConfig, frame: &Frame) -> f64 {
    x / (2.0 * frame.length_scale(cfg))
}
