//! Driven harmonic oscillator: exact stationary response, the two
//! rotating-wave solutions, phase-space paths and the micromotion that the
//! bare-frame RWA discards.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, RwaError};
use crate::model::{self, Frame, PhysicalConfig, SlowAmplitude};

/// Default resonance guard, relative to `ω₀²`.
pub const DEFAULT_RESONANCE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    RwaBare,
    RwaDrive,
}

/// Signed amplitude `X` of `x(t) = X cos(ωt)`; negative means antiphase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicResponse {
    pub x: f64,
    pub method: Method,
}

fn guard(cfg: &PhysicalConfig, omega: f64, rel_eps: f64) -> Result<()> {
    let w0sq = cfg.omega0 * cfg.omega0;
    if (w0sq - omega * omega).abs() > rel_eps * w0sq {
        Ok(())
    } else {
        Err(RwaError::ResonanceSingularity { omega })
    }
}

/// `X = F₀ / m(ω₀² − ω²)`.
pub fn exact_response(cfg: &PhysicalConfig, omega: f64) -> Result<HarmonicResponse> {
    exact_response_with(cfg, omega, DEFAULT_RESONANCE_EPS)
}

pub fn exact_response_with(
    cfg: &PhysicalConfig,
    omega: f64,
    rel_eps: f64,
) -> Result<HarmonicResponse> {
    guard(cfg, omega, rel_eps)?;
    Ok(HarmonicResponse {
        x: cfg.f0 / (cfg.m * (cfg.omega0 * cfg.omega0 - omega * omega)),
        method: Method::Exact,
    })
}

/// Standard RWA in the bare frame: `⟨ã⟩ = −F_a/Δ`, giving
/// `X = −F₀ / (2mω₀Δ)`.
pub fn rwa_bare_response(cfg: &PhysicalConfig, omega: f64) -> Result<HarmonicResponse> {
    rwa_bare_response_with(cfg, omega, DEFAULT_RESONANCE_EPS)
}

pub fn rwa_bare_response_with(
    cfg: &PhysicalConfig,
    omega: f64,
    rel_eps: f64,
) -> Result<HarmonicResponse> {
    let delta = model::detuning(cfg, omega);
    if delta.abs() <= rel_eps * cfg.omega0 {
        return Err(RwaError::ResonanceSingularity { omega });
    }
    let frame = Frame::bare(cfg);
    let beta = -model::drive_coupling(cfg, &frame) / delta;
    Ok(HarmonicResponse {
        x: model::signed_displacement(beta, cfg, &frame),
        method: Method::RwaBare,
    })
}

/// Stationary drive-frame amplitude `⟨b̃⟩ = 2F_b ω / (ω₀² − ω²)`.
pub fn drive_frame_amplitude(cfg: &PhysicalConfig, omega: f64) -> Result<SlowAmplitude> {
    guard(cfg, omega, DEFAULT_RESONANCE_EPS)?;
    let fb = model::drive_coupling(cfg, &Frame::drive(omega));
    Ok(SlowAmplitude::real(
        2.0 * fb * omega / (cfg.omega0 * cfg.omega0 - omega * omega),
    ))
}

/// RWA in the drive frame. Coincides with [`exact_response`] up to rounding.
pub fn rwa_drive_response(cfg: &PhysicalConfig, omega: f64) -> Result<HarmonicResponse> {
    let beta = drive_frame_amplitude(cfg, omega)?;
    Ok(HarmonicResponse {
        x: model::signed_displacement(beta.re(), cfg, &Frame::drive(omega)),
        method: Method::RwaDrive,
    })
}

/// Exact over bare-RWA amplitude, `2ω₀ / (ω₀ + ω)`.
pub fn response_ratio(cfg: &PhysicalConfig, omega: f64) -> f64 {
    2.0 * cfg.omega0 / (cfg.omega0 + omega)
}

/// Samples of the exact stationary orbit in the `(x, p/mω₀)` plane over one
/// drive period. The path is an ellipse with semi-axes `X` and `Xω/ω₀`.
pub fn phase_trajectory(
    x_amp: f64,
    cfg: &PhysicalConfig,
    omega: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 4 {
        return Err(RwaError::InvalidParameter(format!(
            "n_samples must be >= 4, got {n_samples}"
        )));
    }
    let ratio = omega / cfg.omega0;
    Ok((0..n_samples)
        .map(|k| {
            let phase = 2.0 * PI * k as f64 / n_samples as f64;
            (x_amp * phase.cos(), -ratio * x_amp * phase.sin())
        })
        .collect())
}

/// Orbit implied by a stationary bare-frame amplitude: always a circle of
/// radius `2|⟨ã⟩|√(ħ/2mω₀)` in the `(x, p/mω₀)` plane.
pub fn rwa_circle_trajectory(
    beta: SlowAmplitude,
    cfg: &PhysicalConfig,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 4 {
        return Err(RwaError::InvalidParameter(format!(
            "n_samples must be >= 4, got {n_samples}"
        )));
    }
    let (radius, theta) = model::amplitude_to_displacement(beta, cfg, &Frame::bare(cfg));
    Ok((0..n_samples)
        .map(|k| {
            let phase = 2.0 * PI * k as f64 / n_samples as f64 - theta;
            (radius * phase.cos(), -radius * phase.sin())
        })
        .collect())
}

/// Exact bare-rotating-frame amplitude split as
/// `⟨ã(t)⟩ = stationary + counter_rotating · e^{2iωt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Micromotion {
    pub omega: f64,
    pub stationary: Complex64,
    pub counter_rotating: Complex64,
}

impl Micromotion {
    pub fn rotating_amplitude(&self, t: f64) -> Complex64 {
        self.stationary + self.counter_rotating * Complex64::from_polar(1.0, 2.0 * self.omega * t)
    }

    /// Laboratory displacement after undoing the rotation,
    /// `x = √(ħ/2mω₀) (⟨a⟩ + ⟨a⟩*)` with `⟨a⟩ = ⟨ã⟩ e^{−iωt}`.
    pub fn displacement(&self, cfg: &PhysicalConfig, t: f64) -> f64 {
        let a = self.rotating_amplitude(t) * Complex64::from_polar(1.0, -self.omega * t);
        2.0 * Frame::bare(cfg).length_scale(cfg) * a.re
    }
}

pub fn micromotion_components(cfg: &PhysicalConfig, omega: f64) -> Result<Micromotion> {
    let x = exact_response(cfg, omega)?.x;
    let scale = x * (cfg.m / (2.0 * cfg.hbar * cfg.omega0)).sqrt();
    Ok(Micromotion {
        omega,
        stationary: Complex64::new(scale * (cfg.omega0 + omega) / 2.0, 0.0),
        counter_rotating: Complex64::new(scale * (cfg.omega0 - omega) / 2.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalConfig {
        PhysicalConfig::harmonic(1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn exact_examples() {
        let cfg = unit();
        assert!(rel(exact_response(&cfg, 0.5).unwrap().x, 4.0 / 3.0) < 1e-15);
        assert_eq!(exact_response(&cfg.with_f0(0.0), 0.5).unwrap().x, 0.0);
        assert!(rel(exact_response(&cfg, 1e-6).unwrap().x, 1.0) < 1e-11);
    }

    #[test]
    fn resonance_is_an_error() {
        let cfg = unit();
        for res in [
            exact_response(&cfg, 1.0),
            rwa_bare_response(&cfg, 1.0),
            rwa_drive_response(&cfg, 1.0),
        ] {
            assert_eq!(res, Err(RwaError::ResonanceSingularity { omega: 1.0 }));
        }
        assert!(micromotion_components(&cfg, 1.0).is_err());
        assert!(exact_response_with(&cfg, 1.0 + 1e-6, 1e-3).is_err());
        assert!(exact_response(&cfg, 1.0 + 1e-6).is_ok());
    }

    #[test]
    fn rwa_examples() {
        let cfg = unit();
        assert!(rel(rwa_bare_response(&cfg, 0.5).unwrap().x, 1.0) < 1e-15);
        assert_eq!(rwa_bare_response(&cfg.with_f0(0.0), 0.5).unwrap().x, 0.0);
        let exact = exact_response(&cfg, 0.5).unwrap().x;
        let bare = rwa_bare_response(&cfg, 0.5).unwrap().x;
        assert!(rel(exact / bare, 4.0 / 3.0) < 1e-15);

        let beta = drive_frame_amplitude(&cfg, 0.5).unwrap();
        assert!(rel(beta.re(), 2.0 / 3.0) < 1e-15);
        assert!(rel(rwa_drive_response(&cfg, 0.5).unwrap().x, 4.0 / 3.0) < 1e-15);
        assert!(rel(rwa_drive_response(&cfg, 2.0).unwrap().x, -1.0 / 3.0) < 1e-15);
        assert_eq!(rwa_drive_response(&cfg.with_f0(0.0), 2.0).unwrap().x, 0.0);
    }

    #[test]
    fn ratio_examples() {
        let cfg = unit();
        assert!(rel(response_ratio(&cfg, 0.5), 4.0 / 3.0) < 1e-15);
        assert_eq!(response_ratio(&cfg, 1.0), 1.0);
        assert_eq!(response_ratio(&cfg, 3.0), 0.5);
    }

    #[test]
    fn ellipse_vertices() {
        let cfg = unit();
        let pts = phase_trajectory(4.0 / 3.0, &cfg, 0.5, 4).unwrap();
        let expect = [
            (4.0 / 3.0, 0.0),
            (0.0, -2.0 / 3.0),
            (-4.0 / 3.0, 0.0),
            (0.0, 2.0 / 3.0),
        ];
        for ((x, p), (ex, ep)) in pts.iter().zip(expect) {
            assert!((x - ex).abs() < 1e-15 && (p - ep).abs() < 1e-15, "{x} {p}");
        }
        assert!(phase_trajectory(1.0, &cfg, 0.5, 3).is_err());
        let zero = phase_trajectory(0.0, &cfg, 0.5, 16).unwrap();
        assert!(zero.iter().all(|&(x, p)| x == 0.0 && p == 0.0));
    }

    #[test]
    fn rwa_path_is_circle() {
        let cfg = unit();
        let beta = SlowAmplitude::new(0.3, -0.4);
        let radius = 2.0 * 0.5 * Frame::bare(&cfg).length_scale(&cfg);
        for (x, p) in rwa_circle_trajectory(beta, &cfg, 64).unwrap() {
            assert!((x.hypot(p) - radius).abs() < 1e-15);
        }
    }

    #[test]
    fn micromotion_example() {
        let cfg = unit();
        let mm = micromotion_components(&cfg, 0.5).unwrap();
        // (4/3)(1/√2)(3/4) and (4/3)(1/√2)(1/4)
        assert!(rel(mm.stationary.re, 1.0 / 2f64.sqrt()) < 1e-15);
        assert!(rel(mm.counter_rotating.re, 1.0 / (3.0 * 2f64.sqrt())) < 1e-15);
        assert_eq!(mm.stationary.im, 0.0);
    }

    #[test]
    fn micromotion_matches_numerical_projection() {
        // Project the exact lab-frame ⟨ã(t)⟩ = √(mω₀/2ħ)(x + i p/mω₀) e^{iωt}
        // onto 1 and e^{2iωt} with a plain Riemann sum over one period.
        let cfg = PhysicalConfig::new(1.3, 0.8, 0.0, 0.7, 0.6).unwrap();
        let omega = 1.9;
        let x_amp = exact_response(&cfg, omega).unwrap().x;
        let s = (cfg.m * cfg.omega0 / (2.0 * cfg.hbar)).sqrt();
        let n = 512;
        let period = 2.0 * PI / omega;
        let (mut a0, mut a2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in 0..n {
            let t = period * k as f64 / n as f64;
            let x = x_amp * (omega * t).cos();
            let p = -cfg.m * omega * x_amp * (omega * t).sin();
            let a = s * Complex64::new(x, p / (cfg.m * cfg.omega0));
            let a_rot = a * Complex64::from_polar(1.0, omega * t);
            a0 += a_rot;
            a2 += a_rot * Complex64::from_polar(1.0, -2.0 * omega * t);
        }
        a0 /= n as f64;
        a2 /= n as f64;
        let mm = micromotion_components(&cfg, omega).unwrap();
        assert!((mm.stationary - a0).norm() < 1e-13);
        assert!((mm.counter_rotating - a2).norm() < 1e-13);
    }

    #[test]
    fn micromotion_semi_axes() {
        let cfg = unit();
        for omega in [0.3, 0.5, 1.7] {
            let mm = micromotion_components(&cfg, omega).unwrap();
            let s = (cfg.m * cfg.omega0 / (2.0 * cfg.hbar)).sqrt();
            let big = (mm.stationary.norm() + mm.counter_rotating.norm()) / s;
            let small = (mm.stationary.norm() - mm.counter_rotating.norm()).abs() / s;
            let x = exact_response(&cfg, omega).unwrap().x.abs();
            let pts = phase_trajectory(x, &cfg, omega, 4).unwrap();
            let mut axes = [pts[0].0.abs(), pts[1].1.abs()];
            axes.sort_by(f64::total_cmp);
            assert!(rel(small, axes[0]) < 1e-14 && rel(big, axes[1]) < 1e-14);
        }
    }

    #[test]
    fn micromotion_reconstructs_displacement() {
        let cfg = unit();
        let omega = 0.37;
        let mm = micromotion_components(&cfg, omega).unwrap();
        let x_amp = exact_response(&cfg, omega).unwrap().x;
        for k in 0..200 {
            let t = 0.173 * k as f64;
            assert!((mm.displacement(&cfg, t) - x_amp * (omega * t).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn micromotion_vanishes_linearly_at_resonance() {
        let cfg = unit();
        let a = micromotion_components(&cfg, 1.0 - 1e-3)
            .unwrap()
            .counter_rotating
            .re;
        let b = micromotion_components(&cfg, 1.0 - 2e-3)
            .unwrap()
            .counter_rotating
            .re;
        // A2 / X = s(ω₀ − ω)/2
        let xa = exact_response(&cfg, 1.0 - 1e-3).unwrap().x;
        let xb = exact_response(&cfg, 1.0 - 2e-3).unwrap().x;
        assert!(((b / xb) / (a / xa) - 2.0).abs() < 1e-9);
    }
}
