//! Mean-field slow flow of the driven Duffing oscillator in either operator
//! basis, its real steady-state cubic, and fold detection along frequency
//! sweeps.
//!
//! After moving to the frame rotating at `ω` and dropping oscillating terms,
//! the amplitude obeys
//!
//! ```text
//! i dβ/dt = λβ + κ(q·β + β|β|²) − f
//! ```
//!
//! with `λ = −Δ` (bare) or `(ω₀² − ω²)/2ω` (drive), `κ = 3αħ/4m²Ω²`, `f` the
//! frame's drive coupling and `q ∈ {0, 1}` the operator-ordering term.
//! Substituting a real `β = X√(mΩ/2ħ)` into the stationary condition and
//! multiplying by `mΩ²/ħ · (2ħ/mΩ)^{3/2}` gives `c3·X³ + c1·X + c0 = 0` with
//! `c3 = 3α/4m`, `c0 = −F₀/m` and `c1 = 2Ωλ (+ 3αħ/2m²Ω)`.

pub mod cubic;

use num_complex::Complex64;

pub use cubic::{
    classify_stability, discriminant, solve_cubic, stable_count, CubicCondition, SteadyBranch,
};

use crate::error::{Result, RwaError};
use crate::model::{self, Frame, FrameKind, PhysicalConfig, SlowAmplitude};

/// Relative tolerance in `ω` for fold bisection.
pub const FOLD_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowFlowParams {
    pub frame: Frame,
    pub lambda: f64,
    pub kappa: f64,
    pub f: f64,
    pub quantum_ordering: bool,
}

impl SlowFlowParams {
    pub fn new(cfg: &PhysicalConfig, omega: f64, kind: FrameKind, quantum_ordering: bool) -> Self {
        let frame = Frame::new(kind, cfg, omega);
        let lambda = match kind {
            FrameKind::Bare => -model::detuning(cfg, omega),
            FrameKind::Drive => (cfg.omega0 * cfg.omega0 - omega * omega) / (2.0 * omega),
        };
        let big = frame.reference_frequency;
        Self {
            frame,
            lambda,
            kappa: 3.0 * cfg.alpha * cfg.hbar / (4.0 * cfg.m * cfg.m * big * big),
            f: model::drive_coupling(cfg, &frame),
            quantum_ordering,
        }
    }
}

/// `λβ + κ(qβ + β|β|²) − f`, i.e. `i·dβ/dt`.
pub fn slow_flow_rhs(beta: SlowAmplitude, params: &SlowFlowParams) -> Complex64 {
    let b = beta.0;
    let q = if params.quantum_ordering { 1.0 } else { 0.0 };
    params.lambda * b + params.kappa * (q * b + b * b.norm_sqr()) - params.f
}

pub fn steady_cubic(
    cfg: &PhysicalConfig,
    omega: f64,
    kind: FrameKind,
    quantum_ordering: bool,
) -> CubicCondition {
    let big = Frame::new(kind, cfg, omega).reference_frequency;
    let mut c1 = match kind {
        FrameKind::Bare => 2.0 * cfg.omega0 * (cfg.omega0 - omega),
        FrameKind::Drive => cfg.omega0 * cfg.omega0 - omega * omega,
    };
    if quantum_ordering {
        c1 += 3.0 * cfg.alpha * cfg.hbar / (2.0 * cfg.m * cfg.m * big);
    }
    CubicCondition {
        c3: 3.0 * cfg.alpha / (4.0 * cfg.m),
        c1,
        c0: -cfg.f0 / cfg.m,
    }
}

/// Classified real steady states at one drive frequency.
pub fn steady_states(
    cfg: &PhysicalConfig,
    omega: f64,
    kind: FrameKind,
    quantum_ordering: bool,
) -> Result<Vec<SteadyBranch>> {
    let roots = solve_cubic(&steady_cubic(cfg, omega, kind, quantum_ordering))?;
    Ok(classify_stability(&roots))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub omega: f64,
    pub branches: Vec<SteadyBranch>,
    /// Solver failure at this point; the sweep continues past it.
    pub error: Option<RwaError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub kind: FrameKind,
    pub points: Vec<BranchPoint>,
    pub folds: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(RwaError::InvalidParameter(
            "frequency grid must be positive and finite".into(),
        ));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(RwaError::InvalidParameter(
            "frequency grid must be strictly monotone".into(),
        ));
    }
    Ok(())
}

/// Steady states on every grid point, plus fold frequencies located by
/// bisection on discriminant sign changes between neighbouring points.
pub fn frequency_sweep(
    cfg: &PhysicalConfig,
    kind: FrameKind,
    omega_grid: &[f64],
    quantum_ordering: bool,
) -> Result<FrequencySweep> {
    check_grid(omega_grid)?;
    let points = omega_grid
        .iter()
        .map(
            |&omega| match steady_states(cfg, omega, kind, quantum_ordering) {
                Ok(branches) => BranchPoint {
                    omega,
                    branches,
                    error: None,
                },
                Err(e) => BranchPoint {
                    omega,
                    branches: Vec::new(),
                    error: Some(e),
                },
            },
        )
        .collect();
    Ok(FrequencySweep {
        kind,
        points,
        folds: fold_frequencies(cfg, kind, omega_grid, quantum_ordering),
    })
}

/// All folds bracketed by the (monotone) grid, in grid order.
pub fn fold_frequencies(
    cfg: &PhysicalConfig,
    kind: FrameKind,
    omega_grid: &[f64],
    quantum_ordering: bool,
) -> Vec<f64> {
    let disc = |w: f64| discriminant(&steady_cubic(cfg, w, kind, quantum_ordering));
    let values: Vec<f64> = omega_grid.iter().map(|&w| disc(w)).collect();
    let mut folds = Vec::new();
    for i in 0..omega_grid.len() {
        if values[i] == 0.0 {
            // A grid point landing exactly on the fold.
            let left = i.checked_sub(1).map(|j| values[j]);
            let right = values.get(i + 1).copied();
            if let (Some(l), Some(r)) = (left, right) {
                if l.signum() != r.signum() && l != 0.0 && r != 0.0 {
                    folds.push(omega_grid[i]);
                }
            }
            continue;
        }
        if let Some(&next) = values.get(i + 1) {
            if next != 0.0 && next.signum() != values[i].signum() {
                if let Some(w) = bisect_fold(
                    cfg,
                    kind,
                    quantum_ordering,
                    omega_grid[i],
                    omega_grid[i + 1],
                ) {
                    folds.push(w);
                }
            }
        }
    }
    folds
}

/// Discriminant root in `[lo, hi]` (either order) to [`FOLD_REL_TOL`], or
/// `None` if the endpoints do not bracket a sign change.
pub fn bisect_fold(
    cfg: &PhysicalConfig,
    kind: FrameKind,
    quantum_ordering: bool,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let disc = |w: f64| discriminant(&steady_cubic(cfg, w, kind, quantum_ordering));
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = disc(a);
    let fb = disc(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    while b - a > FOLD_REL_TOL * b {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = disc(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Uniform grid of `n` points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic;

    fn hardening() -> PhysicalConfig {
        PhysicalConfig::duffing(1.0, 1.0, 1.0, 0.2).unwrap()
    }

    #[test]
    fn cubic_coefficients() {
        let cond = steady_cubic(&hardening(), 1.5, FrameKind::Drive, false);
        assert_eq!(cond, CubicCondition::new(0.75, -1.25, -0.2));
        let bare = steady_cubic(&hardening(), 1.5, FrameKind::Bare, false);
        assert_eq!(bare, CubicCondition::new(0.75, -1.0, -0.2));
    }

    #[test]
    fn resonance_amplitude() {
        let roots = steady_states(&hardening(), 1.0, FrameKind::Drive, false).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].x - (0.2f64 / 0.75).cbrt()).abs() < 1e-14);
        assert!((roots[0].x - 0.6436).abs() < 1e-4);
    }

    #[test]
    fn zero_drive_coupling_is_minus_f() {
        let p = SlowFlowParams::new(&hardening(), 1.3, FrameKind::Drive, true);
        assert_eq!(
            slow_flow_rhs(SlowAmplitude::default(), &p),
            Complex64::new(-p.f, 0.0)
        );
    }

    #[test]
    fn roots_are_slow_flow_fixed_points() {
        let cfg = PhysicalConfig::new(1.7, 0.9, 1.3, 0.2, 0.37).unwrap();
        for kind in FrameKind::ALL {
            for q in [false, true] {
                for omega in [0.4, 0.9, 1.0, 1.3, 1.5, 2.2] {
                    let params = SlowFlowParams::new(&cfg, omega, kind, q);
                    for b in steady_states(&cfg, omega, kind, q).unwrap() {
                        let beta =
                            SlowAmplitude::real(model::signed_amplitude(b.x, &cfg, &params.frame));
                        let rhs = slow_flow_rhs(beta, &params);
                        let scale = params.f.max(params.lambda.abs() * beta.norm());
                        assert!(rhs.norm() < 1e-12 * scale, "{kind} q={q} ω={omega}: {rhs}");
                    }
                }
            }
        }
    }

    #[test]
    fn harmonic_reduction() {
        let cfg = PhysicalConfig::harmonic(1.0, 1.0, 1.0).unwrap();
        for omega in [0.3, 0.5, 1.4, 2.5] {
            let drive = steady_states(&cfg, omega, FrameKind::Drive, false).unwrap();
            let bare = steady_states(&cfg, omega, FrameKind::Bare, false).unwrap();
            assert_eq!(drive.len(), 1);
            let exact = harmonic::exact_response(&cfg, omega).unwrap().x;
            let rwa = harmonic::rwa_bare_response(&cfg, omega).unwrap().x;
            assert!((drive[0].x - exact).abs() <= 1e-15 * exact.abs());
            assert!((bare[0].x - rwa).abs() <= 1e-15 * rwa.abs());
        }
        let grid = linspace(0.5, 2.0, 40);
        assert!(fold_frequencies(&cfg, FrameKind::Drive, &grid, false).is_empty());
    }

    #[test]
    fn folds_on_fig2_line() {
        let grid = linspace(0.5, 2.0, 151);
        let drive = frequency_sweep(&hardening(), FrameKind::Drive, &grid, false).unwrap();
        let bare = frequency_sweep(&hardening(), FrameKind::Bare, &grid, false).unwrap();
        assert_eq!(drive.folds.len(), 1);
        assert_eq!(bare.folds.len(), 1);
        // Closed forms from discriminant = 0 with c1* = -(27·c3·c0²/4)^(1/3).
        let c1_star = -(27.0 * 0.75 * 0.04 / 4.0f64).cbrt();
        assert!((drive.folds[0] - (1.0 - c1_star).sqrt()).abs() < 1e-9);
        assert!((bare.folds[0] - (1.0 - c1_star / 2.0)).abs() < 1e-9);
        assert!((drive.folds[0] - 1.2598).abs() < 1e-4);
        for p in &drive.points {
            let n = stable_count(&p.branches);
            assert_eq!(
                n,
                if p.omega > drive.folds[0] { 2 } else { 1 },
                "ω = {}",
                p.omega
            );
        }
    }

    #[test]
    fn rejects_non_monotone_grid() {
        assert!(frequency_sweep(&hardening(), FrameKind::Drive, &[1.0, 1.2, 1.1], false).is_err());
        assert!(frequency_sweep(&hardening(), FrameKind::Drive, &[0.0, 1.0], false).is_err());
        assert!(frequency_sweep(&hardening(), FrameKind::Drive, &[2.0, 1.0], false).is_ok());
    }

    #[test]
    fn degenerate_point_recorded_not_fatal() {
        let cfg = PhysicalConfig::harmonic(1.0, 1.0, 0.0).unwrap();
        let sweep = frequency_sweep(&cfg, FrameKind::Drive, &[0.9, 1.0, 1.1], false).unwrap();
        assert!(sweep.points[1].error.is_some());
        assert_eq!(sweep.points[0].branches.len(), 1);
    }
}
