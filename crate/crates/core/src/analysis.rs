//! Comparison of rotating-frame predictions with the time-domain oracle:
//! amplitude and boundary discrepancies, stable-solution phase diagrams and
//! quasi-static branch tracking.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::duffing::{self, BranchPoint, SteadyBranch};
use crate::error::{Result, RwaError};
use crate::model::{FrameKind, PhysicalConfig};
use crate::oracle::SweepRecord;

/// Pairings whose amplitudes differ by more than this fraction are flagged.
pub const PAIRING_MISMATCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchLabel {
    Low,
    High,
}

impl BranchLabel {
    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::Low => "low",
            BranchLabel::High => "high",
        }
    }
}

/// `||x_ω| − |x_RWA|| / |x_ω|`. Magnitudes only: the RWA states are real
/// while the damped oracle carries a small phase.
pub fn discrepancy_x(x_omega: Complex64, x_rwa: f64) -> Result<f64> {
    let reference = x_omega.norm();
    if reference == 0.0 {
        return Err(RwaError::ZeroReference);
    }
    Ok((reference - x_rwa.abs()).abs() / reference)
}

/// `|ω − ω_RWA| / ω`.
pub fn discrepancy_omega(omega_ref: f64, omega_rwa: f64) -> f64 {
    (omega_ref - omega_rwa).abs() / omega_ref
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyPoint {
    pub omega: f64,
    pub branch: BranchLabel,
    pub kind: FrameKind,
    pub x_oracle: f64,
    pub x_rwa: f64,
    pub delta_x: f64,
    /// The nearest stable root is more than [`PAIRING_MISMATCH`] away.
    pub flagged: bool,
}

/// Stable root of `branches` closest in magnitude to `magnitude`.
pub fn nearest_stable(branches: &[SteadyBranch], magnitude: f64) -> Option<SteadyBranch> {
    branches
        .iter()
        .filter(|b| b.stable)
        .min_by(|a, b| {
            (a.x.abs() - magnitude)
                .abs()
                .total_cmp(&(b.x.abs() - magnitude).abs())
        })
        .copied()
}

/// Pairs each oracle record with the nearest stable root of the given frame.
pub fn discrepancy_series(
    cfg: &PhysicalConfig,
    records: &[SweepRecord],
    branch: BranchLabel,
    kind: FrameKind,
    quantum_ordering: bool,
) -> Result<Vec<DiscrepancyPoint>> {
    records
        .iter()
        .map(|rec| {
            let roots = duffing::steady_states(cfg, rec.omega, kind, quantum_ordering)?;
            let root = nearest_stable(&roots, rec.magnitude).ok_or_else(|| {
                RwaError::InvalidParameter(format!("no stable root at omega = {}", rec.omega))
            })?;
            let delta_x = discrepancy_x(rec.x_omega, root.x)?;
            Ok(DiscrepancyPoint {
                omega: rec.omega,
                branch,
                kind,
                x_oracle: rec.magnitude,
                x_rwa: root.x,
                delta_x,
                flagged: delta_x > PAIRING_MISMATCH,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub kind: FrameKind,
    pub omega_grid: Vec<f64>,
    pub f0_grid: Vec<f64>,
    /// `counts[i][j]`: stable solutions at `(f0_grid[i], omega_grid[j])`.
    pub counts: Vec<Vec<u8>>,
    /// First fold `ω*(F₀)` inside the frequency grid, per `F₀` row.
    pub boundary: Vec<Option<f64>>,
}

impl PhaseDiagram {
    pub fn count(&self, f0_index: usize, omega_index: usize) -> u8 {
        self.counts[f0_index][omega_index]
    }
}

/// Two stable solutions where the steady cubic has three distinct real
/// roots, one otherwise.
pub fn stable_solution_count(
    cfg: &PhysicalConfig,
    omega: f64,
    kind: FrameKind,
    quantum_ordering: bool,
) -> u8 {
    if duffing::discriminant(&duffing::steady_cubic(cfg, omega, kind, quantum_ordering)) > 0.0 {
        2
    } else {
        1
    }
}

pub fn phase_diagram(
    cfg: &PhysicalConfig,
    kind: FrameKind,
    omega_grid: &[f64],
    f0_grid: &[f64],
    quantum_ordering: bool,
) -> Result<PhaseDiagram> {
    for g in [omega_grid, f0_grid] {
        if g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RwaError::InvalidParameter(
                "grids must be increasing".into(),
            ));
        }
    }
    if omega_grid.iter().any(|&w| !(w > 0.0)) || f0_grid.iter().any(|&f| !(f >= 0.0)) {
        return Err(RwaError::InvalidParameter(
            "omega must be > 0 and F0 >= 0 on the grids".into(),
        ));
    }
    let rows: Vec<(Vec<u8>, Option<f64>)> = f0_grid
        .par_iter()
        .map(|&f0| {
            let row_cfg = cfg.with_f0(f0);
            let counts = omega_grid
                .iter()
                .map(|&w| stable_solution_count(&row_cfg, w, kind, quantum_ordering))
                .collect();
            let fold = duffing::fold_frequencies(&row_cfg, kind, omega_grid, quantum_ordering)
                .first()
                .copied();
            (counts, fold)
        })
        .collect();
    let (counts, boundary) = rows.into_iter().unzip();
    Ok(PhaseDiagram {
        kind,
        omega_grid: omega_grid.to_vec(),
        f0_grid: f0_grid.to_vec(),
        counts,
        boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryComparison {
    pub f0: f64,
    pub omega_jump: f64,
    pub omega_star_drive: f64,
    pub omega_star_bare: f64,
    pub delta_drive: f64,
    pub delta_bare: f64,
}

/// Fold frequency of each frame against the oracle jump, per `F₀`.
/// `oracle_jumps[i]` belongs to `f0_list[i]`; folds are bracketed on
/// `omega_grid`.
pub fn boundary_compare(
    cfg: &PhysicalConfig,
    f0_list: &[f64],
    oracle_jumps: &[Option<f64>],
    omega_grid: &[f64],
    quantum_ordering: bool,
) -> Result<Vec<BoundaryComparison>> {
    f0_list
        .iter()
        .enumerate()
        .map(|(i, &f0)| {
            let jump = oracle_jumps
                .get(i)
                .copied()
                .flatten()
                .ok_or(RwaError::MissingOracle { f0 })?;
            let row_cfg = cfg.with_f0(f0);
            let fold = |kind| {
                duffing::fold_frequencies(&row_cfg, kind, omega_grid, quantum_ordering)
                    .first()
                    .copied()
                    .ok_or_else(|| {
                        RwaError::InvalidParameter(format!(
                            "no {kind}-frame fold inside the grid for F0 = {f0}"
                        ))
                    })
            };
            let drive = fold(FrameKind::Drive)?;
            let bare = fold(FrameKind::Bare)?;
            Ok(BoundaryComparison {
                f0,
                omega_jump: jump,
                omega_star_drive: drive,
                omega_star_bare: bare,
                delta_drive: discrepancy_omega(jump, drive),
                delta_bare: discrepancy_omega(jump, bare),
            })
        })
        .collect()
}

/// Quasi-static sweep over precomputed branch points: starting from the
/// stable root nearest `start_x`, follow at each step the stable root
/// nearest the previous amplitude. Returns the tracked signed amplitude per
/// point (`None` where the point has no roots).
pub fn track_stable_branch(points: &[BranchPoint], start_x: f64) -> Vec<Option<f64>> {
    let mut current = start_x;
    points
        .iter()
        .map(|p| {
            let next = p
                .branches
                .iter()
                .filter(|b| b.stable)
                .min_by(|a, b| (a.x - current).abs().total_cmp(&(b.x - current).abs()))
                .map(|b| b.x);
            if let Some(x) = next {
                current = x;
            }
            next
        })
        .collect()
}
