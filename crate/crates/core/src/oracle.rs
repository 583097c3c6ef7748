//! Classical time-domain reference for the rotating-frame predictions.
//!
//! Hamilton's equations of the driven Duffing oscillator with a small
//! velocity damping,
//!
//! ```text
//! ẋ = p/m,   ṗ = −mω₀²x − αx³ + F₀cos(ωt) − γp,
//! ```
//!
//! are integrated with a fixed step commensurate with the drive period, so
//! that every measurement window covers an integer number of periods and the
//! Fourier projection onto `e^{−iωt}` is spectrally accurate. Frequency
//! sweeps carry the final state of one point into the next.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RwaError};
use crate::model::PhysicalConfig;

/// Fixed-step fourth-order Runge–Kutta schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Two-stage Gauss–Legendre (implicit, symplectic, preserves quadratic
    /// invariants). Stage equations are solved by fixed-point iteration.
    #[default]
    GaussLegendre4,
    /// The classical explicit four-stage method.
    ClassicalRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub steps_per_period: usize,
    /// Velocity damping rate, in angular frequency.
    pub gamma: f64,
    pub settle_periods: usize,
    pub measure_periods: usize,
    /// `|x|` above this aborts the run.
    pub blowup_bound: f64,
    pub scheme: Scheme,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps_per_period: 256,
            gamma: 1e-3,
            settle_periods: 2000,
            measure_periods: 100,
            blowup_bound: 1e6,
            scheme: Scheme::default(),
        }
    }
}

impl IntegratorConfig {
    /// Defaults with `γ = 10⁻³ ω₀`.
    pub fn for_config(cfg: &PhysicalConfig) -> Self {
        Self {
            gamma: 1e-3 * cfg.omega0,
            ..Self::default()
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(RwaError::InvalidParameter(msg));
        if self.steps_per_period < 32 {
            return fail(format!(
                "steps_per_period must be >= 32, got {}",
                self.steps_per_period
            ));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return fail(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if self.measure_periods < 1 {
            return fail("measure_periods must be >= 1".into());
        }
        if !(self.blowup_bound > 0.0) {
            return fail(format!(
                "blowup_bound must be > 0, got {}",
                self.blowup_bound
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub p: f64,
}

impl PhaseState {
    pub const REST: PhaseState = PhaseState { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    /// `p²/2m + mω₀²x²/2 + αx⁴/4`.
    pub fn energy(&self, cfg: &PhysicalConfig) -> f64 {
        let x2 = self.x * self.x;
        self.p * self.p / (2.0 * cfg.m)
            + 0.5 * cfg.m * cfg.omega0 * cfg.omega0 * x2
            + 0.25 * cfg.alpha * x2 * x2
    }
}

/// Uniformly sampled solution; `t[0]` is a drive maximum (`cos(ωt) = 1`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last_state(&self) -> Option<PhaseState> {
        Some(PhaseState::new(*self.x.last()?, *self.p.last()?))
    }
}

struct Dynamics {
    inv_m: f64,
    stiffness: f64,
    alpha: f64,
    f0: f64,
    gamma: f64,
    omega: f64,
}

impl Dynamics {
    fn new(cfg: &PhysicalConfig, gamma: f64, omega: f64) -> Self {
        Self {
            inv_m: 1.0 / cfg.m,
            stiffness: cfg.m * cfg.omega0 * cfg.omega0,
            alpha: cfg.alpha,
            f0: cfg.f0,
            gamma,
            omega,
        }
    }

    #[inline]
    fn rhs(&self, t: f64, x: f64, p: f64) -> [f64; 2] {
        [
            p * self.inv_m,
            -self.stiffness * x - self.alpha * x * x * x + self.f0 * (self.omega * t).cos()
                - self.gamma * p,
        ]
    }
}

const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const GL_C: [f64; 2] = [0.5 - SQRT3_6, 0.5 + SQRT3_6];
const GL_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3_6], [0.25 + SQRT3_6, 0.25]];
const GL_MAX_ITERS: usize = 60;

fn step_gauss_legendre(dyn_: &Dynamics, t: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k0 = dyn_.rhs(t, y[0], y[1]);
    let mut k = [k0, k0];
    let times = [t + GL_C[0] * h, t + GL_C[1] * h];
    for _ in 0..GL_MAX_ITERS {
        let mut next = [[0.0; 2]; 2];
        for s in 0..2 {
            let yx = y[0] + h * (GL_A[s][0] * k[0][0] + GL_A[s][1] * k[1][0]);
            let yp = y[1] + h * (GL_A[s][0] * k[0][1] + GL_A[s][1] * k[1][1]);
            next[s] = dyn_.rhs(times[s], yx, yp);
        }
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for s in 0..2 {
            for c in 0..2 {
                diff = diff.max((next[s][c] - k[s][c]).abs());
                scale = scale.max(next[s][c].abs());
            }
        }
        k = next;
        if diff <= 1e-16 * scale {
            break;
        }
    }
    [
        y[0] + 0.5 * h * (k[0][0] + k[1][0]),
        y[1] + 0.5 * h * (k[0][1] + k[1][1]),
    ]
}

fn step_rk4(dyn_: &Dynamics, t: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = dyn_.rhs(t, y[0], y[1]);
    let k2 = dyn_.rhs(t + 0.5 * h, y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]);
    let k3 = dyn_.rhs(t + 0.5 * h, y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]);
    let k4 = dyn_.rhs(t + h, y[0] + h * k3[0], y[1] + h * k3[1]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Runs `n_periods` drive periods, handing every accepted state to `visit`.
fn run(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    omega: f64,
    state0: PhaseState,
    n_periods: usize,
    mut visit: impl FnMut(f64, [f64; 2]),
) -> Result<PhaseState> {
    icfg.validate()?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(RwaError::InvalidParameter(format!(
            "omega must be > 0, got {omega}"
        )));
    }
    let dyn_ = Dynamics::new(cfg, icfg.gamma, omega);
    let n_steps = n_periods * icfg.steps_per_period;
    let h = 2.0 * PI / omega / icfg.steps_per_period as f64;
    let mut y = [state0.x, state0.p];
    visit(0.0, y);
    for k in 0..n_steps {
        let t = k as f64 * h;
        y = match icfg.scheme {
            Scheme::GaussLegendre4 => step_gauss_legendre(&dyn_, t, y, h),
            Scheme::ClassicalRk4 => step_rk4(&dyn_, t, y, h),
        };
        if !(y[0].abs() <= icfg.blowup_bound) || !y[1].is_finite() {
            return Err(RwaError::NumericalBlowup {
                omega,
                t: t + h,
                x: y[0],
            });
        }
        visit((k + 1) as f64 * h, y);
    }
    Ok(PhaseState::new(y[0], y[1]))
}

/// Advances the state by `n_periods` drive periods without recording.
pub fn evolve(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    omega: f64,
    state0: PhaseState,
    n_periods: usize,
) -> Result<PhaseState> {
    run(cfg, icfg, omega, state0, n_periods, |_, _| {})
}

/// Integrates `n_periods` drive periods and records every step.
pub fn integrate(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    omega: f64,
    state0: PhaseState,
    n_periods: usize,
) -> Result<Trajectory> {
    if n_periods < 1 {
        return Err(RwaError::InvalidParameter("n_periods must be >= 1".into()));
    }
    let n = n_periods * icfg.steps_per_period + 1;
    let mut traj = Trajectory {
        t: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        p: Vec::with_capacity(n),
    };
    run(cfg, icfg, omega, state0, n_periods, |t, y| {
        traj.t.push(t);
        traj.x.push(y[0]);
        traj.p.push(y[1]);
    })?;
    Ok(traj)
}

/// `(2/T) ∫ x(t) e^{−iωt} dt` over the whole trajectory by the trapezoidal
/// rule; `X cos(ωt + φ)` maps to `X e^{iφ}`. The trajectory must be uniformly
/// sampled over an integer number of periods.
pub fn fourier_component(traj: &Trajectory, omega: f64) -> Complex64 {
    let n = traj.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, (&t, &x)) in traj.t.iter().zip(&traj.x).enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * x * Complex64::from_polar(1.0, -omega * t);
    }
    let span = traj.t[n - 1] - traj.t[0];
    let h = span / (n - 1) as f64;
    acc * (2.0 * h / span)
}

/// One measured point of a frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub omega: f64,
    pub x_omega: Complex64,
    pub magnitude: f64,
    pub final_state: PhaseState,
}

/// Settles for `settle_periods`, then projects `measure_periods` onto the
/// drive frequency.
pub fn settle_and_measure(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    omega: f64,
    state: PhaseState,
) -> Result<SweepRecord> {
    let settled = evolve(cfg, icfg, omega, state, icfg.settle_periods)?;
    let traj = integrate(cfg, icfg, omega, settled, icfg.measure_periods)?;
    let x_omega = fourier_component(&traj, omega);
    Ok(SweepRecord {
        omega,
        x_omega,
        magnitude: x_omega.norm(),
        final_state: traj.last_state().unwrap_or(settled),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPlan {
    pub omega_start: f64,
    pub omega_end: f64,
    pub n_points: usize,
    pub initial_state: PhaseState,
    /// Carry each point's final state into the next ("continue"); otherwise
    /// every point restarts from `initial_state`.
    pub carry_state: bool,
}

impl SweepPlan {
    pub fn new(omega_start: f64, omega_end: f64, n_points: usize) -> Self {
        Self {
            omega_start,
            omega_end,
            n_points,
            initial_state: PhaseState::REST,
            carry_state: true,
        }
    }

    pub fn cold(self, state: PhaseState) -> Self {
        Self {
            initial_state: state,
            carry_state: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(RwaError::InvalidParameter(
                "sweep needs n_points >= 2".into(),
            ));
        }
        for w in [self.omega_start, self.omega_end] {
            if !(w.is_finite() && w > 0.0) {
                return Err(RwaError::InvalidParameter(format!(
                    "sweep frequencies must be > 0, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn omegas(&self) -> Vec<f64> {
        crate::duffing::linspace(self.omega_start, self.omega_end, self.n_points)
    }

    pub fn is_upsweep(&self) -> bool {
        self.omega_end > self.omega_start
    }
}

pub fn adiabatic_sweep(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    plan: &SweepPlan,
) -> Result<Vec<SweepRecord>> {
    plan.validate()?;
    sweep_grid(
        cfg,
        icfg,
        &plan.omegas(),
        plan.initial_state,
        plan.carry_state,
    )
}

/// Sweep over an explicit frequency list.
pub fn sweep_grid(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    omegas: &[f64],
    initial_state: PhaseState,
    carry_state: bool,
) -> Result<Vec<SweepRecord>> {
    let mut state = initial_state;
    let mut records = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let start = if carry_state { state } else { initial_state };
        let rec = settle_and_measure(cfg, icfg, omega, start)?;
        state = rec.final_state;
        records.push(rec);
    }
    Ok(records)
}

/// Index `i` of the first adjacent pair `(i, i+1)` whose magnitude change
/// exceeds `threshold_factor` times the median adjacent change.
pub fn detect_jump_index(records: &[SweepRecord], threshold_factor: f64) -> Option<usize> {
    if records.len() < 3 {
        return None;
    }
    let diffs: Vec<f64> = records
        .windows(2)
        .map(|w| (w[1].magnitude - w[0].magnitude).abs())
        .collect();
    let mut sorted = diffs.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let threshold = threshold_factor * median;
    diffs.iter().position(|&d| d > threshold)
}

/// Midpoint frequency of the first jump, see [`detect_jump_index`].
pub fn detect_jump(records: &[SweepRecord], threshold_factor: f64) -> Option<f64> {
    detect_jump_index(records, threshold_factor)
        .map(|i| 0.5 * (records[i].omega + records[i + 1].omega))
}

/// Upper bound on trial points in [`refine_jump`].
const REFINE_MAX_TRIALS: usize = 400;

/// Adiabatic limit of the jump first seen between `records[index]` and
/// `records[index + 1]`. Starting from the last state on the original branch,
/// the sweep continues in the same direction with a step that is halved
/// whenever a trial point leaves the branch, until the step falls below
/// `rel_tol`. A coarse step can knock the state out of a basin that is
/// shrinking towards the fold, so the refined jump may lie beyond the coarse
/// bracket. A trial counts as jumped when its magnitude moved by more than
/// half the coarse jump.
pub fn refine_jump(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    records: &[SweepRecord],
    index: usize,
    rel_tol: f64,
) -> Result<f64> {
    let (before, after) = match (records.get(index), records.get(index + 1)) {
        (Some(b), Some(a)) => (b, a),
        _ => {
            return Err(RwaError::InvalidParameter(format!(
                "jump index {index} out of range"
            )))
        }
    };
    let half_jump = 0.5 * (after.magnitude - before.magnitude).abs();
    let mut omega = before.omega;
    let mut state = before.final_state;
    let mut reference = before.magnitude;
    let mut step = 0.5 * (after.omega - before.omega);
    for _ in 0..REFINE_MAX_TRIALS {
        if step.abs() <= rel_tol * omega.abs() {
            break;
        }
        let trial = omega + step;
        if !(trial > 0.0) {
            step *= 0.5;
            continue;
        }
        let rec = settle_and_measure(cfg, icfg, trial, state)?;
        if (rec.magnitude - reference).abs() < half_jump {
            omega = trial;
            state = rec.final_state;
            reference = rec.magnitude;
        } else {
            step *= 0.5;
        }
    }
    Ok(omega + step)
}

/// Coarse sweep followed by refinement of the first jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSearch {
    pub plan: SweepPlan,
    pub threshold_factor: f64,
    pub rel_tol: f64,
}

impl JumpSearch {
    pub fn new(plan: SweepPlan) -> Self {
        Self {
            plan,
            threshold_factor: 20.0,
            rel_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpResult {
    pub records: Vec<SweepRecord>,
    pub coarse: Option<f64>,
    pub refined: Option<f64>,
}

pub fn locate_jump(
    cfg: &PhysicalConfig,
    icfg: &IntegratorConfig,
    search: &JumpSearch,
) -> Result<JumpResult> {
    let records = adiabatic_sweep(cfg, icfg, &search.plan)?;
    let index = detect_jump_index(&records, search.threshold_factor);
    let coarse = index.map(|i| 0.5 * (records[i].omega + records[i + 1].omega));
    let refined = match index {
        Some(i) => Some(refine_jump(cfg, icfg, &records, i, search.rel_tol)?),
        None => None,
    };
    Ok(JumpResult {
        records,
        coarse,
        refined,
    })
}
