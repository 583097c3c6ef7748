use rwa_core::analysis::{self, BranchLabel};
use rwa_core::duffing::{self, linspace};
use rwa_core::harmonic;
use rwa_core::model::{FrameKind, PhysicalConfig};
use rwa_core::oracle::{self, IntegratorConfig, PhaseState, Scheme, SweepPlan};

fn duffing_cfg() -> PhysicalConfig {
    PhysicalConfig::duffing(1.0, 1.0, 1.0, 0.2).unwrap()
}

#[test]
fn undamped_energy_is_conserved() {
    for cfg in [
        PhysicalConfig::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap(),
        PhysicalConfig::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap(),
    ] {
        let icfg = IntegratorConfig::default().with_gamma(0.0);
        let s0 = PhaseState::new(1.0, 0.0);
        let s1 = oracle::evolve(&cfg, &icfg, 1.0, s0, 1000).unwrap();
        let drift = (s1.energy(&cfg) / s0.energy(&cfg) - 1.0).abs();
        assert!(drift < 1e-8, "alpha = {}: drift {drift:e}", cfg.alpha);
    }
}

#[test]
fn doubling_steps_changes_little() {
    let cfg = duffing_cfg();
    let measure = |steps: usize| {
        let icfg = IntegratorConfig {
            steps_per_period: steps,
            ..IntegratorConfig::default()
        };
        oracle::settle_and_measure(&cfg, &icfg, 1.6, PhaseState::REST)
            .unwrap()
            .magnitude
    };
    let (coarse, fine) = (measure(256), measure(512));
    assert!((coarse - fine).abs() < 1e-8, "{coarse} vs {fine}");
}

#[test]
fn schemes_agree() {
    let cfg = duffing_cfg();
    let gl = IntegratorConfig::default();
    let rk = IntegratorConfig {
        scheme: Scheme::ClassicalRk4,
        ..gl
    };
    let a = oracle::settle_and_measure(&cfg, &gl, 1.6, PhaseState::REST).unwrap();
    let b = oracle::settle_and_measure(&cfg, &rk, 1.6, PhaseState::REST).unwrap();
    assert!((a.magnitude - b.magnitude).abs() < 1e-6);
}

#[test]
fn damping_error_halves_with_gamma() {
    let cfg = PhysicalConfig::harmonic(1.0, 1.0, 1.0).unwrap();
    let err = |gamma: f64| {
        let icfg = IntegratorConfig::default().with_gamma(gamma);
        let recs = oracle::adiabatic_sweep(&cfg, &icfg, &SweepPlan::new(0.4, 0.5, 3)).unwrap();
        (recs.last().unwrap().magnitude - 4.0 / 3.0).abs()
    };
    let (e1, e2) = (err(1e-3), err(5e-4));
    assert!(e1 < 5e-3);
    assert!(e1 / e2 >= 3.0, "{e1:e} / {e2:e}");
}

#[test]
fn linear_sweep_matches_exact_response() {
    let cfg = PhysicalConfig::harmonic(1.0, 1.0, 1.0).unwrap();
    let icfg = IntegratorConfig::for_config(&cfg);
    let recs = oracle::adiabatic_sweep(&cfg, &icfg, &SweepPlan::new(1.5, 2.5, 6)).unwrap();
    for r in recs {
        let exact = harmonic::exact_response(&cfg, r.omega).unwrap().x.abs();
        assert!(
            (r.magnitude - exact).abs() <= 5e-3 * exact,
            "ω = {}",
            r.omega
        );
    }
}

/// Bistable window of the drive-frame slow flow on `grid`.
fn window(cfg: &PhysicalConfig, grid: &[f64]) -> (f64, f64) {
    let inside: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&w| analysis::stable_solution_count(cfg, w, FrameKind::Drive, false) == 2)
        .collect();
    (inside[0], *inside.last().unwrap())
}

#[test]
fn sweeps_show_hysteresis_only_inside_window() {
    let cfg = duffing_cfg();
    let icfg = IntegratorConfig::for_config(&cfg);
    let grid = linspace(0.8, 1.6, 17);
    let (lo, hi) = window(&cfg, &linspace(0.8, 1.6, 1601));
    let up = oracle::sweep_grid(&cfg, &icfg, &grid, PhaseState::REST, true).unwrap();
    let rev: Vec<f64> = grid.iter().rev().copied().collect();
    let mut down = oracle::sweep_grid(&cfg, &icfg, &rev, PhaseState::REST, true).unwrap();
    down.reverse();
    for (u, d) in up.iter().zip(&down) {
        let w = u.omega;
        if (w - lo).abs() < 1e-2 || (w - hi).abs() < 1e-2 {
            continue;
        }
        let gap = (u.magnitude - d.magnitude).abs();
        if w > lo && w < hi {
            assert!(
                gap > 0.1,
                "ω = {w}: up {} down {}",
                u.magnitude,
                d.magnitude
            );
        } else {
            assert!(
                gap <= 5.0 * icfg.gamma * u.magnitude,
                "ω = {w}: gap {gap:e}"
            );
        }
    }
}

#[test]
fn measured_points_sit_on_stable_roots() {
    let cfg = duffing_cfg();
    let icfg = IntegratorConfig::for_config(&cfg);
    for (label, plan) in [
        (BranchLabel::Low, SweepPlan::new(2.0, 1.35, 8)),
        (BranchLabel::High, SweepPlan::new(0.5, 0.9, 8)),
    ] {
        let recs = oracle::adiabatic_sweep(&cfg, &icfg, &plan).unwrap();
        for r in &recs {
            let roots = duffing::steady_states(&cfg, r.omega, FrameKind::Drive, false).unwrap();
            let nearest = roots
                .iter()
                .min_by(|a, b| {
                    (a.x.abs() - r.magnitude)
                        .abs()
                        .total_cmp(&(b.x.abs() - r.magnitude).abs())
                })
                .unwrap();
            assert!(nearest.stable, "{} ω = {}", label.name(), r.omega);
            assert!(
                analysis::discrepancy_x(r.x_omega, nearest.x).unwrap() <= 1e-2,
                "{} ω = {}",
                label.name(),
                r.omega
            );
        }
    }
}

#[test]
fn started_on_stable_branch_stays_there() {
    let cfg = duffing_cfg();
    let icfg = IntegratorConfig::for_config(&cfg);
    let omega = 1.2;
    let roots = duffing::steady_states(&cfg, omega, FrameKind::Drive, false).unwrap();
    for root in roots.iter().filter(|b| b.stable) {
        let rec =
            oracle::settle_and_measure(&cfg, &icfg, omega, PhaseState::new(root.x, 0.0)).unwrap();
        assert!(
            analysis::discrepancy_x(rec.x_omega, root.x).unwrap() <= 1e-2,
            "X = {}: measured {}",
            root.x,
            rec.magnitude
        );
    }
}

#[test]
fn drive_frame_beats_bare_on_low_branch() {
    let cfg = duffing_cfg();
    let icfg = IntegratorConfig::for_config(&cfg);
    let recs = oracle::adiabatic_sweep(&cfg, &icfg, &SweepPlan::new(2.0, 1.35, 10)).unwrap();
    let drive =
        analysis::discrepancy_series(&cfg, &recs, BranchLabel::Low, FrameKind::Drive, false)
            .unwrap();
    let bare = analysis::discrepancy_series(&cfg, &recs, BranchLabel::Low, FrameKind::Bare, false)
        .unwrap();
    for (d, b) in drive.iter().zip(&bare) {
        assert!(d.delta_x <= b.delta_x, "ω = {}", d.omega);
        assert!(!d.flagged);
    }
}
