use std::f64::consts::PI;

use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use rwa_core::analysis::{self, BranchLabel, DiscrepancyPoint};
use rwa_core::duffing;
use rwa_core::harmonic;
use rwa_core::model::{self, Frame, FrameKind};
use rwa_core::oracle::{self, JumpSearch};
use rwa_core::{PhysicalConfig, RwaError, SweepPlan, SweepRecord};

use crate::config::{Command, ConfigError, Resolved, Sweep};
use crate::output::{float, opt_float, Csv, OutDir};

pub struct Run {
    pub command: Command,
    pub resolved: Resolved,
    pub out: OutDir,
    pub warnings: Vec<String>,
    pub results: Map<String, Value>,
}

impl Run {
    fn cfg(&self) -> PhysicalConfig {
        self.resolved.physical
    }

    fn kinds(&self) -> Vec<FrameKind> {
        self.resolved.config.frame.kinds()
    }

    pub fn execute(&mut self) -> Result<()> {
        match self.command {
            Command::Harmonic => self.harmonic(),
            Command::Duffing => self.duffing(),
            Command::PhaseDiagram => self.phase_diagram(),
        }
    }

    fn harmonic(&mut self) -> Result<()> {
        let cfg = self.cfg();
        let section = self.resolved.config.harmonic.clone();
        let grid = section.omega.values("harmonic.omega")?;
        let eps = section.resonance_eps;

        let rows: Vec<Result<Option<[f64; 3]>, RwaError>> = grid
            .par_iter()
            .map(|&w| {
                let values = harmonic::exact_response_with(&cfg, w, eps).and_then(|exact| {
                    let bare = harmonic::rwa_bare_response_with(&cfg, w, eps)?;
                    let drive = harmonic::rwa_drive_response(&cfg, w)?;
                    Ok([exact.x, bare.x, drive.x])
                });
                match values {
                    Ok(v) => Ok(Some(v)),
                    Err(RwaError::ResonanceSingularity { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();

        let mut csv = Csv::new(&[
            "omega",
            "X_exact",
            "X_rwa_bare",
            "X_rwa_drive",
            "ratio",
            "flag",
        ]);
        let mut flagged = 0;
        for (&w, row) in grid.iter().zip(rows) {
            match row? {
                Some([exact, bare, drive]) => csv.row(vec![
                    float(w),
                    float(exact),
                    float(bare),
                    float(drive),
                    float(harmonic::response_ratio(&cfg, w)),
                    String::new(),
                ]),
                None => {
                    flagged += 1;
                    self.warnings
                        .push(format!("omega = {w}: resonance singularity, row flagged"));
                    csv.row(vec![
                        float(w),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        "resonance".into(),
                    ]);
                }
            }
        }
        self.out.csv("harmonic_response.csv", &csv)?;
        self.results.insert("flagged_rows".into(), json!(flagged));

        // An explicitly requested trajectory frequency must not be resonant.
        let w = section.trajectory_omega;
        let n = section.trajectory_points;
        let exact = harmonic::exact_response_with(&cfg, w, eps)?.x;
        let bare = harmonic::rwa_bare_response_with(&cfg, w, eps)?.x;
        let bare_frame = Frame::bare(&cfg);
        let beta = rwa_core::SlowAmplitude::real(model::signed_amplitude(bare, &cfg, &bare_frame));
        let period = 2.0 * PI / w;
        let mut csv = Csv::new(&["curve", "t", "x", "p_scaled", "amp_re", "amp_im"]);
        let curves = [
            (
                "exact_ellipse",
                harmonic::phase_trajectory(exact, &cfg, w, n)?,
            ),
            (
                "rwa_circle",
                harmonic::rwa_circle_trajectory(beta, &cfg, n)?,
            ),
        ];
        for (name, points) in &curves {
            for (k, (x, p)) in points.iter().enumerate() {
                let t = period * k as f64 / n as f64;
                csv.row(vec![
                    name.to_string(),
                    float(t),
                    float(*x),
                    float(*p),
                    String::new(),
                    String::new(),
                ]);
            }
        }
        let micro = harmonic::micromotion_components(&cfg, w)?;
        for k in 0..n {
            let t = period * k as f64 / n as f64;
            let a = micro.rotating_amplitude(t);
            csv.row(vec![
                "micromotion".into(),
                float(t),
                float(micro.displacement(&cfg, t)),
                String::new(),
                float(a.re),
                float(a.im),
            ]);
        }
        self.out.csv("phase_trajectory.csv", &csv)?;
        self.results.insert(
            "trajectory".into(),
            json!({
                "omega": w,
                "X_exact": exact,
                "X_rwa_bare": bare,
                "stationary": micro.stationary.re,
                "counter_rotating": micro.counter_rotating.re,
            }),
        );
        Ok(())
    }

    fn duffing(&mut self) -> Result<()> {
        let cfg = self.cfg();
        let section = self.resolved.config.duffing.clone();
        let q = self.resolved.config.quantum_ordering;
        let grid = section.omega.values("duffing.omega")?;

        let mut folds = Map::new();
        for kind in self.kinds() {
            let sweep = duffing::frequency_sweep(&cfg, kind, &grid, q)?;
            let mut csv = Csv::new(&["omega", "X", "abs_X", "stable"]);
            for p in &sweep.points {
                if let Some(e) = &p.error {
                    self.warnings
                        .push(format!("{kind} frame, omega = {}: {e}", p.omega));
                }
                for b in &p.branches {
                    csv.row(vec![
                        float(p.omega),
                        float(b.x),
                        float(b.x.abs()),
                        (b.stable as u8).to_string(),
                    ]);
                }
            }
            self.out
                .csv(&format!("duffing_branches_{kind}.csv"), &csv)?;
            folds.insert(kind.name().into(), json!(sweep.folds));
        }

        let mut doc = json!({ "folds": folds });
        if self.resolved.config.with_oracle {
            doc["oracle"] = self.duffing_oracle(&section, q, &folds)?;
        }
        self.out.json("folds.json", &doc)?;
        self.results.insert("folds".into(), Value::Object(folds));
        Ok(())
    }

    fn duffing_oracle(
        &mut self,
        section: &crate::config::DuffingSection,
        q: bool,
        folds: &Map<String, Value>,
    ) -> Result<Value> {
        let cfg = self.cfg();
        let icfg = self.resolved.config.integrator;
        let down = plan(&section.downsweep, "duffing.downsweep")?;
        let up = plan(&section.upsweep, "duffing.upsweep")?;
        let search = JumpSearch {
            plan: down,
            threshold_factor: section.jump_threshold,
            rel_tol: section.jump_rel_tol,
        };
        let (down_res, up_res) = rayon::join(
            || oracle::locate_jump(&cfg, &icfg, &search),
            || oracle::adiabatic_sweep(&cfg, &icfg, &up),
        );
        let down_res = down_res?;
        let up_recs = up_res?;

        let mut csv = Csv::new(&["direction", "omega", "x_re", "x_im", "abs_x"]);
        for (dir, recs) in [("down", &down_res.records), ("up", &up_recs)] {
            for r in recs.iter() {
                csv.row(vec![
                    dir.into(),
                    float(r.omega),
                    float(r.x_omega.re),
                    float(r.x_omega.im),
                    float(r.magnitude),
                ]);
            }
        }
        self.out.csv("oracle_sweep.csv", &csv)?;

        // Downsweep records before the jump sit on the low branch.
        let split = oracle::detect_jump_index(&down_res.records, section.jump_threshold)
            .map_or(down_res.records.len(), |i| i + 1);
        let groups: [(BranchLabel, &[SweepRecord]); 3] = [
            (BranchLabel::Low, &down_res.records[..split]),
            (BranchLabel::High, &down_res.records[split..]),
            (BranchLabel::High, &up_recs),
        ];
        let mut csv = Csv::new(&[
            "omega", "branch", "frame", "x_oracle", "x_rwa", "delta_x", "flagged",
        ]);
        for (label, recs) in groups {
            for kind in self.kinds() {
                for p in analysis::discrepancy_series(&cfg, recs, label, kind, q)? {
                    if p.flagged {
                        self.warnings.push(format!(
                            "{kind} frame, omega = {}: pairing mismatch (delta_x = {})",
                            p.omega, p.delta_x
                        ));
                    }
                    csv.row(delta_row(&p));
                }
            }
        }
        self.out.csv("delta_x.csv", &csv)?;

        let mut delta_omega = Map::new();
        if let Some(jump) = down_res.refined {
            for (name, f) in folds {
                if let Some(fold) = f.as_array().and_then(|a| a.first()).and_then(Value::as_f64) {
                    delta_omega
                        .insert(name.clone(), json!(analysis::discrepancy_omega(jump, fold)));
                }
            }
        } else {
            self.warnings
                .push("no jump detected in the oracle downsweep".into());
        }
        Ok(json!({
            "jump_coarse": down_res.coarse,
            "jump_refined": down_res.refined,
            "delta_omega": delta_omega,
        }))
    }

    fn phase_diagram(&mut self) -> Result<()> {
        let cfg = self.cfg();
        let section = self.resolved.config.phase_diagram.clone();
        let q = self.resolved.config.quantum_ordering;
        let omegas = section.omega.values("phase_diagram.omega")?;
        let f0s = section.f0.values("phase_diagram.F0")?;
        if f0s[0] < 0.0 {
            return Err(ConfigError("phase_diagram.F0 must be >= 0".into()).into());
        }
        let kinds = self.kinds();

        let diagrams = kinds
            .iter()
            .map(|&k| analysis::phase_diagram(&cfg, k, &omegas, &f0s, q))
            .collect::<Result<Vec<_>, _>>()?;
        let mut header = vec!["omega".to_string(), "F0".to_string()];
        header.extend(kinds.iter().map(|k| format!("stable_count_{k}")));
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut csv = Csv::new(&header_refs);
        for (i, &f0) in f0s.iter().enumerate() {
            for (j, &w) in omegas.iter().enumerate() {
                let mut row = vec![float(w), float(f0)];
                row.extend(diagrams.iter().map(|d| d.count(i, j).to_string()));
                csv.row(row);
            }
        }
        self.out.csv("phase_diagram_grid.csv", &csv)?;

        let mut rows_f0 = f0s.clone();
        let jumps: Vec<(f64, Option<f64>)> = if self.resolved.config.with_oracle {
            let sweep = plan(&section.oracle_sweep, "phase_diagram.oracle_sweep")?;
            if let Some(bad) = section.oracle_f0.iter().find(|f| !(**f > 0.0)) {
                return Err(ConfigError(format!(
                    "phase_diagram.oracle_F0 entries must be > 0, got {bad}"
                ))
                .into());
            }
            let icfg = self.resolved.config.integrator;
            let found = section
                .oracle_f0
                .par_iter()
                .map(|&f0| {
                    let search = JumpSearch {
                        plan: sweep,
                        threshold_factor: section.jump_threshold,
                        rel_tol: section.jump_rel_tol,
                    };
                    oracle::locate_jump(&cfg.with_f0(f0), &icfg, &search).map(|r| (f0, r.refined))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows_f0.extend(section.oracle_f0.iter().copied());
            found
        } else {
            Vec::new()
        };
        rows_f0.sort_by(f64::total_cmp);
        rows_f0.dedup();

        let mut header = vec!["F0".to_string()];
        header.extend(kinds.iter().map(|k| format!("omega_star_{k}")));
        header.push("omega_jump_oracle".into());
        header.extend(kinds.iter().map(|k| format!("delta_omega_{k}")));
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut csv = Csv::new(&header_refs);
        for &f0 in &rows_f0 {
            let row_cfg = cfg.with_f0(f0);
            let stars: Vec<Option<f64>> = kinds
                .iter()
                .map(|&k| {
                    duffing::fold_frequencies(&row_cfg, k, &omegas, q)
                        .first()
                        .copied()
                })
                .collect();
            let jump = jumps.iter().find(|(f, _)| *f == f0).and_then(|(_, j)| *j);
            if jumps.iter().any(|(f, j)| *f == f0 && j.is_none()) {
                self.warnings
                    .push(format!("F0 = {f0}: no oracle jump detected"));
            }
            let mut row = vec![float(f0)];
            row.extend(stars.iter().map(|s| opt_float(*s)));
            row.push(opt_float(jump));
            row.extend(stars.iter().map(|s| match (jump, s) {
                (Some(j), Some(s)) => float(analysis::discrepancy_omega(j, *s)),
                _ => String::new(),
            }));
            csv.row(row);
        }
        self.out.csv("phase_diagram_boundary.csv", &csv)?;
        self.results.insert(
            "oracle_jumps".into(),
            jumps
                .iter()
                .map(|(f, j)| json!({"F0": f, "omega_jump": j}))
                .collect(),
        );
        Ok(())
    }
}

fn plan(sweep: &Sweep, what: &str) -> Result<SweepPlan, ConfigError> {
    let plan = SweepPlan::new(sweep.start, sweep.end, sweep.points);
    plan.validate()
        .map_err(|e| ConfigError(format!("{what}: {e}")))?;
    Ok(plan)
}

fn delta_row(p: &DiscrepancyPoint) -> Vec<String> {
    vec![
        float(p.omega),
        p.branch.name().into(),
        p.kind.name().into(),
        float(p.x_oracle),
        float(p.x_rwa),
        float(p.delta_x),
        (p.flagged as u8).to_string(),
    ]
}
