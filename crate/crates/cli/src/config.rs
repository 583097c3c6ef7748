//! Run configuration: a single JSON document, layered as
//! built-in defaults < config file < `--set` overrides < command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use rwa_core::{FrameKind, IntegratorConfig, PhysicalConfig};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Anything wrong with the user's configuration. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    Bare,
    Drive,
    #[default]
    Both,
}

impl FrameChoice {
    pub fn kinds(self) -> Vec<FrameKind> {
        match self {
            FrameChoice::Bare => vec![FrameKind::Bare],
            FrameChoice::Drive => vec![FrameKind::Drive],
            FrameChoice::Both => FrameKind::ALL.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameChoice::Bare => "bare",
            FrameChoice::Drive => "drive",
            FrameChoice::Both => "both",
        }
    }
}

/// Physical parameters; unset fields take the per-command defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub m: Option<f64>,
    pub omega0: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "F0", alias = "f0")]
    pub f0: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub const fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn values(&self, what: &str) -> Result<Vec<f64>, ConfigError> {
        if !(self.min.is_finite() && self.max.is_finite())
            || self.points < 2
            || !(self.max > self.min)
        {
            return Err(ConfigError(format!(
                "{what} grid needs finite min < max and points >= 2, got {self:?}"
            )));
        }
        Ok(rwa_core::duffing::linspace(self.min, self.max, self.points))
    }
}

/// An oracle frequency sweep from `start` to `end` (either direction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicSection {
    pub omega: Grid,
    /// Drive frequency for `phase_trajectory.csv`.
    pub trajectory_omega: f64,
    pub trajectory_points: usize,
    /// Relative distance from `ω₀` treated as resonant.
    pub resonance_eps: f64,
}

impl Default for HarmonicSection {
    fn default() -> Self {
        Self {
            omega: Grid::new(0.1, 2.0, 191),
            trajectory_omega: 0.5,
            trajectory_points: 256,
            resonance_eps: rwa_core::harmonic::DEFAULT_RESONANCE_EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DuffingSection {
    pub omega: Grid,
    /// Oracle sweep started on the low branch, stepping down through the fold.
    pub downsweep: Sweep,
    /// Oracle sweep started below resonance on the high branch.
    pub upsweep: Sweep,
    pub jump_threshold: f64,
    pub jump_rel_tol: f64,
}

impl Default for DuffingSection {
    fn default() -> Self {
        Self {
            omega: Grid::new(0.5, 2.0, 301),
            downsweep: Sweep {
                start: 2.0,
                end: 0.9,
                points: 45,
            },
            upsweep: Sweep {
                start: 0.5,
                end: 0.95,
                points: 20,
            },
            jump_threshold: 20.0,
            jump_rel_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseDiagramSection {
    pub omega: Grid,
    #[serde(rename = "F0")]
    pub f0: Grid,
    /// Drive strengths at which the oracle jump is located.
    #[serde(rename = "oracle_F0")]
    pub oracle_f0: Vec<f64>,
    pub oracle_sweep: Sweep,
    pub jump_threshold: f64,
    pub jump_rel_tol: f64,
}

impl Default for PhaseDiagramSection {
    fn default() -> Self {
        Self {
            omega: Grid::new(0.5, 2.0, 151),
            f0: Grid::new(0.0, 0.4, 41),
            oracle_f0: vec![0.05, 0.1, 0.2],
            oracle_sweep: Sweep {
                start: 2.0,
                end: 0.9,
                points: 111,
            },
            jump_threshold: 20.0,
            jump_rel_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub physical: PhysicalSection,
    pub integrator: IntegratorConfig,
    pub frame: FrameChoice,
    pub quantum_ordering: bool,
    pub with_oracle: bool,
    pub out: PathBuf,
    pub harmonic: HarmonicSection,
    pub duffing: DuffingSection,
    pub phase_diagram: PhaseDiagramSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            physical: PhysicalSection::default(),
            integrator: IntegratorConfig::default(),
            frame: FrameChoice::default(),
            quantum_ordering: false,
            with_oracle: false,
            out: PathBuf::from("out"),
            harmonic: HarmonicSection::default(),
            duffing: DuffingSection::default(),
            phase_diagram: PhaseDiagramSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Harmonic,
    Duffing,
    PhaseDiagram,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Harmonic => "harmonic",
            Command::Duffing => "duffing",
            Command::PhaseDiagram => "phase-diagram",
        }
    }

    fn physical_defaults(self) -> PhysicalConfig {
        match self {
            Command::Harmonic => PhysicalConfig::default(),
            Command::Duffing | Command::PhaseDiagram => PhysicalConfig {
                alpha: 1.0,
                f0: 0.2,
                ..PhysicalConfig::default()
            },
        }
    }
}

/// Flags given on the command line; `None` leaves the lower layers alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub frame: Option<FrameChoice>,
    pub with_oracle: bool,
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration plus the bookkeeping for the run summary.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub physical: PhysicalConfig,
    /// Dotted keys that took a built-in default.
    pub defaults_applied: Vec<String>,
}

pub fn read_file(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(ConfigError(format!(
            "{}: top level must be an object",
            path.display()
        )));
    }
    Ok(value)
}

/// Sets `root.a.b.c = value` for the key `a.b.c`, creating objects on the way.
pub fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("malformed key {key:?}")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| ConfigError(format!("{key}: {part} is not a section")))?;
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let map = node
        .as_object_mut()
        .ok_or_else(|| ConfigError(format!("{key}: parent is not a section")))?;
    map.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// `key=value`; the value is read as JSON and falls back to a plain string.
pub fn parse_set(arg: &str) -> Result<(String, Value), ConfigError> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("--set expects key=value, got {arg:?}")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.trim().to_string(), value))
}

fn collect_defaults(defaults: &Value, given: Option<&Value>, prefix: &str, out: &mut Vec<String>) {
    match defaults {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                collect_defaults(v, given.and_then(|g| g.get(k)), &path, out);
            }
        }
        _ if given.is_none() => out.push(prefix.to_string()),
        _ => {}
    }
}

pub fn resolve(
    command: Command,
    file: Option<Value>,
    overrides: &Overrides,
) -> Result<Resolved, ConfigError> {
    let mut layered = file.unwrap_or_else(|| Value::Object(Map::new()));
    for arg in &overrides.sets {
        let (key, value) = parse_set(arg)?;
        set_path(&mut layered, &key, value)?;
    }
    if let Some(frame) = overrides.frame {
        set_path(&mut layered, "frame", Value::String(frame.name().into()))?;
    }
    if overrides.with_oracle {
        set_path(&mut layered, "with_oracle", Value::Bool(true))?;
    }
    if let Some(out) = &overrides.out {
        set_path(
            &mut layered,
            "out",
            Value::String(out.to_string_lossy().into_owned()),
        )?;
    }

    let config: RunConfig =
        serde_json::from_value(layered.clone()).map_err(|e| ConfigError(e.to_string()))?;

    let base = command.physical_defaults();
    let p = config.physical;
    let physical = PhysicalConfig {
        m: p.m.unwrap_or(base.m),
        omega0: p.omega0.unwrap_or(base.omega0),
        alpha: p.alpha.unwrap_or(base.alpha),
        f0: p.f0.unwrap_or(base.f0),
        hbar: p.hbar.unwrap_or(base.hbar),
    };
    physical
        .validate()
        .map_err(|e| ConfigError(e.to_string()))?;
    config
        .integrator
        .validate()
        .map_err(|e| ConfigError(e.to_string()))?;

    let mut filled = serde_json::to_value(&config).expect("config serializes");
    let full_physical = serde_json::json!({
        "m": physical.m, "omega0": physical.omega0, "alpha": physical.alpha,
        "F0": physical.f0, "hbar": physical.hbar,
    });
    filled["physical"] = full_physical;
    let mut defaults_applied = Vec::new();
    collect_defaults(&filled, Some(&layered), "", &mut defaults_applied);

    Ok(Resolved {
        config,
        physical,
        defaults_applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve_sets(command: Command, sets: &[&str]) -> Result<Resolved, ConfigError> {
        let overrides = Overrides {
            sets: sets.iter().map(|s| s.to_string()).collect(),
            ..Overrides::default()
        };
        resolve(command, None, &overrides)
    }

    #[test]
    fn per_command_physical_defaults() {
        let h = resolve_sets(Command::Harmonic, &[]).unwrap();
        assert_eq!(h.physical, PhysicalConfig::default());
        let d = resolve_sets(Command::Duffing, &[]).unwrap();
        assert_eq!((d.physical.alpha, d.physical.f0), (1.0, 0.2));
        assert!(d.defaults_applied.contains(&"physical.alpha".to_string()));
    }

    #[test]
    fn layering_order() {
        let file = serde_json::json!({"physical": {"F0": 0.1}, "frame": "bare"});
        let overrides = Overrides {
            sets: vec!["physical.F0=0.3".into(), "frame=drive".into()],
            frame: Some(FrameChoice::Both),
            ..Overrides::default()
        };
        let r = resolve(Command::Duffing, Some(file), &overrides).unwrap();
        assert_eq!(r.physical.f0, 0.3);
        assert_eq!(r.config.frame, FrameChoice::Both);
        assert!(!r.defaults_applied.contains(&"physical.F0".to_string()));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(resolve_sets(Command::Harmonic, &["physical.omgea0=2"]).is_err());
        assert!(resolve_sets(Command::Harmonic, &["harmonic.omega.pionts=3"]).is_err());
        assert!(resolve_sets(Command::Harmonic, &["bogus=1"]).is_err());
        assert!(resolve_sets(Command::Harmonic, &["physical.m=-1"]).is_err());
    }

    #[test]
    fn set_values_parse_as_json() {
        let (k, v) = parse_set("phase_diagram.oracle_F0=[0.1, 0.2]").unwrap();
        assert_eq!(k, "phase_diagram.oracle_F0");
        assert_eq!(v, serde_json::json!([0.1, 0.2]));
        assert_eq!(
            parse_set("frame=drive").unwrap().1,
            Value::String("drive".into())
        );
        assert!(parse_set("frame").is_err());
    }
}
