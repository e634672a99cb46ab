//! Scenario definition and the line-oriented scenario file format.
//!
//! ```text
//! # comment
//! [scenario]
//! name = head_on
//! dt = 0.1
//! duration = 60
//! [sensor]
//! detection_range = 3000
//! [region]
//! horizontal_radius = 500
//! [own]
//! position = 0 0 100
//! velocity = 0 50 0
//! [intruder i1]
//! position = 0 3000 100
//! segment = 0 0 -100 0
//! [fault 1]
//! kind = SensorFailure
//! window = 5 10
//! source = both
//! ```
//!
//! Sections are `[scenario]`, `[sensor]`, `[region]`, `[own]`,
//! `[intruder <id>]` and `[fault <n>]`; entries are `key = value`. Intruder
//! velocity is piecewise constant, one `segment = t_start vx vy vz` per
//! piece. Inside a fault section, keys other than `kind` and `window`
//! become fault parameters.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::detection::RegionParams;
use crate::types::{Position, Velocity, MAX_SPEED_MPS};

/// Onboard sensor and cooperative channel configuration for a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig {
    pub detection_range: f64,
    pub azimuth_for: f64,
    pub elevation_for: f64,
    pub coop_range: f64,
    pub coop_azimuth_for: f64,
    pub coop_elevation_for: f64,
    pub update_period: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            detection_range: 3000.0,
            azimuth_for: 110.0,
            elevation_for: 15.0,
            coop_range: 37040.0,
            coop_azimuth_for: 110.0,
            coop_elevation_for: 15.0,
            update_period: 0.1,
        }
    }
}

/// One piece of an intruder's piecewise-constant velocity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySegment {
    pub t_start: f64,
    pub velocity: Velocity,
}

/// A scripted intruder: initial position plus velocity segments.
#[derive(Debug, Clone, PartialEq)]
pub struct IntruderDef {
    pub id: String,
    pub position: Position,
    pub segments: Vec<VelocitySegment>,
}

impl IntruderDef {
    /// Velocity in force at time `t` (zero before the first segment).
    pub fn velocity_at(&self, t: f64) -> Velocity {
        let mut v = Velocity::zero();
        for seg in &self.segments {
            if seg.t_start <= t {
                v = seg.velocity;
            } else {
                break;
            }
        }
        v
    }

    /// Ground-truth position at time `t` (piecewise-linear motion).
    pub fn position_at(&self, t: f64) -> Position {
        let mut pos = self.position;
        let mut cursor = 0.0;
        let mut vel = Velocity::zero();
        for seg in &self.segments {
            if seg.t_start >= t {
                break;
            }
            let advance = seg.t_start.max(cursor);
            pos = pos.offset_by(vel.as_vec3().scaled(advance - cursor));
            cursor = advance;
            vel = seg.velocity;
        }
        pos.offset_by(vel.as_vec3().scaled(t - cursor))
    }
}

/// Failure modes injectable by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    /// Sensor reports status false (parameter `source`: primary, secondary
    /// or both; default both).
    SensorFailure,
    /// Measures silently dropped from frames (parameter `intruder` limits
    /// the drop to one id; default all).
    SoftwareErrorDrop,
    /// Frames are not delivered at all during the window.
    CommDelay,
    /// Configuration values overridden during the window (parameters name
    /// the fields, e.g. `coop_range = 30000`).
    ConfigError,
    /// Measures inside a body-azimuth sector are blocked (parameters
    /// `azimuth_min`/`azimuth_max`; default the whole sky).
    PhysicalObstruction,
    /// A spurious measure is injected (parameters `id`, `dx`, `dy`, `dz`).
    PhantomDetection,
    /// A pipeline stage is skipped (parameter `stage`: detection, tracking,
    /// assessment or maneuver).
    StageDisable,
}

impl FaultKind {
    pub fn parse(s: &str) -> Option<FaultKind> {
        Some(match s {
            "SensorFailure" => FaultKind::SensorFailure,
            "SoftwareErrorDrop" => FaultKind::SoftwareErrorDrop,
            "CommDelay" => FaultKind::CommDelay,
            "ConfigError" => FaultKind::ConfigError,
            "PhysicalObstruction" => FaultKind::PhysicalObstruction,
            "PhantomDetection" => FaultKind::PhantomDetection,
            "StageDisable" => FaultKind::StageDisable,
        _ => return None,
        })
    }
}

/// One injected fault, active over an inclusive time window.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultInjection {
    pub kind: FaultKind,
    pub window: (f64, f64),
    pub params: BTreeMap<String, String>,
}

impl FaultInjection {
    pub fn active_at(&self, t: f64) -> bool {
        t >= self.window.0 && t <= self.window.1
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }
}

/// Own-ship initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwnInit {
    pub position: Position,
    pub velocity: Velocity,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dt: f64,
    pub duration: f64,
    pub sensor: SensorConfig,
    pub region: RegionParams,
    pub own: OwnInit,
    pub intruders: Vec<IntruderDef>,
    pub faults: Vec<FaultInjection>,
}

impl Scenario {
    /// Number of simulation ticks (tick i runs at `i * dt`, i < ticks).
    pub fn ticks(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid scenario field {field}: {reason}")]
    Validation { field: String, reason: String },
}

fn parse_err(line: usize, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        reason: reason.into(),
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64, ScenarioError> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("{key}: expected a number, got {value:?}")))
}

fn parse_triple(value: &str, line: usize, key: &str) -> Result<(f64, f64, f64), ScenarioError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(parse_err(
            line,
            format!("{key}: expected three numbers, got {value:?}"),
        ));
    }
    Ok((
        parse_f64(parts[0], line, key)?,
        parse_f64(parts[1], line, key)?,
        parse_f64(parts[2], line, key)?,
    ))
}

#[derive(Debug)]
enum Section {
    None,
    Scenario,
    Sensor,
    Region,
    Own,
    Intruder(usize),
    Fault(usize),
}

/// Parses and validates a scenario from its textual form.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut name: Option<String> = None;
    let mut dt = 0.1;
    let mut duration: Option<f64> = None;
    let mut sensor = SensorConfig::default();
    let mut horizontal_radius = 500.0;
    let mut vertical_half_height = 100.0;
    let mut own_position: Option<Position> = None;
    let mut own_velocity = Velocity::zero();
    let mut intruders: Vec<IntruderDef> = Vec::new();
    let mut faults: Vec<(usize, FaultInjection)> = Vec::new();
    let mut section = Section::None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                .trim();
            section = match header {
                "scenario" => Section::Scenario,
                "sensor" => Section::Sensor,
                "region" => Section::Region,
                "own" => Section::Own,
                _ => {
                    if let Some(id) = header.strip_prefix("intruder ") {
                        let id = id.trim();
                        if id.is_empty() {
                            return Err(parse_err(line_no, "intruder section needs an id"));
                        }
                        intruders.push(IntruderDef {
                            id: id.to_string(),
                            position: Position::new(0.0, 0.0, 0.0),
                            segments: Vec::new(),
                        });
                        Section::Intruder(intruders.len() - 1)
                    } else if header.starts_with("fault") {
                        faults.push((
                            line_no,
                            FaultInjection {
                                kind: FaultKind::CommDelay,
                                window: (f64::NAN, f64::NAN),
                                params: BTreeMap::new(),
                            },
                        ));
                        Section::Fault(faults.len() - 1)
                    } else {
                        return Err(parse_err(line_no, format!("unknown section [{header}]")));
                    }
                }
            };
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        let value = value.trim();

        match section {
            Section::None => return Err(parse_err(line_no, "entry before any section")),
            Section::Scenario => match key {
                "name" => name = Some(value.to_string()),
                "dt" => dt = parse_f64(value, line_no, key)?,
                "duration" => duration = Some(parse_f64(value, line_no, key)?),
                _ => return Err(parse_err(line_no, format!("unknown scenario key {key}"))),
            },
            Section::Sensor => {
                let v = parse_f64(value, line_no, key)?;
                match key {
                    "detection_range" => sensor.detection_range = v,
                    "azimuth_for" => sensor.azimuth_for = v,
                    "elevation_for" => sensor.elevation_for = v,
                    "coop_range" => sensor.coop_range = v,
                    "coop_azimuth_for" => sensor.coop_azimuth_for = v,
                    "coop_elevation_for" => sensor.coop_elevation_for = v,
                    "update_period" => sensor.update_period = v,
                    _ => return Err(parse_err(line_no, format!("unknown sensor key {key}"))),
                }
            }
            Section::Region => {
                let v = parse_f64(value, line_no, key)?;
                match key {
                    "horizontal_radius" => horizontal_radius = v,
                    "vertical_half_height" => vertical_half_height = v,
                    _ => return Err(parse_err(line_no, format!("unknown region key {key}"))),
                }
            }
            Section::Own => match key {
                "position" => {
                    let (x, y, z) = parse_triple(value, line_no, key)?;
                    own_position = Some(Position::new(x, y, z));
                }
                "velocity" => {
                    let (vx, vy, vz) = parse_triple(value, line_no, key)?;
                    own_velocity = Velocity::new(vx, vy, vz);
                }
                _ => return Err(parse_err(line_no, format!("unknown own key {key}"))),
            },
            Section::Intruder(idx) => match key {
                "position" => {
                    let (x, y, z) = parse_triple(value, line_no, key)?;
                    intruders[idx].position = Position::new(x, y, z);
                }
                "segment" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(parse_err(
                            line_no,
                            format!("segment: expected t_start vx vy vz, got {value:?}"),
                        ));
                    }
                    let t_start = parse_f64(parts[0], line_no, key)?;
                    let vx = parse_f64(parts[1], line_no, key)?;
                    let vy = parse_f64(parts[2], line_no, key)?;
                    let vz = parse_f64(parts[3], line_no, key)?;
                    intruders[idx].segments.push(VelocitySegment {
                        t_start,
                        velocity: Velocity::new(vx, vy, vz),
                    });
                }
                _ => return Err(parse_err(line_no, format!("unknown intruder key {key}"))),
            },
            Section::Fault(idx) => match key {
                "kind" => {
                    faults[idx].1.kind = FaultKind::parse(value)
                        .ok_or_else(|| parse_err(line_no, format!("unknown fault kind {value}")))?;
                }
                "window" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(parse_err(
                            line_no,
                            format!("window: expected t_start t_end, got {value:?}"),
                        ));
                    }
                    faults[idx].1.window = (
                        parse_f64(parts[0], line_no, key)?,
                        parse_f64(parts[1], line_no, key)?,
                    );
                }
                _ => {
                    faults[idx]
                        .1
                        .params
                        .insert(key.to_string(), value.to_string());
                }
            },
        }
    }

    let name = name.ok_or_else(|| invalid("name", "missing [scenario] name"))?;
    let duration = duration.ok_or_else(|| invalid("duration", "missing [scenario] duration"))?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(duration >= dt) || !duration.is_finite() {
        return Err(invalid(
            "duration",
            format!("must be at least dt, got {duration}"),
        ));
    }
    let region = RegionParams::new(horizontal_radius, vertical_half_height)
        .map_err(|e| invalid("region", e.to_string()))?;
    let own_position =
        own_position.ok_or_else(|| invalid("own.position", "missing [own] position"))?;
    if !own_position.is_finite() {
        return Err(invalid("own.position", "must be finite"));
    }
    if !own_velocity.is_finite() || own_velocity.magnitude() >= MAX_SPEED_MPS {
        return Err(invalid(
            "own.velocity",
            format!("must be finite and below {MAX_SPEED_MPS} m/s"),
        ));
    }

    let mut seen = std::collections::BTreeSet::new();
    for intr in &intruders {
        if !seen.insert(intr.id.as_str()) {
            return Err(invalid("intruders", format!("duplicate id {}", intr.id)));
        }
        if !intr.position.is_finite() {
            return Err(invalid("intruders", format!("{}: non-finite position", intr.id)));
        }
        let mut prev = f64::NEG_INFINITY;
        for seg in &intr.segments {
            if !(seg.t_start >= 0.0) || seg.t_start <= prev && prev != f64::NEG_INFINITY {
                return Err(invalid(
                    "intruders",
                    format!("{}: segments must have ascending non-negative t_start", intr.id),
                ));
            }
            prev = seg.t_start;
            if !seg.velocity.is_finite() || seg.velocity.magnitude() >= MAX_SPEED_MPS {
                return Err(invalid(
                    "intruders",
                    format!("{}: segment velocity out of bounds", intr.id),
                ));
            }
        }
    }

    let mut validated_faults = Vec::with_capacity(faults.len());
    for (line_no, fault) in faults {
        let (t0, t1) = fault.window;
        if !t0.is_finite() || !t1.is_finite() {
            return Err(parse_err(line_no, "fault is missing a window"));
        }
        if !(t0 <= t1) || t0 < 0.0 || t1 > duration {
            return Err(invalid(
                "faults",
                format!("window [{t0}, {t1}] must satisfy 0 <= t_start <= t_end <= duration"),
            ));
        }
        match fault.kind {
            FaultKind::StageDisable => {
                let stage = fault.param("stage").unwrap_or("");
                if !matches!(stage, "detection" | "tracking" | "assessment" | "maneuver") {
                    return Err(invalid(
                        "faults",
                        format!("StageDisable needs stage = detection|tracking|assessment|maneuver, got {stage:?}"),
                    ));
                }
            }
            FaultKind::SensorFailure => {
                let source = fault.param("source").unwrap_or("both");
                if !matches!(source, "primary" | "secondary" | "both") {
                    return Err(invalid(
                        "faults",
                        format!("SensorFailure source must be primary|secondary|both, got {source:?}"),
                    ));
                }
            }
            FaultKind::ConfigError | FaultKind::PhantomDetection | FaultKind::PhysicalObstruction => {
                for (k, v) in &fault.params {
                    if k != "id" && v.parse::<f64>().is_err() {
                        return Err(invalid(
                            "faults",
                            format!("{:?} parameter {k} must be numeric, got {v:?}", fault.kind),
                        ));
                    }
                }
            }
            _ => {}
        }
        validated_faults.push(fault);
    }

    Ok(Scenario {
        name,
        dt,
        duration,
        sensor,
        region,
        own: OwnInit {
            position: own_position,
            velocity: own_velocity,
        },
        intruders,
        faults: validated_faults,
    })
}
