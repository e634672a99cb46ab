//! Health management: sensor-data integrity, startup and periodic
//! self-tests, dual-source failover, false-alarm mitigation, and the
//! ground-control event link.
//!
//! Ground-link record format (shared by `.gclog` and `.trace` files), one
//! record per line, LF-terminated:
//!
//! ```text
//! <t, exactly 3 decimals>|<EventKind>|<k=v pairs joined by ';', keys ascending>
//! ```
//!
//! Integer payload values are bare, reals carry exactly 3 decimals.

use thiserror::Error;

use crate::assessment::AssessmentParams;
use crate::detection::{
    check_cadence, validate_cooperative_config, SensorInput, SensorSource, ValidationError,
    MAX_AZIMUTH_FOR_DEG, MAX_DETECTION_RANGE_M, MAX_ELEVATION_FOR_DEG, MIN_DETECTION_RANGE_M,
};
use crate::tracking::TrackingConfig;
use crate::types::{EventKind, Position, TraceEvent, Vec3, MAX_SPEED_MPS};

/// Pipeline components tracked by the health registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    PrimarySensor,
    SecondarySensor,
    Detection,
    Tracking,
    Assessment,
    Maneuver,
    GroundLink,
}

impl Component {
    pub fn as_str(&self) -> &'static str {
        match self {
            Component::PrimarySensor => "PrimarySensor",
            Component::SecondarySensor => "SecondarySensor",
            Component::Detection => "Detection",
            Component::Tracking => "Tracking",
            Component::Assessment => "Assessment",
            Component::Maneuver => "Maneuver",
            Component::GroundLink => "GroundLink",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HealthStatus {
    Ok,
    Degraded,
    Failed,
}

/// Last known status of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentHealth {
    pub component: Component,
    pub status: HealthStatus,
    pub last_checked: f64,
}

/// Which sensor currently feeds the pipeline, and how many failovers have
/// happened this run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSelection {
    pub active: SensorSource,
    pub failover_count: u32,
}

impl Default for SourceSelection {
    fn default() -> Self {
        Self {
            active: SensorSource::Primary,
            failover_count: 0,
        }
    }
}

/// Result of the per-tick source arbitration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionResult {
    pub selection: SourceSelection,
    /// False iff both sources are down and the retained one is unusable.
    pub healthy: bool,
}

/// Dual-source arbitration. The primary is preferred initially; after a
/// failover the selection is sticky on the secondary until the secondary
/// itself fails. With both sources down the current selection is retained
/// and flagged unhealthy.
pub fn select_source(
    primary_ok: bool,
    secondary_ok: bool,
    current: SourceSelection,
) -> SelectionResult {
    let (active, switched) = match current.active {
        SensorSource::Primary => {
            if primary_ok {
                (SensorSource::Primary, false)
            } else if secondary_ok {
                (SensorSource::Secondary, true)
            } else {
                (SensorSource::Primary, false)
            }
        }
        SensorSource::Secondary => {
            if secondary_ok {
                (SensorSource::Secondary, false)
            } else if primary_ok {
                (SensorSource::Primary, true)
            } else {
                (SensorSource::Secondary, false)
            }
        }
    };
    SelectionResult {
        selection: SourceSelection {
            active,
            failover_count: current.failover_count + u32::from(switched),
        },
        healthy: primary_ok || secondary_ok,
    }
}

/// One integrity violation found in a sensor frame.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrityViolation {
    #[error("non-finite value in field {field}")]
    NonFiniteField { field: String },
    #[error("out-of-order timestamp {t} after {prev}")]
    OutOfOrderTimestamp { prev: f64, t: f64 },
    #[error("implied own speed {speed:.1} m/s exceeds sanity bound")]
    ExcessiveOwnSpeed { speed: f64 },
    #[error("duplicate measure id {id}")]
    DuplicateMeasure { id: String },
}

/// Integrity verdict for one frame; empty violations means the frame may be
/// used for detection and tracking.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegrityVerdict {
    pub violations: Vec<IntegrityViolation>,
}

impl IntegrityVerdict {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Stateful per-source integrity checker: remembers the previous accepted
/// frame to detect timestamp regressions and implausible own motion.
#[derive(Debug, Clone, Default)]
pub struct IntegrityChecker {
    last_t: Option<f64>,
    last_accepted: Option<(f64, Position)>,
    pub max_speed: Option<f64>,
}

impl IntegrityChecker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, input: &SensorInput) -> IntegrityVerdict {
        let mut violations = Vec::new();

        if !input.t.is_finite() {
            violations.push(IntegrityViolation::NonFiniteField {
                field: "t".to_string(),
            });
        }
        if !input.position.is_finite() {
            violations.push(IntegrityViolation::NonFiniteField {
                field: "position".to_string(),
            });
        }
        if !input.orientation.is_finite() {
            violations.push(IntegrityViolation::NonFiniteField {
                field: "orientation".to_string(),
            });
        }
        for (name, value) in [
            ("detection_range", input.detection_range),
            ("azimuth_for", input.azimuth_for),
            ("elevation_for", input.elevation_for),
        ] {
            if !value.is_finite() {
                violations.push(IntegrityViolation::NonFiniteField {
                    field: name.to_string(),
                });
            }
        }
        for m in &input.measures {
            if !m.relative_offset.is_finite() {
                violations.push(IntegrityViolation::NonFiniteField {
                    field: format!("measure {}", m.measure_id),
                });
            }
        }

        if let Some(prev) = self.last_t {
            if input.t.is_finite() && input.t <= prev {
                violations.push(IntegrityViolation::OutOfOrderTimestamp { prev, t: input.t });
            }
        }

        if let Some((prev_t, prev_pos)) = self.last_accepted {
            let dt = input.t - prev_t;
            if input.position.is_finite() && dt > 0.0 {
                let speed = prev_pos.distance_to(&input.position) / dt;
                if speed > self.max_speed.unwrap_or(MAX_SPEED_MPS) {
                    violations.push(IntegrityViolation::ExcessiveOwnSpeed { speed });
                }
            }
        }

        let mut seen = std::collections::BTreeSet::new();
        for m in &input.measures {
            if !seen.insert(m.measure_id.as_str()) {
                violations.push(IntegrityViolation::DuplicateMeasure {
                    id: m.measure_id.clone(),
                });
            }
        }

        if input.t.is_finite() {
            self.last_t = Some(self.last_t.map_or(input.t, |p| p.max(input.t)));
        }
        if violations.is_empty() {
            self.last_accepted = Some((input.t, input.position));
        }
        IntegrityVerdict { violations }
    }
}

/// Convenience wrapper for callers that do not need cross-frame state.
pub fn integrity_check(input: &SensorInput) -> IntegrityVerdict {
    IntegrityChecker::new().check(input)
}

/// Everything the built-in self-tests need to examine.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestConfig {
    /// Onboard sensor configuration (LLR envelope check).
    pub detection_range: f64,
    pub azimuth_for: f64,
    pub elevation_for: f64,
    /// Cooperative channel configuration (floor check).
    pub coop_range: f64,
    pub coop_azimuth_for: f64,
    pub coop_elevation_for: f64,
    pub update_period: f64,
    pub tracking: TrackingConfig,
    pub assessment: AssessmentParams,
    /// Closing speed of the head-on CPA fixture; the fixture expects
    /// t_cpa = 10 s at -100 m/s from 1000 m.
    pub cpa_fixture_speed: f64,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        Self {
            detection_range: MAX_DETECTION_RANGE_M,
            azimuth_for: MAX_AZIMUTH_FOR_DEG,
            elevation_for: MAX_ELEVATION_FOR_DEG,
            coop_range: crate::detection::MIN_COOPERATIVE_RANGE_M,
            coop_azimuth_for: crate::detection::MIN_COOPERATIVE_AZIMUTH_DEG,
            coop_elevation_for: crate::detection::MIN_COOPERATIVE_ELEVATION_DEG,
            update_period: 0.1,
            tracking: TrackingConfig::default(),
            assessment: AssessmentParams::default(),
            cpa_fixture_speed: -100.0,
        }
    }
}

/// Outcome of one component's built-in check.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestItem {
    pub component: Component,
    pub ok: bool,
    pub detail: String,
}

/// Self-test report; `pass` iff every component checked out.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestReport {
    pub t: f64,
    pub items: Vec<SelfTestItem>,
}

impl SelfTestReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failed_components(&self) -> Vec<Component> {
        self.items
            .iter()
            .filter(|i| !i.ok)
            .map(|i| i.component)
            .collect()
    }
}

fn sensor_envelope_error(cfg: &SelfTestConfig) -> Option<ValidationError> {
    if !(MIN_DETECTION_RANGE_M..=MAX_DETECTION_RANGE_M).contains(&cfg.detection_range) {
        Some(ValidationError::RangeOutOfBounds(cfg.detection_range))
    } else if !(-MAX_AZIMUTH_FOR_DEG..=MAX_AZIMUTH_FOR_DEG).contains(&cfg.azimuth_for) {
        Some(ValidationError::AzimuthOutOfBounds(cfg.azimuth_for))
    } else if !(-MAX_ELEVATION_FOR_DEG..=MAX_ELEVATION_FOR_DEG).contains(&cfg.elevation_for) {
        Some(ValidationError::ElevationOutOfBounds(cfg.elevation_for))
    } else {
        None
    }
}

fn run_checks(cfg: &SelfTestConfig, t: f64) -> SelfTestReport {
    let mut items = Vec::new();

    let coop = validate_cooperative_config(
        cfg.coop_range,
        cfg.coop_azimuth_for,
        cfg.coop_elevation_for,
        cfg.update_period,
    );
    let envelope = sensor_envelope_error(cfg);
    let detection_ok = coop.pass() && envelope.is_none();
    let detail = if detection_ok {
        "ok".to_string()
    } else if let Some(e) = envelope {
        e.to_string()
    } else {
        format!("cooperative config: {}", coop.failures().join(","))
    };
    items.push(SelfTestItem {
        component: Component::Detection,
        ok: detection_ok,
        detail,
    });

    let tracking = cfg.tracking.validate();
    items.push(SelfTestItem {
        component: Component::Tracking,
        ok: tracking.is_ok(),
        detail: tracking.err().unwrap_or_else(|| "ok".to_string()),
    });

    // Head-on fixture with a known closed-form answer.
    let fixture = crate::assessment::cpa(
        Vec3::new(1000.0, 0.0, 0.0),
        Vec3::new(cfg.cpa_fixture_speed, 0.0, 0.0),
    );
    let assessment_ok = matches!(
        &fixture,
        Ok(r) if (r.t_cpa - 10.0).abs() < 1e-9 && r.miss_distance < 1e-9 && r.closing
    );
    items.push(SelfTestItem {
        component: Component::Assessment,
        ok: assessment_ok,
        detail: if assessment_ok {
            "ok".to_string()
        } else {
            format!("cpa fixture mismatch: {fixture:?}")
        },
    });

    let maneuver_ok = crate::maneuver::closure_probe();
    items.push(SelfTestItem {
        component: Component::Maneuver,
        ok: maneuver_ok,
        detail: if maneuver_ok {
            "ok".to_string()
        } else {
            "state machine closure probe failed".to_string()
        },
    });

    SelfTestReport { t, items }
}

/// Runs the startup self-test. Must be called before the first tick.
pub fn startup_self_test(cfg: &SelfTestConfig) -> SelfTestReport {
    run_checks(cfg, 0.0)
}

/// Periodic self-test scheduler state.
#[derive(Debug, Clone, Default)]
pub struct PeriodicSchedule {
    last_fired_multiple: u64,
}

impl PeriodicSchedule {
    /// Fires when `t` reaches or crosses a positive multiple of `period`.
    /// At most one report per multiple.
    pub fn due(&mut self, t: f64, period: f64) -> bool {
        debug_assert!(period > 0.0);
        let k = ((t + 1e-9) / period).floor() as u64;
        if k > self.last_fired_multiple {
            self.last_fired_multiple = k;
            true
        } else {
            false
        }
    }
}

/// Runs the periodic self-test if one is due at `t`. The checks are the
/// startup set plus a cadence check over the sensor arrival timestamps of
/// the last window.
pub fn periodic_self_test(
    cfg: &SelfTestConfig,
    schedule: &mut PeriodicSchedule,
    t: f64,
    period: f64,
    window_arrivals: &[f64],
) -> Option<SelfTestReport> {
    if !schedule.due(t, period) {
        return None;
    }
    let mut report = run_checks(cfg, t);
    let (cadence_ok, detail) = if window_arrivals.is_empty() {
        (false, "no sensor frames in window".to_string())
    } else {
        match check_cadence(window_arrivals) {
            Ok(r) if r.pass() => (true, "ok".to_string()),
            Ok(r) => (
                false,
                format!(
                    "cadence: {} gap(s) above {} s, worst {:.3} s",
                    r.violations.len(),
                    crate::detection::MAX_UPDATE_PERIOD_S,
                    r.violations
                        .iter()
                        .map(|(_, g)| *g)
                        .fold(0.0f64, f64::max)
                ),
            ),
            Err(e) => (false, e.to_string()),
        }
    };
    report.items.push(SelfTestItem {
        component: Component::Detection,
        ok: cadence_ok,
        detail: if cadence_ok {
            "cadence ok".to_string()
        } else {
            detail
        },
    });
    Some(report)
}

/// Window of last `k` per-track detection flags confirms a track only when
/// all `k` most recent entries are detections.
pub fn persistence_filter(history: &[bool], k: usize) -> bool {
    assert!(k >= 1, "persistence window must be at least 1");
    history.len() >= k && history[history.len() - k..].iter().all(|&b| b)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SinkError {
    #[error("ground link sink unavailable")]
    SinkUnavailable,
}

/// Destination for ground-link records. Implementations must append the
/// given line followed by a single LF.
pub trait GroundLinkSink {
    fn append(&mut self, line: &str) -> Result<(), SinkError>;
}

impl GroundLinkSink for Vec<String> {
    fn append(&mut self, line: &str) -> Result<(), SinkError> {
        self.push(line.to_string());
        Ok(())
    }
}

/// Serializes a trace event into the bit-exact ground-link record format.
pub fn serialize_event(ev: &TraceEvent) -> String {
    let payload: Vec<String> = ev
        .payload
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("{:.3}|{}|{}", ev.t, ev.kind.as_str(), payload.join(";"))
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceParseError {
    #[error("line {line}: expected <t>|<kind>|<payload>")]
    MissingField { line: usize },
    #[error("line {line}: bad timestamp {value:?}")]
    BadTime { line: usize, value: String },
    #[error("line {line}: unknown event kind {value:?}")]
    UnknownKind { line: usize, value: String },
    #[error("line {line}: bad payload pair {value:?}")]
    BadPair { line: usize, value: String },
}

/// Parses one ground-link record. `line_no` is used for error reporting.
pub fn parse_event(line: &str, line_no: usize) -> Result<TraceEvent, TraceParseError> {
    let mut parts = line.splitn(3, '|');
    let (Some(t_raw), Some(kind_raw), Some(payload_raw)) =
        (parts.next(), parts.next(), parts.next())
    else {
        return Err(TraceParseError::MissingField { line: line_no });
    };
    let t: f64 = t_raw.parse().map_err(|_| TraceParseError::BadTime {
        line: line_no,
        value: t_raw.to_string(),
    })?;
    let kind = EventKind::parse(kind_raw).ok_or_else(|| TraceParseError::UnknownKind {
        line: line_no,
        value: kind_raw.to_string(),
    })?;
    let mut event = TraceEvent::new(t, kind);
    if !payload_raw.is_empty() {
        for pair in payload_raw.split(';') {
            let (k, v) = pair.split_once('=').ok_or_else(|| TraceParseError::BadPair {
                line: line_no,
                value: pair.to_string(),
            })?;
            event.payload.insert(k.to_string(), v.to_string());
        }
    }
    Ok(event)
}

/// Parses a whole trace file (one record per line, `#` comments allowed).
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceParseError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        events.push(parse_event(line, i + 1)?);
    }
    Ok(events)
}

/// Transmits one event over the ground link: appends the serialized record
/// to the sink and returns the line. A sink failure degrades the link but
/// must not stop the pipeline.
pub fn emit_ground_event(
    ev: &TraceEvent,
    sink: &mut dyn GroundLinkSink,
) -> Result<String, SinkError> {
    let line = serialize_event(ev);
    sink.append(&line)?;
    Ok(line)
}
