//! The deterministic fixed-step run loop.
//!
//! Each tick executes health, detection, tracking, assessment and maneuver
//! in that order over frames built from ground truth (with any active
//! faults applied), then applies the commanded maneuver kinematically to
//! the own ship. Identical inputs yield byte-identical traces.

use std::collections::{BTreeMap, BTreeSet};

use crate::assessment::{evaluate_with_cpa, prioritize, ThreatAssessment};
use crate::detection::{
    detect, handle_sensor_status, validate_sensor_input, SensorGate, SensorInput, SensorMeasure,
    SensorSource, SurveillanceVolume,
};
use crate::health::{
    emit_ground_event, periodic_self_test, select_source, serialize_event, startup_self_test,
    GroundLinkSink, IntegrityChecker, PeriodicSchedule, SelfTestConfig, SelfTestReport,
    SourceSelection,
};
use crate::maneuver::{
    determine, reassess_update, step_command, ActiveManeuverState, Command, CommandKind, OwnState,
};
use crate::monitors::{ThreatSnapshot, TickSnapshot};
use crate::tracking::{associate_and_update, coast_and_drop, TrackSet, TrackingConfig};
use crate::types::{
    payload_real, to_body_spherical, EventKind, Orientation, Position, TraceEvent, Vec3, Velocity,
};

use super::scenario::{FaultInjection, FaultKind, Scenario};
use crate::assessment::AssessmentParams;

/// Pipeline tuning shared by every scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tracking: TrackingConfig,
    pub assessment: AssessmentParams,
    /// Period of the periodic self-test, seconds.
    pub self_test_period: f64,
    /// Horizontal turn rate applied while a maneuver is active, deg/s.
    pub turn_rate_dps: f64,
    /// Climb/descend rate applied while a maneuver is active, m/s.
    pub vertical_rate_mps: f64,
    /// When false the maneuver stage never runs (used by the safety-effect
    /// oracle to measure the uncontrolled baseline).
    pub maneuver_stage_enabled: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tracking: TrackingConfig::default(),
            assessment: AssessmentParams::default(),
            self_test_period: 10.0,
            turn_rate_dps: 3.0,
            vertical_rate_mps: 5.0,
            maneuver_stage_enabled: true,
        }
    }
}

impl PipelineConfig {
    /// Applies one `key = value` override. Unknown keys are an error.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || -> Result<f64, String> {
            value
                .parse()
                .map_err(|_| format!("{key}: expected a number, got {value:?}"))
        };
        match key {
            "confirm_m" => {
                self.tracking.confirm_m = value
                    .parse()
                    .map_err(|_| format!("confirm_m: expected an integer, got {value:?}"))?
            }
            "drop_after" => self.tracking.drop_after = num()?,
            "gate_radius" => self.tracking.gate_radius = num()?,
            "alpha" => self.tracking.alpha = num()?,
            "beta" => self.tracking.beta = num()?,
            "update_rate_min" => self.tracking.update_rate_min = num()?,
            "pos_accuracy" => self.tracking.pos_accuracy_y = num()?,
            "vel_accuracy" => self.tracking.vel_accuracy_z = num()?,
            "protected_radius" => self.assessment.protected_radius = num()?,
            "horizon" => self.assessment.horizon = num()?,
            "t_high" => self.assessment.t_high = num()?,
            "self_test_period" => self.self_test_period = num()?,
            "turn_rate" => self.turn_rate_dps = num()?,
            "vertical_rate" => self.vertical_rate_mps = num()?,
            _ => return Err(format!("unknown config key {key}")),
        }
        Ok(())
    }

    /// Applies a `key = value` overrides file (`#` comments allowed).
    pub fn apply_overrides_text(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            self.apply_override(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        self.tracking.validate()
    }
}

/// Own-ship state at the start of a tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwnTickState {
    pub t: f64,
    pub position: Position,
    pub velocity: Velocity,
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Vec<TraceEvent>,
    pub snapshots: Vec<TickSnapshot>,
    pub gclog_lines: Vec<String>,
    pub csv: String,
    pub commands: Vec<Command>,
    /// Measure ids ever associated to each track.
    pub track_sources: BTreeMap<u64, BTreeSet<String>>,
    /// Own state per tick, plus one final entry after the last move.
    pub own_states: Vec<OwnTickState>,
    pub final_tracks: TrackSet,
    pub startup_report: SelfTestReport,
}

impl RunOutput {
    /// Serializes the full trace in the ground-link record grammar.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for ev in &self.trace {
            out.push_str(&serialize_event(ev));
            out.push('\n');
        }
        out
    }

    pub fn gclog_text(&self) -> String {
        let mut out = String::new();
        for line in &self.gclog_lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

/// Event kinds transmitted over the ground link (status and alerts).
const GROUND_LINKED: [EventKind; 6] = [
    EventKind::SensorAlert,
    EventKind::SelfTestResult,
    EventKind::FailoverActivated,
    EventKind::ThreatIdentified,
    EventKind::CommandIssued,
    EventKind::ManeuverTerminated,
];

struct FrameBuild {
    input: SensorInput,
    delivered: bool,
}

fn active<'a>(faults: &'a [FaultInjection], t: f64, kind: FaultKind) -> Vec<&'a FaultInjection> {
    faults
        .iter()
        .filter(|f| f.kind == kind && f.active_at(t))
        .collect()
}

fn stage_disabled(faults: &[FaultInjection], t: f64, stage: &str) -> bool {
    active(faults, t, FaultKind::StageDisable)
        .iter()
        .any(|f| f.param("stage") == Some(stage))
}

fn config_value(faults: &[FaultInjection], t: f64, key: &str, base: f64) -> f64 {
    for fault in active(faults, t, FaultKind::ConfigError) {
        if let Some(v) = fault.param(key) {
            if let Ok(v) = v.parse() {
                return v;
            }
        }
    }
    base
}

fn build_frame(
    scenario: &Scenario,
    t: f64,
    own_pos: Position,
    own_orient: Orientation,
    source: SensorSource,
) -> FrameBuild {
    let faults = &scenario.faults;
    let delivered = active(faults, t, FaultKind::CommDelay).is_empty();

    let status = !active(faults, t, FaultKind::SensorFailure).iter().any(|f| {
        matches!(
            (f.param("source").unwrap_or("both"), source),
            ("both", _) | ("primary", SensorSource::Primary) | ("secondary", SensorSource::Secondary)
        )
    });

    let mut measures: Vec<SensorMeasure> = Vec::new();
    for intr in &scenario.intruders {
        let offset = own_pos.vector_to(&intr.position_at(t));
        measures.push(SensorMeasure {
            relative_offset: offset,
            measure_id: intr.id.clone(),
        });
    }

    for fault in active(faults, t, FaultKind::SoftwareErrorDrop) {
        match fault.param("intruder") {
            Some(id) => measures.retain(|m| m.measure_id != id),
            None => measures.clear(),
        }
    }

    for fault in active(faults, t, FaultKind::PhysicalObstruction) {
        let min = fault
            .param("azimuth_min")
            .and_then(|v| v.parse().ok())
            .unwrap_or(-180.0);
        let max = fault
            .param("azimuth_max")
            .and_then(|v| v.parse().ok())
            .unwrap_or(180.0);
        measures.retain(|m| {
            let target = own_pos.offset_by(m.relative_offset);
            match to_body_spherical(&own_pos, &own_orient, &target) {
                Ok(sph) => sph.azimuth < min || sph.azimuth > max,
                Err(_) => false,
            }
        });
    }

    for (n, fault) in active(faults, t, FaultKind::PhantomDetection)
        .iter()
        .enumerate()
    {
        let coord = |key: &str, default: f64| {
            fault.param(key).and_then(|v| v.parse().ok()).unwrap_or(default)
        };
        let id = fault
            .param("id")
            .map(str::to_string)
            .unwrap_or_else(|| format!("phantom{n}"));
        measures.push(SensorMeasure {
            relative_offset: Vec3::new(
                coord("dx", 100.0),
                coord("dy", 0.0),
                coord("dz", 0.0),
            ),
            measure_id: id,
        });
    }

    let input = SensorInput {
        sensor_status: status,
        detection_range: config_value(faults, t, "detection_range", scenario.sensor.detection_range),
        azimuth_for: config_value(faults, t, "azimuth_for", scenario.sensor.azimuth_for),
        elevation_for: config_value(faults, t, "elevation_for", scenario.sensor.elevation_for),
        orientation: own_orient,
        position: own_pos,
        measures,
        t,
        source_id: source,
    };
    FrameBuild { input, delivered }
}

fn self_test_config(scenario: &Scenario, cfg: &PipelineConfig, t: f64) -> SelfTestConfig {
    let faults = &scenario.faults;
    SelfTestConfig {
        detection_range: config_value(faults, t, "detection_range", scenario.sensor.detection_range),
        azimuth_for: config_value(faults, t, "azimuth_for", scenario.sensor.azimuth_for),
        elevation_for: config_value(faults, t, "elevation_for", scenario.sensor.elevation_for),
        coop_range: config_value(faults, t, "coop_range", scenario.sensor.coop_range),
        coop_azimuth_for: config_value(
            faults,
            t,
            "coop_azimuth_for",
            scenario.sensor.coop_azimuth_for,
        ),
        coop_elevation_for: config_value(
            faults,
            t,
            "coop_elevation_for",
            scenario.sensor.coop_elevation_for,
        ),
        update_period: config_value(faults, t, "update_period", scenario.sensor.update_period),
        tracking: cfg.tracking.clone(),
        assessment: cfg.assessment,
        cpa_fixture_speed: config_value(faults, t, "cpa_fixture_speed", -100.0),
    }
}

fn self_test_event(report: &SelfTestReport, kind: &str) -> TraceEvent {
    let mut ev = TraceEvent::new(report.t, EventKind::SelfTestResult)
        .with("kind", kind)
        .with_int("pass", i64::from(report.pass()));
    if !report.pass() {
        let failed: Vec<&str> = report
            .failed_components()
            .iter()
            .map(|c| c.as_str())
            .collect();
        ev = ev.with("failed", failed.join(","));
    }
    ev
}

/// Runs a scenario against the pipeline. Deterministic: no randomness, no
/// wall-clock time, stable iteration orders only.
pub fn run(scenario: &Scenario, cfg: &PipelineConfig) -> RunOutput {
    let dt = scenario.dt;
    let ticks = scenario.ticks();
    let faults = &scenario.faults;

    // Own-ship kinematic state.
    let mut own_pos = scenario.own.position;
    let horizontal_speed = (scenario.own.velocity.vx.powi(2)
        + scenario.own.velocity.vy.powi(2))
    .sqrt();
    let mut heading = if horizontal_speed > 0.0 {
        scenario
            .own
            .velocity
            .vx
            .atan2(scenario.own.velocity.vy)
            .to_degrees()
            .rem_euclid(360.0)
    } else {
        0.0
    };
    let base_vz = scenario.own.velocity.vz;
    let mut current_vz = base_vz;

    // Pipeline state.
    let mut tracks = TrackSet::new();
    let mut maneuver_state = ActiveManeuverState::new();
    let mut selection = SourceSelection::default();
    let mut integrity_primary = IntegrityChecker::new();
    let mut integrity_secondary = IntegrityChecker::new();
    let mut schedule = PeriodicSchedule::default();
    let mut arrivals: Vec<f64> = Vec::new();

    // Outputs.
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut snapshots: Vec<TickSnapshot> = Vec::new();
    let mut gclog: Vec<String> = Vec::new();
    let mut commands_out: Vec<Command> = Vec::new();
    let mut track_sources: BTreeMap<u64, BTreeSet<String>> = BTreeMap::new();
    let mut own_states: Vec<OwnTickState> = Vec::new();
    let mut csv = String::from("t,own_x,own_y,own_z");
    for intr in &scenario.intruders {
        csv.push_str(&format!(",dist_{}", intr.id));
    }
    csv.push_str(",active_maneuver\n");

    let startup_report = startup_self_test(&self_test_config(scenario, cfg, 0.0));
    trace.push(self_test_event(&startup_report, "startup"));

    for tick in 0..ticks {
        let t = tick as f64 * dt;
        let mut tick_events: Vec<TraceEvent> = Vec::new();
        let own_orient = Orientation::level(heading);
        let own_vel = Velocity::new(
            horizontal_speed * heading.to_radians().sin(),
            horizontal_speed * heading.to_radians().cos(),
            current_vz,
        );
        own_states.push(OwnTickState {
            t,
            position: own_pos,
            velocity: own_vel,
        });

        // Health: periodic self-test over the last window's arrivals.
        let window_start = t - cfg.self_test_period;
        let window: Vec<f64> = arrivals
            .iter()
            .copied()
            .filter(|&a| a > window_start && a <= t)
            .collect();
        if tick > 0 {
            if let Some(report) = periodic_self_test(
                &self_test_config(scenario, cfg, t),
                &mut schedule,
                t,
                cfg.self_test_period,
                &window,
            ) {
                tick_events.push(self_test_event(&report, "periodic"));
            }
        }

        // Frame building and dual-source arbitration.
        let primary = build_frame(scenario, t, own_pos, own_orient, SensorSource::Primary);
        let secondary = build_frame(scenario, t, own_pos, own_orient, SensorSource::Secondary);
        let delivered = primary.delivered;

        let mut selected_frame: Option<(SensorInput, bool)> = None;
        if delivered {
            arrivals.push(t);
            let primary_integrity = integrity_primary.check(&primary.input).pass();
            let secondary_integrity = integrity_secondary.check(&secondary.input).pass();
            let primary_ok = primary.input.sensor_status && primary_integrity;
            let secondary_ok = secondary.input.sensor_status && secondary_integrity;
            let result = select_source(primary_ok, secondary_ok, selection);
            if result.selection.active != selection.active {
                tick_events.push(
                    TraceEvent::new(t, EventKind::FailoverActivated)
                        .with("from", selection.active.as_str())
                        .with("to", result.selection.active.as_str())
                        .with_int("count", i64::from(result.selection.failover_count)),
                );
            }
            selection = result.selection;
            let (frame, integrity_ok) = match selection.active {
                SensorSource::Primary => (primary.input, primary_integrity),
                SensorSource::Secondary => (secondary.input, secondary_integrity),
            };
            tick_events.push(
                TraceEvent::new(t, EventKind::SensorInputReceived)
                    .with("source", frame.source_id.as_str())
                    .with_int("status", i64::from(frame.sensor_status))
                    .with_int("measures", frame.measures.len() as i64),
            );
            selected_frame = Some((frame, integrity_ok));
        }

        // Detection.
        let mut detections = crate::detection::DetectionOutput::empty(own_pos, t);
        if let Some((frame, integrity_ok)) = selected_frame {
            if stage_disabled(faults, t, "detection") {
                // Stage skipped by fault injection.
            } else {
                match handle_sensor_status(frame) {
                    SensorGate::AlertRaised => {
                        tick_events.push(
                            TraceEvent::new(t, EventKind::SensorAlert)
                                .with("reason", "status")
                                .with("source", selection.active.as_str()),
                        );
                    }
                    SensorGate::Proceed(_) if !integrity_ok => {
                        // Integrity-rejected frames never reach detection.
                        tick_events.push(
                            TraceEvent::new(t, EventKind::SensorAlert)
                                .with("reason", "integrity")
                                .with("source", selection.active.as_str()),
                        );
                    }
                    SensorGate::Proceed(frame) => match validate_sensor_input(frame) {
                        Err(e) => {
                            tick_events.push(
                                TraceEvent::new(t, EventKind::SensorAlert)
                                    .with("reason", "validation")
                                    .with("detail", validation_slug(&e)),
                            );
                        }
                        Ok(validated) => {
                            let volume = SurveillanceVolume::from_half_widths(
                                validated.inner().detection_range,
                                validated.inner().azimuth_for,
                                validated.inner().elevation_for,
                            );
                            detections = detect(&validated, &scenario.region, &volume);
                            if detections.traffic_detected {
                                let ids: Vec<&str> = detections
                                    .traffic
                                    .iter()
                                    .map(|(id, _)| id.as_str())
                                    .collect();
                                tick_events.push(
                                    TraceEvent::new(t, EventKind::TrafficDetected)
                                        .with_int("count", detections.traffic.len() as i64)
                                        .with("measures", ids.join(",")),
                                );
                            }
                        }
                    },
                }
            }
        }

        // Tracking.
        if stage_disabled(faults, t, "tracking") {
            tracks = TrackSet::new();
        } else {
            let outcome = associate_and_update(tracks, &detections, t, &cfg.tracking);
            tracks = outcome.set;
            for assoc in &outcome.associations {
                track_sources
                    .entry(assoc.track_id)
                    .or_default()
                    .insert(assoc.measure_id.clone());
            }
            tracks = coast_and_drop(tracks, t, &cfg.tracking);
        }

        // Assessment.
        let mut assessments: Vec<ThreatAssessment> = Vec::new();
        if !stage_disabled(faults, t, "assessment") {
            for track in tracks.confirmed() {
                let (assessment, geometry) =
                    evaluate_with_cpa(&own_pos, &own_vel, track, &cfg.assessment);
                tick_events.push(
                    TraceEvent::new(t, EventKind::CollisionEvaluated)
                        .with_int("track_id", track.track_id as i64)
                        .with_int("threat", i64::from(assessment.is_collision_threat))
                        .with("miss", payload_real(geometry.miss_distance))
                        .with("t_cpa", payload_real(geometry.t_cpa)),
                );
                assessments.push(assessment);
            }
            for a in assessments.iter().filter(|a| a.is_collision_threat) {
                tick_events.push(
                    TraceEvent::new(t, EventKind::ThreatIdentified)
                        .with_int("track_id", a.track_id as i64)
                        .with("level", a.threat_level.as_str())
                        .with("ttc", payload_real(a.time_to_collision)),
                );
            }
        }
        let prioritized = prioritize(&assessments);

        // Maneuver determination and command.
        let maneuver_on =
            cfg.maneuver_stage_enabled && !stage_disabled(faults, t, "maneuver");
        if maneuver_on {
            let own_state = OwnState {
                position: own_pos,
                velocity: own_vel,
                orientation: own_orient,
            };
            let plan = determine(&prioritized, &own_state, &tracks);
            if let Some(selected) = plan.selected() {
                tick_events.push(
                    TraceEvent::new(t, EventKind::ManeuverDetermined)
                        .with_int("candidates", plan.candidates.len() as i64)
                        .with_int("track_id", selected.track_id as i64)
                        .with("kind", selected.kind.as_str()),
                );
            }
            reassess_update(&mut maneuver_state, &plan, &assessments, t);
            let commands = step_command(&mut maneuver_state, &plan, &assessments, t)
                .expect("pipeline stage ordering is fixed");
            for command in commands {
                tick_events.push(command_event(&command));
                commands_out.push(command);
            }
        }

        // Ground link: status and alerts go out within the same tick.
        let mut sent = 0i64;
        for ev in &tick_events {
            if GROUND_LINKED.contains(&ev.kind) {
                let sink: &mut dyn GroundLinkSink = &mut gclog;
                if emit_ground_event(ev, sink).is_ok() {
                    sent += 1;
                }
            }
        }
        if sent > 0 {
            tick_events.push(TraceEvent::new(t, EventKind::GroundLinkSent).with_int("records", sent));
        }
        trace.append(&mut tick_events);

        // End-of-tick snapshot for the threat-handling monitor.
        snapshots.push(TickSnapshot {
            t,
            threats: prioritized
                .iter()
                .map(|a| ThreatSnapshot {
                    track_id: a.track_id,
                    level: a.threat_level,
                    time_to_collision: a.time_to_collision,
                })
                .collect(),
            active_track: maneuver_state.active.as_ref().map(|m| m.threat_track_id),
        });

        // Per-tick CSV row.
        csv.push_str(&payload_real(t));
        for v in [own_pos.x, own_pos.y, own_pos.z] {
            csv.push(',');
            csv.push_str(&payload_real(v));
        }
        for intr in &scenario.intruders {
            csv.push(',');
            csv.push_str(&payload_real(own_pos.distance_to(&intr.position_at(t))));
        }
        csv.push(',');
        csv.push_str(
            maneuver_state
                .active
                .as_ref()
                .map(|m| m.kind.as_str())
                .unwrap_or("-"),
        );
        csv.push('\n');

        // Kinematics: commanded maneuvers execute immediately.
        let (turn_sign, vertical_sign, maneuvering) = match &maneuver_state.active {
            Some(m) => (m.kind.turn_sign(), m.kind.vertical_sign(), true),
            None => (0.0, 0.0, false),
        };
        current_vz = if maneuvering {
            vertical_sign * cfg.vertical_rate_mps
        } else {
            base_vz
        };
        let applied = Velocity::new(
            horizontal_speed * heading.to_radians().sin(),
            horizontal_speed * heading.to_radians().cos(),
            current_vz,
        );
        own_pos = own_pos.offset_by(applied.as_vec3().scaled(dt));
        if maneuvering {
            heading = normalize_heading(heading + turn_sign * cfg.turn_rate_dps * dt);
        }
    }

    own_states.push(OwnTickState {
        t: ticks as f64 * dt,
        position: own_pos,
        velocity: Velocity::new(
            horizontal_speed * heading.to_radians().sin(),
            horizontal_speed * heading.to_radians().cos(),
            current_vz,
        ),
    });

    RunOutput {
        trace,
        snapshots,
        gclog_lines: gclog,
        csv,
        commands: commands_out,
        track_sources,
        own_states,
        final_tracks: tracks,
        startup_report,
    }
}

fn normalize_heading(h: f64) -> f64 {
    h.rem_euclid(360.0)
}

fn validation_slug(e: &crate::detection::ValidationError) -> String {
    use crate::detection::ValidationError::*;
    match e {
        RangeOutOfBounds(v) => format!("detection_range:{}", payload_real(*v)),
        AzimuthOutOfBounds(v) => format!("azimuth_for:{}", payload_real(*v)),
        ElevationOutOfBounds(v) => format!("elevation_for:{}", payload_real(*v)),
    }
}

fn command_event(command: &Command) -> TraceEvent {
    let m = &command.maneuver;
    match command.kind {
        CommandKind::Initiate | CommandKind::Continue => {
            TraceEvent::new(command.t, EventKind::CommandIssued)
                .with("cmd", command.kind.as_str())
                .with_int("maneuver_id", m.maneuver_id as i64)
                .with("kind", m.kind.as_str())
                .with_int("track_id", m.threat_track_id as i64)
                .with("ttc", payload_real(m.priority_ttc))
        }
        CommandKind::Terminate => TraceEvent::new(command.t, EventKind::ManeuverTerminated)
            .with_int("maneuver_id", m.maneuver_id as i64)
            .with_int("track_id", m.threat_track_id as i64),
    }
}

/// Double-checks the fixed per-tick event ordering over a produced trace.
/// Returns the first out-of-order pair, if any.
pub fn event_order_violation(trace: &[TraceEvent]) -> Option<(EventKind, EventKind)> {
    fn rank(kind: EventKind) -> Option<u8> {
        Some(match kind {
            EventKind::SensorInputReceived => 0,
            EventKind::SensorAlert => 1,
            EventKind::TrafficDetected => 2,
            EventKind::CollisionEvaluated => 3,
            EventKind::ThreatIdentified => 4,
            EventKind::ManeuverDetermined => 5,
            EventKind::CommandIssued | EventKind::ManeuverTerminated => 6,
            EventKind::GroundLinkSent => 7,
            _ => return None,
        })
    }
    let mut prev_t = f64::NEG_INFINITY;
    let mut prev: Option<(u8, EventKind)> = None;
    for ev in trace {
        if ev.t > prev_t {
            prev_t = ev.t;
            prev = None;
        }
        if let Some(r) = rank(ev.kind) {
            if let Some((pr, pk)) = prev {
                if r < pr {
                    return Some((pk, ev.kind));
                }
            }
            prev = Some((r, ev.kind));
        }
    }
    None
}
