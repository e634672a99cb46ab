//! Runtime verification of the formal trace properties.
//!
//! Three liveness claims are checked over finite event traces with a
//! bounded "eventually" (a tick horizon), plus the per-tick threat-handling
//! assertion: every collision threat is either targeted by the active
//! maneuver or dominated by another threat with strictly greater level and
//! strictly smaller time to collision.

use thiserror::Error;

use crate::assessment::ThreatLevel;
use crate::types::{EventKind, TraceEvent};

/// The four monitored properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyId {
    C1,
    C2,
    C3,
    ThreatHandling,
}

impl PropertyId {
    pub fn as_str(&self) -> &'static str {
        match self {
            PropertyId::C1 => "C1",
            PropertyId::C2 => "C2",
            PropertyId::C3 => "C3",
            PropertyId::ThreatHandling => "ThreatHandling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorStatus {
    Satisfied,
    Violated,
    Vacuous,
}

impl MonitorStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MonitorStatus::Satisfied => "Satisfied",
            MonitorStatus::Violated => "Violated",
            MonitorStatus::Vacuous => "Vacuous",
        }
    }
}

/// First point of violation, when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub t: f64,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub property: PropertyId,
    pub status: MonitorStatus,
    pub witness: Option<Witness>,
}

impl MonitorVerdict {
    fn satisfied(property: PropertyId) -> Self {
        Self {
            property,
            status: MonitorStatus::Satisfied,
            witness: None,
        }
    }

    fn vacuous(property: PropertyId) -> Self {
        Self {
            property,
            status: MonitorStatus::Vacuous,
            witness: None,
        }
    }

    fn violated(property: PropertyId, t: f64, description: String) -> Self {
        Self {
            property,
            status: MonitorStatus::Violated,
            witness: Some(Witness { t, description }),
        }
    }
}

/// Monitor tuning. `horizon_h` bounds the temporal "eventually" in ticks;
/// `raw_c2` switches the traffic-to-command claim to its unguarded form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    pub horizon_h: usize,
    pub raw_c2: bool,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            horizon_h: 20,
            raw_c2: false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MonitorError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// A trace indexed by tick: each distinct timestamp is one tick.
struct TickedTrace<'a> {
    tick_times: Vec<f64>,
    /// (tick index, event) in trace order.
    events: Vec<(usize, &'a TraceEvent)>,
}

impl<'a> TickedTrace<'a> {
    fn build(trace: &'a [TraceEvent]) -> Result<Self, MonitorError> {
        let mut tick_times: Vec<f64> = Vec::new();
        let mut events = Vec::with_capacity(trace.len());
        for ev in trace {
            if !ev.t.is_finite() {
                return Err(MonitorError::MalformedTrace(format!(
                    "non-finite event time {}",
                    ev.t
                )));
            }
            match tick_times.last() {
                Some(&last) if ev.t < last => {
                    return Err(MonitorError::MalformedTrace(format!(
                        "event time {} decreases after {}",
                        ev.t, last
                    )));
                }
                Some(&last) if ev.t == last => {}
                _ => tick_times.push(ev.t),
            }
            events.push((tick_times.len() - 1, ev));
        }
        Ok(Self { tick_times, events })
    }

    fn ticks_of(&self, kind: EventKind) -> Vec<usize> {
        self.events
            .iter()
            .filter(|(_, ev)| ev.kind == kind)
            .map(|(tick, _)| *tick)
            .collect()
    }

    fn any_in_window(sorted_ticks: &[usize], from: usize, to: usize) -> bool {
        let idx = sorted_ticks.partition_point(|&t| t < from);
        sorted_ticks.get(idx).is_some_and(|&t| t <= to)
    }
}

/// Claim: every identified collision threat is followed by a maneuver
/// command within the horizon.
pub fn check_c1(trace: &[TraceEvent], cfg: &MonitorConfig) -> Result<MonitorVerdict, MonitorError> {
    let ticked = TickedTrace::build(trace)?;
    let commands = ticked.ticks_of(EventKind::CommandIssued);
    let mut saw_threat = false;
    for (tick, ev) in &ticked.events {
        if ev.kind != EventKind::ThreatIdentified {
            continue;
        }
        saw_threat = true;
        if !TickedTrace::any_in_window(&commands, *tick, tick + cfg.horizon_h) {
            return Ok(MonitorVerdict::violated(
                PropertyId::C1,
                ticked.tick_times[*tick],
                format!(
                    "threat on track {} not followed by a command within {} ticks",
                    ev.get("track_id").unwrap_or("?"),
                    cfg.horizon_h
                ),
            ));
        }
    }
    Ok(if saw_threat {
        MonitorVerdict::satisfied(PropertyId::C1)
    } else {
        MonitorVerdict::vacuous(PropertyId::C1)
    })
}

/// Claim: traffic detection leads to a maneuver command. In the guarded
/// reading (the default) the obligation only arises when a collision threat
/// materializes within the horizon of the detection; the raw reading
/// obligates every detection.
pub fn check_c2(trace: &[TraceEvent], cfg: &MonitorConfig) -> Result<MonitorVerdict, MonitorError> {
    let ticked = TickedTrace::build(trace)?;
    let commands = ticked.ticks_of(EventKind::CommandIssued);
    let threats = ticked.ticks_of(EventKind::ThreatIdentified);
    let mut saw_detection = false;
    for (tick, ev) in &ticked.events {
        if ev.kind != EventKind::TrafficDetected {
            continue;
        }
        saw_detection = true;
        let window_end = tick + cfg.horizon_h;
        let obligated =
            cfg.raw_c2 || TickedTrace::any_in_window(&threats, *tick, window_end);
        if obligated && !TickedTrace::any_in_window(&commands, *tick, window_end) {
            return Ok(MonitorVerdict::violated(
                PropertyId::C2,
                ticked.tick_times[*tick],
                format!(
                    "traffic detected but no command within {} ticks",
                    cfg.horizon_h
                ),
            ));
        }
    }
    Ok(if saw_detection {
        MonitorVerdict::satisfied(PropertyId::C2)
    } else {
        MonitorVerdict::vacuous(PropertyId::C2)
    })
}

/// Claim: collision evaluation follows traffic detection within the horizon.
pub fn check_c3(trace: &[TraceEvent], cfg: &MonitorConfig) -> Result<MonitorVerdict, MonitorError> {
    let ticked = TickedTrace::build(trace)?;
    let evaluations = ticked.ticks_of(EventKind::CollisionEvaluated);
    let mut saw_detection = false;
    for (tick, ev) in &ticked.events {
        if ev.kind != EventKind::TrafficDetected {
            continue;
        }
        saw_detection = true;
        if !TickedTrace::any_in_window(&evaluations, *tick, tick + cfg.horizon_h) {
            return Ok(MonitorVerdict::violated(
                PropertyId::C3,
                ticked.tick_times[*tick],
                format!(
                    "traffic detected but no collision evaluation within {} ticks",
                    cfg.horizon_h
                ),
            ));
        }
    }
    Ok(if saw_detection {
        MonitorVerdict::satisfied(PropertyId::C3)
    } else {
        MonitorVerdict::vacuous(PropertyId::C3)
    })
}

/// One collision threat as seen at the end of a tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatSnapshot {
    pub track_id: u64,
    pub level: ThreatLevel,
    pub time_to_collision: f64,
}

/// End-of-tick state consumed by the threat-handling monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSnapshot {
    pub t: f64,
    pub threats: Vec<ThreatSnapshot>,
    /// Track targeted by the active maneuver, if any.
    pub active_track: Option<u64>,
}

/// Per-tick assertion: each collision threat is either targeted by the
/// active maneuver or dominated by another threat with strictly greater
/// level and strictly smaller time to collision.
pub fn check_threat_handling(snapshots: &[TickSnapshot]) -> MonitorVerdict {
    let mut saw_threat = false;
    for snap in snapshots {
        for threat in &snap.threats {
            saw_threat = true;
            if snap.active_track == Some(threat.track_id) {
                continue;
            }
            let dominated = snap.threats.iter().any(|other| {
                other.track_id != threat.track_id
                    && other.level > threat.level
                    && other.time_to_collision < threat.time_to_collision
            });
            if !dominated {
                return MonitorVerdict::violated(
                    PropertyId::ThreatHandling,
                    snap.t,
                    format!(
                        "threat on track {} has no active maneuver and no dominating threat",
                        threat.track_id
                    ),
                );
            }
        }
    }
    if saw_threat {
        MonitorVerdict::satisfied(PropertyId::ThreatHandling)
    } else {
        MonitorVerdict::vacuous(PropertyId::ThreatHandling)
    }
}

/// Rebuilds end-of-tick snapshots from a recorded trace: threats from the
/// ThreatIdentified events of each tick, the active maneuver from the
/// command events folded in trace order.
pub fn snapshots_from_trace(trace: &[TraceEvent]) -> Result<Vec<TickSnapshot>, MonitorError> {
    let ticked = TickedTrace::build(trace)?;
    let mut snapshots: Vec<TickSnapshot> = Vec::with_capacity(ticked.tick_times.len());
    let mut active: Option<u64> = None;
    let mut current = 0usize;
    let mut threats: Vec<ThreatSnapshot> = Vec::new();

    let parse_track = |ev: &TraceEvent| -> Result<u64, MonitorError> {
        ev.get("track_id")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                MonitorError::MalformedTrace(format!(
                    "{} event at t={:.3} lacks a track_id",
                    ev.kind, ev.t
                ))
            })
    };

    for (tick, ev) in &ticked.events {
        while current < *tick {
            snapshots.push(TickSnapshot {
                t: ticked.tick_times[current],
                threats: std::mem::take(&mut threats),
                active_track: active,
            });
            current += 1;
        }
        match ev.kind {
            EventKind::ThreatIdentified => {
                let level = ev
                    .get("level")
                    .and_then(ThreatLevel::parse)
                    .ok_or_else(|| {
                        MonitorError::MalformedTrace(format!(
                            "ThreatIdentified at t={:.3} lacks a level",
                            ev.t
                        ))
                    })?;
                let ttc = ev.get("ttc").and_then(|v| v.parse().ok()).ok_or_else(|| {
                    MonitorError::MalformedTrace(format!(
                        "ThreatIdentified at t={:.3} lacks a ttc",
                        ev.t
                    ))
                })?;
                threats.push(ThreatSnapshot {
                    track_id: parse_track(ev)?,
                    level,
                    time_to_collision: ttc,
                });
            }
            EventKind::CommandIssued => {
                active = Some(parse_track(ev)?);
            }
            EventKind::ManeuverTerminated => {
                active = None;
            }
            _ => {}
        }
    }
    if !ticked.tick_times.is_empty() {
        while current < ticked.tick_times.len() {
            snapshots.push(TickSnapshot {
                t: ticked.tick_times[current],
                threats: std::mem::take(&mut threats),
                active_track: active,
            });
            current += 1;
        }
    }
    Ok(snapshots)
}

/// Runs all four monitors over a recorded trace.
pub fn check_all(
    trace: &[TraceEvent],
    cfg: &MonitorConfig,
) -> Result<Vec<MonitorVerdict>, MonitorError> {
    let snapshots = snapshots_from_trace(trace)?;
    Ok(vec![
        check_c1(trace, cfg)?,
        check_c2(trace, cfg)?,
        check_c3(trace, cfg)?,
        check_threat_handling(&snapshots),
    ])
}
