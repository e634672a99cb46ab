//! Avoidance maneuver determination and the command state machine.
//!
//! Every prioritized threat receives a candidate maneuver from a fixed
//! geometric rule; only the highest-priority candidate is commanded, and at
//! most one maneuver is active at any tick. The per-tick command step
//! implements initiate / continue / terminate plus the override path where a
//! strictly higher-priority threat supersedes the active maneuver.

use thiserror::Error;

use crate::assessment::ThreatAssessment;
use crate::tracking::TrackSet;
use crate::types::{to_body_spherical, Orientation, Position, Velocity};

/// Hysteresis on the override comparison: a new threat must beat the active
/// maneuver's time to collision by this margin before it supersedes it.
pub const OVERRIDE_HYSTERESIS_S: f64 = 0.5;

/// The six avoidance geometries: a horizontal turn away from the threat
/// bearing combined with a vertical move away from its relative altitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManeuverKind {
    ClimbRight,
    DescendRight,
    ClimbLeft,
    DescendLeft,
    LevelRight,
    LevelLeft,
}

impl ManeuverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ManeuverKind::ClimbRight => "ClimbRight",
            ManeuverKind::DescendRight => "DescendRight",
            ManeuverKind::ClimbLeft => "ClimbLeft",
            ManeuverKind::DescendLeft => "DescendLeft",
            ManeuverKind::LevelRight => "LevelRight",
            ManeuverKind::LevelLeft => "LevelLeft",
        }
    }

    pub fn parse(s: &str) -> Option<ManeuverKind> {
        Some(match s {
            "ClimbRight" => ManeuverKind::ClimbRight,
            "DescendRight" => ManeuverKind::DescendRight,
            "ClimbLeft" => ManeuverKind::ClimbLeft,
            "DescendLeft" => ManeuverKind::DescendLeft,
            "LevelRight" => ManeuverKind::LevelRight,
            "LevelLeft" => ManeuverKind::LevelLeft,
            _ => return None,
        })
    }

    /// Horizontal turn direction: +1 right, -1 left.
    pub fn turn_sign(&self) -> f64 {
        match self {
            ManeuverKind::ClimbRight | ManeuverKind::DescendRight | ManeuverKind::LevelRight => 1.0,
            _ => -1.0,
        }
    }

    /// Vertical rate direction: +1 climb, -1 descend, 0 level.
    pub fn vertical_sign(&self) -> f64 {
        match self {
            ManeuverKind::ClimbRight | ManeuverKind::ClimbLeft => 1.0,
            ManeuverKind::DescendRight | ManeuverKind::DescendLeft => -1.0,
            _ => 0.0,
        }
    }
}

/// Own-ship state handed to maneuver determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwnState {
    pub position: Position,
    pub velocity: Velocity,
    pub orientation: Orientation,
}

/// An avoidance maneuver bound to one threat track.
#[derive(Debug, Clone, PartialEq)]
pub struct Maneuver {
    pub maneuver_id: u64,
    pub kind: ManeuverKind,
    pub threat_track_id: u64,
    pub is_active: bool,
    pub priority_ttc: f64,
    pub started_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Initiate,
    Continue,
    Terminate,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Initiate => "Initiate",
            CommandKind::Continue => "Continue",
            CommandKind::Terminate => "Terminate",
        }
    }
}

/// A maneuver command issued to the flight control interface.
#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub kind: CommandKind,
    pub maneuver: Maneuver,
    pub t: f64,
}

/// Candidate maneuver computed for one prioritized threat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateManeuver {
    pub track_id: u64,
    pub kind: ManeuverKind,
    pub time_to_collision: f64,
}

/// Candidates in priority order; the head is the selected maneuver.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ManeuverPlan {
    pub candidates: Vec<CandidateManeuver>,
}

impl ManeuverPlan {
    pub fn selected(&self) -> Option<&CandidateManeuver> {
        self.candidates.first()
    }

    pub fn candidate_for(&self, track_id: u64) -> Option<&CandidateManeuver> {
        self.candidates.iter().find(|c| c.track_id == track_id)
    }
}

/// Deterministic kind selection: turn away from the threat bearing sign
/// (a threat dead ahead defaults to a right turn) and move vertically away
/// from its relative altitude (zero relative altitude stays level).
pub fn select_kind(own: &OwnState, threat_pos: &Position) -> ManeuverKind {
    let azimuth = to_body_spherical(&own.position, &own.orientation, threat_pos)
        .map(|sph| sph.azimuth)
        .unwrap_or(0.0);
    let dz = threat_pos.z - own.position.z;
    let right = azimuth <= 0.0;
    if dz > 0.0 {
        if right {
            ManeuverKind::DescendRight
        } else {
            ManeuverKind::DescendLeft
        }
    } else if dz < 0.0 {
        if right {
            ManeuverKind::ClimbRight
        } else {
            ManeuverKind::ClimbLeft
        }
    } else if right {
        ManeuverKind::LevelRight
    } else {
        ManeuverKind::LevelLeft
    }
}

/// Assigns a candidate maneuver to every prioritized threat. The input
/// ordering (from prioritization) is preserved, so the head candidate
/// targets the highest-priority threat.
pub fn determine(
    prioritized: &[ThreatAssessment],
    own: &OwnState,
    tracks: &TrackSet,
) -> ManeuverPlan {
    let mut candidates = Vec::with_capacity(prioritized.len());
    for threat in prioritized {
        let Some(track) = tracks.get(threat.track_id) else {
            continue;
        };
        candidates.push(CandidateManeuver {
            track_id: threat.track_id,
            kind: select_kind(own, &track.position),
            time_to_collision: threat.time_to_collision,
        });
    }
    ManeuverPlan { candidates }
}

/// Single-owner state of the command stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActiveManeuverState {
    pub active: Option<Maneuver>,
    next_maneuver_id: u64,
}

impl ActiveManeuverState {
    pub fn new() -> Self {
        Self::default()
    }

    fn next_id(&mut self) -> u64 {
        let id = self.next_maneuver_id;
        self.next_maneuver_id += 1;
        id
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ManeuverError {
    /// The plan references a track that is not an assessed collision
    /// threat; the pipeline ran its stages out of order.
    #[error("illegal transition: plan head targets track {track_id} which is not a current threat")]
    IllegalTransition { track_id: u64 },
}

/// Refreshes the active maneuver from this tick's assessment: the bound
/// threat's time to collision is re-read, and the maneuver kind is replaced
/// in place when the threat's geometry has changed quadrant. Counted as part
/// of a Continue, never as a re-initiation.
pub fn reassess_update(
    state: &mut ActiveManeuverState,
    plan: &ManeuverPlan,
    assessments: &[ThreatAssessment],
    _t: f64,
) {
    let Some(active) = state.active.as_mut() else {
        return;
    };
    if let Some(a) = assessments
        .iter()
        .find(|a| a.track_id == active.threat_track_id && a.is_collision_threat)
    {
        active.priority_ttc = a.time_to_collision;
    }
    if let Some(candidate) = plan.candidate_for(active.threat_track_id) {
        active.kind = candidate.kind;
    }
}

/// Runs one tick of the command state machine. Returns the commands issued
/// this tick in order (an override yields Terminate then Initiate).
pub fn step_command(
    state: &mut ActiveManeuverState,
    plan: &ManeuverPlan,
    assessments: &[ThreatAssessment],
    t: f64,
) -> Result<Vec<Command>, ManeuverError> {
    if let Some(head) = plan.selected() {
        let head_is_threat = assessments
            .iter()
            .any(|a| a.track_id == head.track_id && a.is_collision_threat);
        if !head_is_threat {
            return Err(ManeuverError::IllegalTransition {
                track_id: head.track_id,
            });
        }
    }

    let threat_alive = |track_id: u64| {
        assessments
            .iter()
            .any(|a| a.track_id == track_id && a.is_collision_threat)
    };

    let mut commands = Vec::new();
    match (state.active.take(), plan.selected()) {
        (None, None) => {}
        (None, Some(head)) => {
            commands.push(initiate(state, head, t));
        }
        (Some(active), None) => {
            commands.push(terminate(active, t));
        }
        (Some(active), Some(head)) => {
            let same_threat = head.track_id == active.threat_track_id;
            if !threat_alive(active.threat_track_id) {
                // Bound threat no longer exists: terminate, then hand the
                // slot to the current head.
                commands.push(terminate(active, t));
                commands.push(initiate(state, head, t));
            } else if !same_threat
                && head.time_to_collision < active.priority_ttc - OVERRIDE_HYSTERESIS_S
            {
                // Higher-priority threat supersedes the active maneuver.
                commands.push(terminate(active, t));
                commands.push(initiate(state, head, t));
            } else {
                commands.push(Command {
                    kind: CommandKind::Continue,
                    maneuver: active.clone(),
                    t,
                });
                state.active = Some(active);
            }
        }
    }
    Ok(commands)
}

fn initiate(state: &mut ActiveManeuverState, head: &CandidateManeuver, t: f64) -> Command {
    let maneuver = Maneuver {
        maneuver_id: state.next_id(),
        kind: head.kind,
        threat_track_id: head.track_id,
        is_active: true,
        priority_ttc: head.time_to_collision,
        started_at: t,
    };
    state.active = Some(maneuver.clone());
    Command {
        kind: CommandKind::Initiate,
        maneuver,
        t,
    }
}

fn terminate(mut active: Maneuver, t: f64) -> Command {
    active.is_active = false;
    Command {
        kind: CommandKind::Terminate,
        maneuver: active,
        t,
    }
}

/// Exhaustively drives the state machine through every (active?, head
/// relation) case and checks that only the declared transitions occur with
/// at most one active maneuver afterwards. Used by the health self-test.
pub fn closure_probe() -> bool {
    let threat = |id: u64, ttc: f64| ThreatAssessment {
        track_id: id,
        threat_level: crate::assessment::ThreatLevel::High,
        time_to_collision: ttc,
        is_collision_threat: true,
    };
    let candidate = |id: u64, ttc: f64| CandidateManeuver {
        track_id: id,
        kind: ManeuverKind::LevelRight,
        time_to_collision: ttc,
    };
    let plan_for = |cands: &[CandidateManeuver]| ManeuverPlan {
        candidates: cands.to_vec(),
    };

    // (active threat, plan head, assessments) -> expected command kinds.
    let cases: Vec<(Option<u64>, Vec<CandidateManeuver>, Vec<ThreatAssessment>, Vec<CommandKind>)> = vec![
        (None, vec![], vec![], vec![]),
        (None, vec![candidate(1, 10.0)], vec![threat(1, 10.0)], vec![CommandKind::Initiate]),
        (Some(1), vec![candidate(1, 9.0)], vec![threat(1, 9.0)], vec![CommandKind::Continue]),
        (Some(1), vec![], vec![], vec![CommandKind::Terminate]),
        (
            // New strictly higher-priority threat: override.
            Some(1),
            vec![candidate(2, 3.0), candidate(1, 10.0)],
            vec![threat(1, 10.0), threat(2, 3.0)],
            vec![CommandKind::Terminate, CommandKind::Initiate],
        ),
        (
            // Head within the hysteresis margin: keep the active maneuver.
            Some(1),
            vec![candidate(2, 9.8), candidate(1, 10.0)],
            vec![threat(1, 10.0), threat(2, 9.8)],
            vec![CommandKind::Continue],
        ),
        (
            // Bound threat gone, another present: terminate then initiate.
            Some(1),
            vec![candidate(2, 12.0)],
            vec![threat(2, 12.0)],
            vec![CommandKind::Terminate, CommandKind::Initiate],
        ),
    ];

    for (active_id, cands, assessments, expected) in cases {
        let mut state = ActiveManeuverState::new();
        if let Some(id) = active_id {
            state.active = Some(Maneuver {
                maneuver_id: 99,
                kind: ManeuverKind::LevelRight,
                threat_track_id: id,
                is_active: true,
                priority_ttc: 10.0,
                started_at: 0.0,
            });
        }
        let plan = plan_for(&cands);
        reassess_update(&mut state, &plan, &assessments, 1.0);
        let got = match step_command(&mut state, &plan, &assessments, 1.0) {
            Ok(commands) => commands,
            Err(_) => return false,
        };
        let kinds: Vec<CommandKind> = got.iter().map(|c| c.kind).collect();
        if kinds != expected {
            return false;
        }
        if state.active.iter().filter(|m| m.is_active).count() > 1 {
            return false;
        }
    }
    true
}
