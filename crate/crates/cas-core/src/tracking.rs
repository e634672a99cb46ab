//! Track-file maintenance: association, alpha-beta state estimation,
//! confirmation, coasting and drop.
//!
//! The estimator is a plain alpha-beta filter. A new track is seeded on the
//! first detection with zero velocity; the second association initializes
//! velocity by two-point differencing, which makes the filter exact on
//! noiseless constant-velocity traffic. Confirmation is an M-consecutive-hit
//! rule; a missed tick resets the consecutive count and demotes the track,
//! which is what keeps one-tick phantom returns from ever confirming.

use crate::detection::DetectionOutput;
use crate::types::{Position, Vec3, Velocity};

/// Track confidence: tracks start Tentative and confirm after
/// `confirm_m` consecutive hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    Tentative,
    Confirmed,
}

/// Persistent state estimate for one intruder.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub track_id: u64,
    pub position: Position,
    pub velocity: Velocity,
    pub confidence: Confidence,
    /// Consecutive associated detections; reset to 0 on a missed tick.
    pub hits: u32,
    /// Time of the last associated detection.
    pub last_update: f64,
    /// Total detections ever associated to this track.
    pub history_len: u32,
    /// Time at which `position` is valid (advances while coasting).
    pub state_time: f64,
}

impl Track {
    /// Position extrapolated to time `t` under the current velocity estimate.
    pub fn predicted_position(&self, t: f64) -> Position {
        let dt = t - self.state_time;
        self.position.offset_by(self.velocity.as_vec3().scaled(dt))
    }

    pub fn is_confirmed(&self) -> bool {
        self.confidence == Confidence::Confirmed
    }
}

/// Tracker tuning. `update_rate_min`, `pos_accuracy_y` and `vel_accuracy_z`
/// are declared configuration, not paper-given values.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingConfig {
    /// Consecutive hits required to confirm a track.
    pub confirm_m: u32,
    /// Coast time before an unseen track is dropped, seconds.
    pub drop_after: f64,
    /// Association gate, meters.
    pub gate_radius: f64,
    /// Position filter gain.
    pub alpha: f64,
    /// Velocity filter gain.
    pub beta: f64,
    /// Required track update rate floor, hertz.
    pub update_rate_min: f64,
    /// Required position accuracy, meters.
    pub pos_accuracy_y: f64,
    /// Required velocity accuracy, meters/second.
    pub vel_accuracy_z: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self {
            confirm_m: 3,
            drop_after: 5.0,
            gate_radius: 200.0,
            alpha: 0.5,
            beta: 0.1,
            update_rate_min: 1.0,
            pos_accuracy_y: 50.0,
            vel_accuracy_z: 10.0,
        }
    }
}

impl TrackingConfig {
    /// Checks the structural invariants on the gains and counters.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(format!("alpha {} outside (0, 1]", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta <= 2.0) {
            return Err(format!("beta {} outside [0, 2]", self.beta));
        }
        if self.confirm_m < 1 {
            return Err("confirm_m must be at least 1".to_string());
        }
        if !(self.drop_after > 0.0) {
            return Err(format!("drop_after {} not positive", self.drop_after));
        }
        if !(self.gate_radius > 0.0) {
            return Err(format!("gate_radius {} not positive", self.gate_radius));
        }
        Ok(())
    }
}

/// The set of live tracks. Tracks are kept in creation (id) order and ids
/// are never recycled within a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackSet {
    pub tracks: Vec<Track>,
    next_id: u64,
}

impl TrackSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn confirmed(&self) -> impl Iterator<Item = &Track> {
        self.tracks.iter().filter(|t| t.is_confirmed())
    }

    pub fn get(&self, track_id: u64) -> Option<&Track> {
        self.tracks.iter().find(|t| t.track_id == track_id)
    }

    pub fn ids_issued(&self) -> u64 {
        self.next_id
    }
}

/// One detection-to-track association made during an update.
#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub track_id: u64,
    pub measure_id: String,
    pub spawned: bool,
}

/// Result of [`associate_and_update`]: the new set plus the associations
/// made this tick (used for provenance bookkeeping in the harness).
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub set: TrackSet,
    pub associations: Vec<Association>,
}

/// Associates detections to tracks (nearest neighbor within the gate, ties
/// to the lowest track id) and runs the filter update. Unassociated
/// detections spawn Tentative tracks.
pub fn associate_and_update(
    mut set: TrackSet,
    detections: &DetectionOutput,
    t: f64,
    cfg: &TrackingConfig,
) -> UpdateOutcome {
    debug_assert!(set.tracks.iter().all(|tr| t >= tr.last_update));
    let mut assigned = vec![false; set.tracks.len()];
    let mut associations = Vec::new();

    for (measure_id, measured) in &detections.traffic {
        let mut best: Option<(usize, f64)> = None;
        for (i, track) in set.tracks.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            let dist = track.predicted_position(t).distance_to(measured);
            if dist <= cfg.gate_radius {
                // Strict < keeps the earliest (lowest-id) track on ties.
                if best.map_or(true, |(_, d)| dist < d) {
                    best = Some((i, dist));
                }
            }
        }
        match best {
            Some((i, _)) => {
                assigned[i] = true;
                let track = &mut set.tracks[i];
                update_track(track, measured, t, cfg);
                associations.push(Association {
                    track_id: track.track_id,
                    measure_id: measure_id.clone(),
                    spawned: false,
                });
            }
            None => {
                let track_id = set.next_id;
                set.next_id += 1;
                let confidence = if cfg.confirm_m <= 1 {
                    Confidence::Confirmed
                } else {
                    Confidence::Tentative
                };
                set.tracks.push(Track {
                    track_id,
                    position: *measured,
                    velocity: Velocity::zero(),
                    confidence,
                    hits: 1,
                    last_update: t,
                    history_len: 1,
                    state_time: t,
                });
                assigned.push(true);
                associations.push(Association {
                    track_id,
                    measure_id: measure_id.clone(),
                    spawned: true,
                });
            }
        }
    }

    UpdateOutcome { set, associations }
}

fn update_track(track: &mut Track, measured: &Position, t: f64, cfg: &TrackingConfig) {
    let dt = t - track.last_update;
    debug_assert!(dt > 0.0, "one update per track per tick");
    if track.history_len == 1 {
        // Second hit: two-point differencing seeds the velocity exactly.
        let delta = track.position.vector_to(measured);
        track.velocity = Velocity::new(delta.x / dt, delta.y / dt, delta.z / dt);
        track.position = *measured;
    } else {
        let predicted = track.predicted_position(t);
        let residual = predicted.vector_to(measured);
        track.position = predicted.offset_by(residual.scaled(cfg.alpha));
        let gain = cfg.beta / dt;
        track.velocity = Velocity::new(
            track.velocity.vx + gain * residual.x,
            track.velocity.vy + gain * residual.y,
            track.velocity.vz + gain * residual.z,
        );
    }
    track.hits += 1;
    track.history_len += 1;
    track.last_update = t;
    track.state_time = t;
    if track.hits >= cfg.confirm_m {
        track.confidence = Confidence::Confirmed;
    }
}

/// Coasts tracks that were not associated at time `t` (dead reckoning on
/// the velocity estimate) and removes tracks unseen for longer than
/// `drop_after`. A missed tick resets the consecutive-hit count, so a
/// coasted track must re-earn confirmation.
pub fn coast_and_drop(mut set: TrackSet, t: f64, cfg: &TrackingConfig) -> TrackSet {
    set.tracks.retain_mut(|track| {
        if track.last_update >= t {
            return true;
        }
        if t - track.last_update > cfg.drop_after {
            return false;
        }
        let dt = t - track.state_time;
        track.position = track.position.offset_by(track.velocity.as_vec3().scaled(dt));
        track.state_time = t;
        track.hits = 0;
        track.confidence = Confidence::Tentative;
        true
    });
    set
}

/// Simulator-side accuracy check of a track against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    pub pos_error: f64,
    pub vel_error: f64,
    pub pos_ok: bool,
    pub vel_ok: bool,
}

impl AccuracyReport {
    pub fn pass(&self) -> bool {
        self.pos_ok && self.vel_ok
    }
}

/// Compares a track's estimates to ground truth; both bounds inclusive.
pub fn check_accuracy(
    track: &Track,
    truth_pos: &Position,
    truth_vel: &Velocity,
    cfg: &TrackingConfig,
) -> AccuracyReport {
    let pos_error = track.position.distance_to(truth_pos);
    let dv = Vec3::new(
        track.velocity.vx - truth_vel.vx,
        track.velocity.vy - truth_vel.vy,
        track.velocity.vz - truth_vel.vz,
    );
    let vel_error = dv.norm();
    AccuracyReport {
        pos_error,
        vel_error,
        pos_ok: pos_error <= cfg.pos_accuracy_y,
        vel_ok: vel_error <= cfg.vel_accuracy_z,
    }
}
