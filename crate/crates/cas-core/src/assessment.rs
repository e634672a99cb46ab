//! Collision evaluation and threat prioritization.
//!
//! Collision potential is assessed geometrically: the closest point of
//! approach of the relative state under linear extrapolation. A track is a
//! collision threat iff it is closing, the predicted miss distance is
//! within the protected radius, and the time to CPA is within the look-ahead
//! horizon. Threats are ranked by time to collision, shortest first.

use thiserror::Error;

use crate::tracking::Track;
use crate::types::{Position, Vec3, Velocity};

/// Default protected radius around own ship, meters.
pub const DEFAULT_PROTECTED_RADIUS_M: f64 = 150.0;
/// Default look-ahead horizon, seconds.
pub const DEFAULT_HORIZON_S: f64 = 60.0;
/// Default High-threat boundary on time to collision, seconds.
pub const DEFAULT_T_HIGH_S: f64 = 15.0;
/// Relative speeds below this are treated as non-closing, m/s.
pub const DEFAULT_SPEED_EPSILON: f64 = 1e-6;

/// Thresholds for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssessmentParams {
    pub protected_radius: f64,
    pub horizon: f64,
    pub t_high: f64,
    pub speed_epsilon: f64,
}

impl Default for AssessmentParams {
    fn default() -> Self {
        Self {
            protected_radius: DEFAULT_PROTECTED_RADIUS_M,
            horizon: DEFAULT_HORIZON_S,
            t_high: DEFAULT_T_HIGH_S,
            speed_epsilon: DEFAULT_SPEED_EPSILON,
        }
    }
}

/// Closest point of approach under linear extrapolation, clamped to the
/// future (a receding geometry reports t_cpa = 0 and is never closing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpaResult {
    pub t_cpa: f64,
    pub miss_distance: f64,
    pub closing: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CpaError {
    #[error("relative position is zero; geometry undefined")]
    ZeroRelativePosition,
}

/// Computes CPA for a relative position/velocity pair.
pub fn cpa(rel_pos: Vec3, rel_vel: Vec3) -> Result<CpaResult, CpaError> {
    if rel_pos.norm() == 0.0 {
        return Err(CpaError::ZeroRelativePosition);
    }
    if rel_vel.norm() < DEFAULT_SPEED_EPSILON {
        return Ok(CpaResult {
            t_cpa: 0.0,
            miss_distance: rel_pos.norm(),
            closing: false,
        });
    }
    let t_star = -rel_pos.dot(&rel_vel) / rel_vel.dot(&rel_vel);
    let t_cpa = t_star.max(0.0);
    let miss_distance = rel_pos.plus(&rel_vel.scaled(t_cpa)).norm();
    Ok(CpaResult {
        t_cpa,
        miss_distance,
        closing: t_star > 0.0,
    })
}

/// Ordered threat severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ThreatLevel {
    None,
    Low,
    High,
}

impl ThreatLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThreatLevel::None => "None",
            ThreatLevel::Low => "Low",
            ThreatLevel::High => "High",
        }
    }

    pub fn parse(s: &str) -> Option<ThreatLevel> {
        Some(match s {
            "None" => ThreatLevel::None,
            "Low" => ThreatLevel::Low,
            "High" => ThreatLevel::High,
            _ => return None,
        })
    }
}

/// Collision-potential verdict for one track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreatAssessment {
    pub track_id: u64,
    pub threat_level: ThreatLevel,
    /// Finite iff the track is a collision threat; +inf otherwise.
    pub time_to_collision: f64,
    pub is_collision_threat: bool,
}

/// Evaluates the collision potential of a confirmed track against the own
/// state. Boundary values (miss exactly at the protected radius, t_cpa
/// exactly at the horizon or the High threshold) count inward.
pub fn evaluate(
    own_pos: &Position,
    own_vel: &Velocity,
    track: &Track,
    params: &AssessmentParams,
) -> ThreatAssessment {
    debug_assert!(track.is_confirmed(), "only confirmed tracks are evaluated");
    let rel_pos = own_pos.vector_to(&track.position);
    let rel_vel = Vec3::new(
        track.velocity.vx - own_vel.vx,
        track.velocity.vy - own_vel.vy,
        track.velocity.vz - own_vel.vz,
    );
    let result = match cpa(rel_pos, rel_vel) {
        Ok(r) => r,
        // Coincident positions: collision in progress, maximal urgency.
        Err(CpaError::ZeroRelativePosition) => CpaResult {
            t_cpa: 0.0,
            miss_distance: 0.0,
            closing: true,
        },
    };
    let is_threat = result.closing
        && result.miss_distance <= params.protected_radius
        && result.t_cpa <= params.horizon;
    let (level, ttc) = if is_threat {
        let level = if result.t_cpa <= params.t_high {
            ThreatLevel::High
        } else {
            ThreatLevel::Low
        };
        (level, result.t_cpa)
    } else {
        (ThreatLevel::None, f64::INFINITY)
    };
    ThreatAssessment {
        track_id: track.track_id,
        threat_level: level,
        time_to_collision: ttc,
        is_collision_threat: is_threat,
    }
}

/// Same as [`evaluate`] but also returns the raw CPA geometry, for event
/// payloads and self-test fixtures.
pub fn evaluate_with_cpa(
    own_pos: &Position,
    own_vel: &Velocity,
    track: &Track,
    params: &AssessmentParams,
) -> (ThreatAssessment, CpaResult) {
    let rel_pos = own_pos.vector_to(&track.position);
    let rel_vel = Vec3::new(
        track.velocity.vx - own_vel.vx,
        track.velocity.vy - own_vel.vy,
        track.velocity.vz - own_vel.vz,
    );
    let geometry = cpa(rel_pos, rel_vel).unwrap_or(CpaResult {
        t_cpa: 0.0,
        miss_distance: 0.0,
        closing: true,
    });
    (evaluate(own_pos, own_vel, track, params), geometry)
}

/// Filters to collision threats and orders them: ascending time to
/// collision, ties to the higher threat level, then the lower track id.
pub fn prioritize(assessments: &[ThreatAssessment]) -> Vec<ThreatAssessment> {
    let mut threats: Vec<ThreatAssessment> = assessments
        .iter()
        .filter(|a| a.is_collision_threat)
        .copied()
        .collect();
    threats.sort_by(|a, b| {
        a.time_to_collision
            .partial_cmp(&b.time_to_collision)
            .expect("threat TTC is finite")
            .then(b.threat_level.cmp(&a.threat_level))
            .then(a.track_id.cmp(&b.track_id))
    });
    threats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::Confidence;
    use proptest::prelude::*;

    fn confirmed_track(id: u64, position: Position, velocity: Velocity) -> Track {
        Track {
            track_id: id,
            position,
            velocity,
            confidence: Confidence::Confirmed,
            hits: 3,
            last_update: 0.0,
            history_len: 3,
            state_time: 0.0,
        }
    }

    fn threat(id: u64, level: ThreatLevel, ttc: f64) -> ThreatAssessment {
        ThreatAssessment {
            track_id: id,
            threat_level: level,
            time_to_collision: ttc,
            is_collision_threat: level > ThreatLevel::None,
        }
    }

    // Independent oracle: fine-grained time stepping of |p + t v| over a
    // window that provably brackets the minimizer.
    fn sampled_min(p: Vec3, v: Vec3, t_hint: f64, step: f64) -> (f64, f64) {
        let t_end = (t_hint * 1.5 + 5.0).max(5.0);
        let mut best_t = 0.0;
        let mut best_d = p.norm();
        let mut t = 0.0;
        while t <= t_end {
            let d = p.plus(&v.scaled(t)).norm();
            if d < best_d {
                best_d = d;
                best_t = t;
            }
            t += step;
        }
        (best_t, best_d)
    }

    #[test]
    fn head_on_closure() {
        let r = cpa(Vec3::new(1000.0, 0.0, 0.0), Vec3::new(-100.0, 0.0, 0.0)).unwrap();
        assert!((r.t_cpa - 10.0).abs() < 1e-12);
        assert!(r.miss_distance < 1e-9);
        assert!(r.closing);
    }

    #[test]
    fn perpendicular_motion_is_not_closing() {
        let r = cpa(Vec3::new(1000.0, 0.0, 0.0), Vec3::new(0.0, 100.0, 0.0)).unwrap();
        assert_eq!(r.t_cpa, 0.0);
        assert!((r.miss_distance - 1000.0).abs() < 1e-9);
        assert!(!r.closing);
    }

    #[test]
    fn oblique_closure_matches_sampling_oracle() {
        let p = Vec3::new(600.0, 800.0, 0.0);
        let v = Vec3::new(-60.0, -80.0, 0.0);
        let r = cpa(p, v).unwrap();
        let (t_oracle, d_oracle) = sampled_min(p, v, r.t_cpa, 1e-3);
        assert!((r.t_cpa - 10.0).abs() < 1e-12);
        assert!((r.t_cpa - t_oracle).abs() <= 1e-3 + 1e-9);
        assert!((r.miss_distance - d_oracle).abs() <= 1e-3);
    }

    #[test]
    fn near_zero_relative_speed_reports_standoff() {
        let r = cpa(Vec3::new(500.0, 0.0, 0.0), Vec3::new(1e-9, 0.0, 0.0)).unwrap();
        assert_eq!(r.t_cpa, 0.0);
        assert_eq!(r.miss_distance, 500.0);
        assert!(!r.closing);
    }

    #[test]
    fn zero_relative_position_is_an_error() {
        assert_eq!(
            cpa(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)),
            Err(CpaError::ZeroRelativePosition)
        );
    }

    #[test]
    fn receding_geometry_clamps_to_now() {
        let r = cpa(Vec3::new(1000.0, 0.0, 0.0), Vec3::new(100.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.t_cpa, 0.0);
        assert!(!r.closing);
        assert_eq!(r.miss_distance, 1000.0);
    }

    #[test]
    fn head_on_is_high_threat_with_ttc() {
        let own_pos = Position::new(0.0, 0.0, 0.0);
        let own_vel = Velocity::zero();
        let track = confirmed_track(
            7,
            Position::new(1000.0, 0.0, 0.0),
            Velocity::new(-100.0, 0.0, 0.0),
        );
        let params = AssessmentParams::default();
        let a = evaluate(&own_pos, &own_vel, &track, &params);
        assert!(a.is_collision_threat);
        assert_eq!(a.threat_level, ThreatLevel::High);
        assert!((a.time_to_collision - 10.0).abs() < 1e-12);
    }

    #[test]
    fn diverging_track_is_no_threat() {
        let own_pos = Position::new(0.0, 0.0, 0.0);
        let track = confirmed_track(
            1,
            Position::new(1000.0, 0.0, 0.0),
            Velocity::new(50.0, 0.0, 0.0),
        );
        let a = evaluate(
            &own_pos,
            &Velocity::zero(),
            &track,
            &AssessmentParams::default(),
        );
        assert!(!a.is_collision_threat);
        assert_eq!(a.threat_level, ThreatLevel::None);
        assert!(a.time_to_collision.is_infinite());
    }

    #[test]
    fn miss_at_protected_radius_is_inclusive() {
        let own_pos = Position::new(0.0, 0.0, 0.0);
        let params = AssessmentParams::default();
        // Passes abeam at exactly the protected radius.
        let track = confirmed_track(
            2,
            Position::new(1000.0, params.protected_radius, 0.0),
            Velocity::new(-100.0, 0.0, 0.0),
        );
        let a = evaluate(&own_pos, &Velocity::zero(), &track, &params);
        assert!(a.is_collision_threat);
        assert_eq!(a.threat_level, ThreatLevel::High);
    }

    #[test]
    fn low_threat_beyond_t_high() {
        let own_pos = Position::new(0.0, 0.0, 0.0);
        let params = AssessmentParams::default();
        let track = confirmed_track(
            3,
            Position::new(3000.0, 0.0, 0.0),
            Velocity::new(-100.0, 0.0, 0.0),
        );
        let a = evaluate(&own_pos, &Velocity::zero(), &track, &params);
        assert!(a.is_collision_threat);
        assert_eq!(a.threat_level, ThreatLevel::Low);
        assert!((a.time_to_collision - 30.0).abs() < 1e-12);
    }

    #[test]
    fn prioritize_sorts_ascending_ttc() {
        let input = vec![
            threat(1, ThreatLevel::Low, 5.0),
            threat(2, ThreatLevel::Low, 10.0),
            threat(3, ThreatLevel::High, 3.0),
        ];
        let order: Vec<f64> = prioritize(&input)
            .iter()
            .map(|a| a.time_to_collision)
            .collect();
        assert_eq!(order, vec![3.0, 5.0, 10.0]);
        assert!(prioritize(&[]).is_empty());
    }

    #[test]
    fn prioritize_ttc_tie_prefers_higher_level_then_lower_id() {
        let input = vec![
            threat(9, ThreatLevel::Low, 5.0),
            threat(4, ThreatLevel::High, 5.0),
        ];
        let out = prioritize(&input);
        assert_eq!(out[0].track_id, 4);
        assert_eq!(out[1].track_id, 9);

        let input = vec![
            threat(9, ThreatLevel::High, 5.0),
            threat(4, ThreatLevel::High, 5.0),
        ];
        let out = prioritize(&input);
        assert_eq!(out[0].track_id, 4);
    }

    // Reference comparator for exhaustive tie-break checking.
    fn reference_order(a: &ThreatAssessment, b: &ThreatAssessment) -> std::cmp::Ordering {
        a.time_to_collision
            .partial_cmp(&b.time_to_collision)
            .unwrap()
            .then_with(|| b.threat_level.cmp(&a.threat_level))
            .then_with(|| a.track_id.cmp(&b.track_id))
    }

    #[test]
    fn prioritize_matches_reference_on_all_small_permutations() {
        let pool = [
            threat(0, ThreatLevel::Low, 5.0),
            threat(1, ThreatLevel::High, 5.0),
            threat(2, ThreatLevel::High, 2.0),
            threat(3, ThreatLevel::Low, 9.0),
        ];
        // All permutations of all subsets of size <= 4.
        let mut expected = pool.to_vec();
        expected.sort_by(reference_order);
        let indices = [0usize, 1, 2, 3];
        let mut perms: Vec<Vec<usize>> = Vec::new();
        fn permute(rest: Vec<usize>, acc: Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest.is_empty() {
                out.push(acc);
                return;
            }
            for (i, &x) in rest.iter().enumerate() {
                let mut rest2 = rest.clone();
                rest2.remove(i);
                let mut acc2 = acc.clone();
                acc2.push(x);
                permute(rest2, acc2, out);
            }
        }
        permute(indices.to_vec(), Vec::new(), &mut perms);
        for perm in perms {
            let input: Vec<ThreatAssessment> = perm.iter().map(|&i| pool[i]).collect();
            let got = prioritize(&input);
            assert_eq!(got, expected, "permutation {perm:?}");
        }
    }

    #[test]
    fn prioritize_head_is_undominated() {
        // Listing-style precondition shape: no other threat has both a
        // strictly greater level and a strictly smaller TTC than the head.
        let input = vec![
            threat(0, ThreatLevel::Low, 5.0),
            threat(1, ThreatLevel::High, 7.0),
            threat(2, ThreatLevel::Low, 6.0),
        ];
        let out = prioritize(&input);
        let head = out[0];
        assert!(!out.iter().any(|t| {
            t.threat_level > head.threat_level && t.time_to_collision < head.time_to_collision
        }));
    }

    proptest! {
        // CPA minimality: no sampled future time gives a smaller distance.
        #[test]
        fn cpa_is_minimal_over_sampled_times(
            px in -5000.0..5000.0f64,
            py in -5000.0..5000.0f64,
            pz in -1000.0..1000.0f64,
            vx in -150.0..150.0f64,
            vy in -150.0..150.0f64,
            vz in -20.0..20.0f64,
        ) {
            let p = Vec3::new(px, py, pz);
            let v = Vec3::new(vx, vy, vz);
            prop_assume!(p.norm() > 1.0);
            let r = cpa(p, v).unwrap();
            let (_, d_oracle) = sampled_min(p, v, r.t_cpa, 1e-2);
            prop_assert!(r.miss_distance <= d_oracle + 1e-6,
                "analytic miss {} above sampled minimum {}", r.miss_distance, d_oracle);
        }

        // Output of prioritize is a permutation of the threat subset.
        #[test]
        fn prioritize_is_a_permutation(ids in proptest::collection::vec(0u64..50, 0..10)) {
            let input: Vec<ThreatAssessment> = ids
                .iter()
                .enumerate()
                .map(|(i, &id)| {
                    let level = match i % 3 {
                        0 => ThreatLevel::None,
                        1 => ThreatLevel::Low,
                        _ => ThreatLevel::High,
                    };
                    ThreatAssessment {
                        track_id: id,
                        threat_level: level,
                        time_to_collision: if level == ThreatLevel::None {
                            f64::INFINITY
                        } else {
                            (i as f64) * 1.5 + 1.0
                        },
                        is_collision_threat: level > ThreatLevel::None,
                    }
                })
                .collect();
            let out = prioritize(&input);
            let mut want: Vec<u64> = input
                .iter()
                .filter(|a| a.is_collision_threat)
                .map(|a| a.track_id)
                .collect();
            let mut got: Vec<u64> = out.iter().map(|a| a.track_id).collect();
            want.sort_unstable();
            got.sort_unstable();
            prop_assert_eq!(want, got);
            // Determinism: re-running yields the identical ordering.
            prop_assert_eq!(prioritize(&input), out);
        }

        // Enlarging the protected radius never turns a threat into a
        // non-threat.
        #[test]
        fn threat_is_monotone_in_protected_radius(
            px in 100.0..4000.0f64,
            py in -2000.0..2000.0f64,
            vx in -200.0..-1.0f64,
            vy in -50.0..50.0f64,
        ) {
            let own_pos = Position::new(0.0, 0.0, 0.0);
            let track = confirmed_track(0, Position::new(px, py, 0.0), Velocity::new(vx, vy, 0.0));
            let base = AssessmentParams::default();
            let wide = AssessmentParams { protected_radius: base.protected_radius * 2.0, ..base };
            let a = evaluate(&own_pos, &Velocity::zero(), &track, &base);
            let b = evaluate(&own_pos, &Velocity::zero(), &track, &wide);
            prop_assert!(!a.is_collision_threat || b.is_collision_threat);
        }
    }
}
