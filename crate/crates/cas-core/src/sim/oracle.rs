//! Independent brute-force oracles used to cross-check the pipeline.
//!
//! The detection oracle re-derives the volume and region predicates from
//! first principles (basis-vector projections instead of bearing
//! subtraction) without calling any detection-module code. The separation
//! oracle re-samples the closed-loop trajectories at a tenth of the tick to
//! measure the true minimum own-intruder distance.

use std::collections::BTreeSet;

use crate::detection::RegionParams;
use crate::types::{Orientation, Position};

use super::run::{run, PipelineConfig, RunOutput};
use super::scenario::Scenario;

/// Sensor envelope the oracle checks against.
#[derive(Debug, Clone, Copy)]
pub struct OracleVolume {
    pub detection_range: f64,
    pub azimuth_half_width: f64,
    pub elevation_half_width: f64,
}

/// Independent volume-plus-region membership test for one target.
pub fn oracle_accepts(
    own: &Position,
    orient: &Orientation,
    target: &Position,
    volume: &OracleVolume,
    region: &RegionParams,
) -> bool {
    let dx = target.x - own.x;
    let dy = target.y - own.y;
    let dz = target.z - own.z;
    let dist = (dx * dx + dy * dy + dz * dz).sqrt();
    if dist == 0.0 || dist > volume.detection_range {
        return false;
    }
    // Body azimuth via projection onto the forward/right basis.
    let h = orient.heading.to_radians();
    let fwd = (h.sin(), h.cos());
    let right = (h.cos(), -h.sin());
    let azimuth = (dx * right.0 + dy * right.1)
        .atan2(dx * fwd.0 + dy * fwd.1)
        .to_degrees();
    if azimuth < -volume.azimuth_half_width || azimuth > volume.azimuth_half_width {
        return false;
    }
    let elevation = dz.atan2((dx * dx + dy * dy).sqrt()).to_degrees() - orient.pitch;
    if elevation < -volume.elevation_half_width || elevation > volume.elevation_half_width {
        return false;
    }
    // Conflict region: cylinder around the own position.
    let horizontal = (dx * dx + dy * dy).sqrt();
    horizontal <= region.horizontal_radius() && dz.abs() <= region.vertical_half_height()
}

/// Ground-truth detected set at time `t` for an open-loop (unmaneuvered)
/// own trajectory. Returns the ids of intruders satisfying both predicates.
pub fn oracle_detect(scenario: &Scenario, t: f64) -> BTreeSet<String> {
    debug_assert!(t <= scenario.duration);
    let own = scenario
        .own
        .position
        .offset_by(scenario.own.velocity.as_vec3().scaled(t));
    let heading = if scenario.own.velocity.vx == 0.0 && scenario.own.velocity.vy == 0.0 {
        0.0
    } else {
        scenario
            .own
            .velocity
            .vx
            .atan2(scenario.own.velocity.vy)
            .to_degrees()
            .rem_euclid(360.0)
    };
    let orient = Orientation::level(heading);
    let volume = OracleVolume {
        detection_range: scenario.sensor.detection_range,
        azimuth_half_width: scenario.sensor.azimuth_for,
        elevation_half_width: scenario.sensor.elevation_for,
    };
    scenario
        .intruders
        .iter()
        .filter(|intr| {
            oracle_accepts(&own, &orient, &intr.position_at(t), &volume, &scenario.region)
        })
        .map(|intr| intr.id.clone())
        .collect()
}

/// Minimum own-intruder distance over a closed-loop run, measured by
/// resampling the piecewise-linear trajectories at `dt / 10`. With no
/// intruders the sentinel is +inf.
pub fn oracle_min_separation(
    scenario: &Scenario,
    cfg: &PipelineConfig,
    maneuver_enabled: bool,
) -> f64 {
    let mut cfg = cfg.clone();
    cfg.maneuver_stage_enabled = maneuver_enabled;
    let out = run(scenario, &cfg);
    min_separation_of_run(scenario, &out)
}

/// Same measurement over an already-produced run.
pub fn min_separation_of_run(scenario: &Scenario, out: &RunOutput) -> f64 {
    if scenario.intruders.is_empty() {
        return f64::INFINITY;
    }
    let fine = scenario.dt / 10.0;
    let mut min_d = f64::INFINITY;
    for pair in out.own_states.windows(2) {
        let a = pair[0];
        let b = pair[1];
        let mut t = a.t;
        while t < b.t - 1e-12 {
            let own = a.position.offset_by(a.velocity.as_vec3().scaled(t - a.t));
            for intr in &scenario.intruders {
                min_d = min_d.min(own.distance_to(&intr.position_at(t)));
            }
            t += fine;
        }
    }
    if let Some(last) = out.own_states.last() {
        for intr in &scenario.intruders {
            min_d = min_d.min(last.position.distance_to(&intr.position_at(last.t)));
        }
    }
    min_d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scenario::load_scenario;

    fn open_loop(intr_lines: &str) -> Scenario {
        let text = format!(
            "[scenario]\nname = t\nduration = 30\n[own]\nposition = 0 0 100\nvelocity = 0 50 0\n{intr_lines}"
        );
        load_scenario(&text).unwrap()
    }

    #[test]
    fn intruder_beyond_range_is_excluded() {
        let sc = open_loop("[intruder a]\nposition = 0 5000 100\n");
        assert!(oracle_detect(&sc, 0.0).is_empty());
    }

    #[test]
    fn intruder_exactly_at_range_is_included() {
        // Shrink the region so the range bound is the binding predicate.
        let text = "[scenario]\nname = t\nduration = 10\n[sensor]\ndetection_range = 400\n[own]\nposition = 0 0 100\nvelocity = 0 50 0\n[intruder a]\nposition = 0 400 100\n";
        let sc = load_scenario(text).unwrap();
        let detected = oracle_detect(&sc, 0.0);
        assert!(detected.contains("a"));
    }

    #[test]
    fn no_intruders_gives_infinite_separation() {
        let sc = open_loop("");
        assert_eq!(
            oracle_min_separation(&sc, &PipelineConfig::default(), true),
            f64::INFINITY
        );
    }

    // On an open-loop run (maneuvers disabled, own ship flies straight) the
    // per-tick detected set equals the ground-truth oracle at every tick.
    #[test]
    fn per_tick_detections_match_oracle_open_loop() {
        let text = "\
[scenario]
name = oracle_xcheck
duration = 40
[sensor]
detection_range = 2500
[region]
horizontal_radius = 2500
vertical_half_height = 200
[own]
position = 0 0 100
velocity = 0 50 0
[intruder a]
position = 0 4000 100
segment = 0 0 -100 0
[intruder b]
position = -900 700 150
segment = 0 30 10 0
[intruder c]
position = 2600 -500 100
segment = 0 -40 60 0
";
        let sc = load_scenario(text).unwrap();
        let mut cfg = PipelineConfig::default();
        cfg.maneuver_stage_enabled = false;
        let out = crate::sim::run(&sc, &cfg);

        use std::collections::BTreeMap;
        let mut detected_by_tick: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for ev in &out.trace {
            if ev.kind == crate::types::EventKind::TrafficDetected {
                let ids = ev
                    .get("measures")
                    .unwrap_or("")
                    .split(',')
                    .map(str::to_string)
                    .collect();
                detected_by_tick.insert(format!("{:.3}", ev.t), ids);
            }
        }
        for tick in 0..sc.ticks() {
            let t = tick as f64 * sc.dt;
            let want = oracle_detect(&sc, t);
            let got = detected_by_tick
                .get(&format!("{t:.3}"))
                .cloned()
                .unwrap_or_default();
            assert_eq!(got, want, "tick t={t:.3}");
        }
    }
}
