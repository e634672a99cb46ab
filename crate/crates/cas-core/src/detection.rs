//! Sensor-frame validation and traffic detection.
//!
//! A frame is first gated on sensor status, then validated against the
//! operational envelope, and finally each raw measure is tested against the
//! surveillance volume (range plus azimuth/elevation fields of regard) and
//! the conflict region (a cylinder around the current position). Only
//! measures passing both predicates count as detected traffic.
//!
//! Two channels are modeled: the onboard sensor, whose configuration must
//! stay inside [`MIN_DETECTION_RANGE_M`]..[`MAX_DETECTION_RANGE_M`] and the
//! FOR envelope, and a cooperative/transponder channel whose configuration
//! floor is checked by [`validate_cooperative_config`].

use thiserror::Error;

use crate::types::{to_body_spherical, BodySpherical, Orientation, Position, Vec3};

/// Smallest admissible onboard sensor detection range, meters.
pub const MIN_DETECTION_RANGE_M: f64 = 0.2;
/// Largest admissible onboard sensor detection range, meters.
pub const MAX_DETECTION_RANGE_M: f64 = 3000.0;
/// Admissible azimuth FOR magnitude, degrees.
pub const MAX_AZIMUTH_FOR_DEG: f64 = 110.0;
/// Admissible elevation FOR magnitude, degrees.
pub const MAX_ELEVATION_FOR_DEG: f64 = 15.0;

/// Cooperative-channel range floor: 20 nautical miles, in meters.
pub const MIN_COOPERATIVE_RANGE_M: f64 = 20.0 * 1852.0;
/// Cooperative-channel azimuth FOR floor, degrees (half-width).
pub const MIN_COOPERATIVE_AZIMUTH_DEG: f64 = 110.0;
/// Cooperative-channel elevation FOR floor, degrees (half-width).
pub const MIN_COOPERATIVE_ELEVATION_DEG: f64 = 15.0;
/// Slowest admissible update period, seconds (1.0 Hz floor).
pub const MAX_UPDATE_PERIOD_S: f64 = 1.0;

/// Which physical sensor produced a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SensorSource {
    Primary,
    Secondary,
}

impl SensorSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SensorSource::Primary => "Primary",
            SensorSource::Secondary => "Secondary",
        }
    }
}

/// One raw sensor return: a world-frame offset from the own position.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorMeasure {
    pub relative_offset: Vec3,
    pub measure_id: String,
}

/// One sensor frame as delivered to the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorInput {
    pub sensor_status: bool,
    /// Configured detection range, meters.
    pub detection_range: f64,
    /// Azimuth field of regard, degrees, symmetric half-width.
    pub azimuth_for: f64,
    /// Elevation field of regard, degrees, symmetric half-width.
    pub elevation_for: f64,
    pub orientation: Orientation,
    pub position: Position,
    pub measures: Vec<SensorMeasure>,
    pub t: f64,
    pub source_id: SensorSource,
}

/// Outcome of the sensor-status gate: either the frame proceeds into the
/// pipeline or an alert is raised and no detection happens this tick.
#[derive(Debug, Clone, PartialEq)]
pub enum SensorGate {
    Proceed(SensorInput),
    AlertRaised,
}

/// Gates a frame on its status flag. A false status raises the alert path;
/// the frame is not processed further.
pub fn handle_sensor_status(input: SensorInput) -> SensorGate {
    if input.sensor_status {
        SensorGate::Proceed(input)
    } else {
        SensorGate::AlertRaised
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("detection range {0} m outside [{MIN_DETECTION_RANGE_M}, {MAX_DETECTION_RANGE_M}] m")]
    RangeOutOfBounds(f64),
    #[error("azimuth FOR {0} deg outside [-{MAX_AZIMUTH_FOR_DEG}, {MAX_AZIMUTH_FOR_DEG}] deg")]
    AzimuthOutOfBounds(f64),
    #[error("elevation FOR {0} deg outside [-{MAX_ELEVATION_FOR_DEG}, {MAX_ELEVATION_FOR_DEG}] deg")]
    ElevationOutOfBounds(f64),
}

/// A sensor frame whose configuration passed [`validate_sensor_input`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedInput(SensorInput);

impl ValidatedInput {
    pub fn orientation(&self) -> &Orientation {
        &self.0.orientation
    }

    pub fn position(&self) -> &Position {
        &self.0.position
    }

    pub fn measures(&self) -> &[SensorMeasure] {
        &self.0.measures
    }

    pub fn t(&self) -> f64 {
        self.0.t
    }

    pub fn inner(&self) -> &SensorInput {
        &self.0
    }
}

/// Validates frame configuration against the operational envelope. All
/// bounds are inclusive. The caller must have gated on sensor status first.
pub fn validate_sensor_input(input: SensorInput) -> Result<ValidatedInput, ValidationError> {
    debug_assert!(input.sensor_status, "status gate must run first");
    if !(MIN_DETECTION_RANGE_M..=MAX_DETECTION_RANGE_M).contains(&input.detection_range) {
        return Err(ValidationError::RangeOutOfBounds(input.detection_range));
    }
    if !(-MAX_AZIMUTH_FOR_DEG..=MAX_AZIMUTH_FOR_DEG).contains(&input.azimuth_for) {
        return Err(ValidationError::AzimuthOutOfBounds(input.azimuth_for));
    }
    if !(-MAX_ELEVATION_FOR_DEG..=MAX_ELEVATION_FOR_DEG).contains(&input.elevation_for) {
        return Err(ValidationError::ElevationOutOfBounds(input.elevation_for));
    }
    Ok(ValidatedInput(input))
}

/// The volume inside which traffic is detectable: a range bound plus
/// azimuth and elevation intervals referenced from the flight path.
/// Asymmetric intervals are expressible; symmetric volumes come from
/// [`SurveillanceVolume::from_half_widths`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveillanceVolume {
    pub detection_range: f64,
    pub min_azimuth: f64,
    pub max_azimuth: f64,
    pub min_elevation: f64,
    pub max_elevation: f64,
}

impl SurveillanceVolume {
    pub fn from_half_widths(detection_range: f64, azimuth_for: f64, elevation_for: f64) -> Self {
        Self {
            detection_range,
            min_azimuth: -azimuth_for,
            max_azimuth: azimuth_for,
            min_elevation: -elevation_for,
            max_elevation: elevation_for,
        }
    }
}

/// Volume membership predicate. All bounds inclusive.
pub fn in_surveillance_volume(vol: &SurveillanceVolume, sph: &BodySpherical) -> bool {
    sph.range <= vol.detection_range
        && sph.azimuth >= vol.min_azimuth
        && sph.azimuth <= vol.max_azimuth
        && sph.elevation >= vol.min_elevation
        && sph.elevation <= vol.max_elevation
}

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("conflict region dimension {name} must be positive, got {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },
}

/// Conflict-region dimensions, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    horizontal_radius: f64,
    vertical_half_height: f64,
}

impl RegionParams {
    pub fn new(horizontal_radius: f64, vertical_half_height: f64) -> Result<Self, RegionError> {
        if !(horizontal_radius > 0.0) {
            return Err(RegionError::NonPositiveDimension {
                name: "horizontal_radius",
                value: horizontal_radius,
            });
        }
        if !(vertical_half_height > 0.0) {
            return Err(RegionError::NonPositiveDimension {
                name: "vertical_half_height",
                value: vertical_half_height,
            });
        }
        Ok(Self {
            horizontal_radius,
            vertical_half_height,
        })
    }

    pub fn horizontal_radius(&self) -> f64 {
        self.horizontal_radius
    }

    pub fn vertical_half_height(&self) -> f64 {
        self.vertical_half_height
    }
}

impl Default for RegionParams {
    /// Desk-scenario defaults; scenario files may override.
    fn default() -> Self {
        Self {
            horizontal_radius: 500.0,
            vertical_half_height: 100.0,
        }
    }
}

/// A cylinder centered on the current position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictRegion {
    pub center: Position,
    pub horizontal_radius: f64,
    pub vertical_half_height: f64,
}

/// Builds the conflict region around the current position.
pub fn compute_conflict_region(
    current: &Position,
    horizontal_radius: f64,
    vertical_half_height: f64,
) -> Result<ConflictRegion, RegionError> {
    let params = RegionParams::new(horizontal_radius, vertical_half_height)?;
    Ok(ConflictRegion {
        center: *current,
        horizontal_radius: params.horizontal_radius,
        vertical_half_height: params.vertical_half_height,
    })
}

/// Region membership predicate (inclusive on both the lateral radius and
/// the vertical extent).
pub fn position_in_conflict_region(region: &ConflictRegion, p: &Position) -> bool {
    region.center.horizontal_distance_to(p) <= region.horizontal_radius
        && (p.z - region.center.z).abs() <= region.vertical_half_height
}

/// Detected traffic for one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutput {
    pub traffic_detected: bool,
    /// Detected measures as (measure id, world position).
    pub traffic: Vec<(String, Position)>,
    pub current_position: Position,
    pub t: f64,
}

impl DetectionOutput {
    pub fn empty(current_position: Position, t: f64) -> Self {
        Self {
            traffic_detected: false,
            traffic: Vec::new(),
            current_position,
            t,
        }
    }
}

/// Runs detection over a validated frame: each measure is located in the
/// world (current position plus offset) and kept iff it lies inside both
/// the surveillance volume and the conflict region.
pub fn detect(
    input: &ValidatedInput,
    region_params: &RegionParams,
    volume: &SurveillanceVolume,
) -> DetectionOutput {
    let own = *input.position();
    let region = ConflictRegion {
        center: own,
        horizontal_radius: region_params.horizontal_radius,
        vertical_half_height: region_params.vertical_half_height,
    };
    let mut traffic = Vec::new();
    for measure in input.measures() {
        let traffic_pos = own.offset_by(measure.relative_offset);
        let sph = match to_body_spherical(&own, input.orientation(), &traffic_pos) {
            Ok(sph) => sph,
            Err(_) => continue,
        };
        if in_surveillance_volume(volume, &sph) && position_in_conflict_region(&region, &traffic_pos)
        {
            traffic.push((measure.measure_id.clone(), traffic_pos));
        }
    }
    DetectionOutput {
        traffic_detected: !traffic.is_empty(),
        traffic,
        current_position: own,
        t: input.t(),
    }
}

/// Per-criterion result of checking the cooperative channel configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigReport {
    pub coop_range_ok: bool,
    pub azimuth_ok: bool,
    pub elevation_ok: bool,
    pub update_period_ok: bool,
}

impl ConfigReport {
    pub fn pass(&self) -> bool {
        self.coop_range_ok && self.azimuth_ok && self.elevation_ok && self.update_period_ok
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.coop_range_ok {
            v.push("coop_range");
        }
        if !self.azimuth_ok {
            v.push("azimuth_for");
        }
        if !self.elevation_ok {
            v.push("elevation_for");
        }
        if !self.update_period_ok {
            v.push("update_period");
        }
        v
    }
}

/// Checks the cooperative channel floors: at least 20 nmi of range, at
/// least +/-110 deg azimuth and +/-15 deg elevation FOR, and an update
/// period no slower than 1.0 Hz.
pub fn validate_cooperative_config(
    coop_range_m: f64,
    azimuth_for_deg: f64,
    elevation_for_deg: f64,
    update_period_s: f64,
) -> ConfigReport {
    ConfigReport {
        coop_range_ok: coop_range_m >= MIN_COOPERATIVE_RANGE_M,
        azimuth_ok: azimuth_for_deg >= MIN_COOPERATIVE_AZIMUTH_DEG,
        elevation_ok: elevation_for_deg >= MIN_COOPERATIVE_ELEVATION_DEG,
        update_period_ok: update_period_s <= MAX_UPDATE_PERIOD_S,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CadenceError {
    #[error("timestamps not strictly increasing at index {index}")]
    NonMonotonicTimestamps { index: usize },
}

/// Gaps exceeding the 1.0 Hz floor, as (index of the later sample, gap).
#[derive(Debug, Clone, PartialEq)]
pub struct CadenceReport {
    pub violations: Vec<(usize, f64)>,
}

impl CadenceReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that consecutive sample gaps respect the detection-rate floor.
pub fn check_cadence(timestamps: &[f64]) -> Result<CadenceReport, CadenceError> {
    let mut violations = Vec::new();
    for i in 1..timestamps.len() {
        if timestamps[i] <= timestamps[i - 1] {
            return Err(CadenceError::NonMonotonicTimestamps { index: i });
        }
        let gap = timestamps[i] - timestamps[i - 1];
        if gap > MAX_UPDATE_PERIOD_S {
            violations.push((i, gap));
        }
    }
    Ok(CadenceReport { violations })
}
