//! Shared domain vocabulary: units, frames, identifiers, and the event
//! taxonomy used by every pipeline stage.
//!
//! The world frame is flat Cartesian East-North-Up (meters); there is no
//! geodetic model. Angles are stored in degrees and only converted to
//! radians transiently inside math.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Meters in one nautical mile, by definition.
pub const METERS_PER_NAUTICAL_MILE: f64 = 1852.0;

/// Sanity bound on any airspeed handled by the system, m/s.
pub const MAX_SPEED_MPS: f64 = 350.0;

/// Converts nautical miles to meters exactly (`d * 1852`).
pub fn nm_to_meters(d: f64) -> f64 {
    debug_assert!(d >= 0.0, "negative distance");
    d * METERS_PER_NAUTICAL_MILE
}

/// A point in the world frame (ENU, meters). The origin is fixed per scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn vector_to(&self, other: &Position) -> Vec3 {
        Vec3::new(other.x - self.x, other.y - self.y, other.z - self.z)
    }

    pub fn offset_by(&self, v: Vec3) -> Position {
        Position::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        self.vector_to(other).norm()
    }

    pub fn horizontal_distance_to(&self, other: &Position) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// A velocity in the world frame (m/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl Velocity {
    pub fn new(vx: f64, vy: f64, vz: f64) -> Self {
        Self { vx, vy, vz }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.vx.is_finite() && self.vy.is_finite() && self.vz.is_finite()
    }

    pub fn magnitude(&self) -> f64 {
        self.as_vec3().norm()
    }

    pub fn as_vec3(&self) -> Vec3 {
        Vec3::new(self.vx, self.vy, self.vz)
    }
}

/// A free vector in the world frame. Used for sensor offsets and relative
/// kinematic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn plus(&self, other: &Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }
}

/// Own-ship attitude. Heading is compass-style: degrees clockwise from
/// north (the +Y axis), normalized to [0, 360). Pitch is degrees above the
/// horizontal plane, in [-90, +90].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub heading: f64,
    pub pitch: f64,
}

impl Orientation {
    pub fn new(heading: f64, pitch: f64) -> Self {
        Self {
            heading: heading.rem_euclid(360.0),
            pitch,
        }
    }

    pub fn level(heading: f64) -> Self {
        Self::new(heading, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.heading.is_finite() && self.pitch.is_finite()
    }
}

/// Target coordinates referenced from the own-ship flight path: slant range
/// (m), signed azimuth (degrees, positive clockwise viewed from above, in
/// (-180, 180]) and signed elevation (degrees, positive up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodySpherical {
    pub range: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl BodySpherical {
    /// Reconstructs the world-frame offset this reading denotes for the
    /// given own-ship attitude. Inverse of [`to_body_spherical`].
    pub fn to_world_offset(&self, orient: &Orientation) -> Vec3 {
        let el = (self.elevation + orient.pitch).to_radians();
        let dz = self.range * el.sin();
        let horizontal = self.range * el.cos();
        let bearing = (self.azimuth + orient.heading).to_radians();
        Vec3::new(horizontal * bearing.sin(), horizontal * bearing.cos(), dz)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    /// Target coincides with the own-ship position; no line of sight exists.
    #[error("target coincides with own position, range is zero")]
    ZeroRange,
}

/// Normalizes an angle in degrees into (-180, 180].
pub fn normalize_azimuth_deg(deg: f64) -> f64 {
    let a = deg.rem_euclid(360.0);
    if a > 180.0 {
        a - 360.0
    } else {
        a
    }
}

/// Expresses a world-frame target in flight-path-referenced spherical
/// coordinates. Elevation is measured against the horizontal plane and the
/// own-ship pitch is then subtracted, so field-of-regard checks are
/// body-referenced.
pub fn to_body_spherical(
    own_pos: &Position,
    own_orient: &Orientation,
    target: &Position,
) -> Result<BodySpherical, GeometryError> {
    let d = own_pos.vector_to(target);
    let range = d.norm();
    if range == 0.0 {
        return Err(GeometryError::ZeroRange);
    }
    let bearing = d.x.atan2(d.y).to_degrees();
    let azimuth = normalize_azimuth_deg(bearing - own_orient.heading);
    let elevation = (d.z / range).asin().to_degrees() - own_orient.pitch;
    Ok(BodySpherical {
        range,
        azimuth,
        elevation,
    })
}

/// The closed set of pipeline event kinds recorded on the trace bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    SensorInputReceived,
    SensorAlert,
    TrafficDetected,
    CollisionEvaluated,
    ThreatIdentified,
    ManeuverDetermined,
    CommandIssued,
    ManeuverTerminated,
    SelfTestResult,
    FailoverActivated,
    GroundLinkSent,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::SensorInputReceived => "SensorInputReceived",
            EventKind::SensorAlert => "SensorAlert",
            EventKind::TrafficDetected => "TrafficDetected",
            EventKind::CollisionEvaluated => "CollisionEvaluated",
            EventKind::ThreatIdentified => "ThreatIdentified",
            EventKind::ManeuverDetermined => "ManeuverDetermined",
            EventKind::CommandIssued => "CommandIssued",
            EventKind::ManeuverTerminated => "ManeuverTerminated",
            EventKind::SelfTestResult => "SelfTestResult",
            EventKind::FailoverActivated => "FailoverActivated",
            EventKind::GroundLinkSent => "GroundLinkSent",
        }
    }

    pub fn parse(s: &str) -> Option<EventKind> {
        Some(match s {
            "SensorInputReceived" => EventKind::SensorInputReceived,
            "SensorAlert" => EventKind::SensorAlert,
            "TrafficDetected" => EventKind::TrafficDetected,
            "CollisionEvaluated" => EventKind::CollisionEvaluated,
            "ThreatIdentified" => EventKind::ThreatIdentified,
            "ManeuverDetermined" => EventKind::ManeuverDetermined,
            "CommandIssued" => EventKind::CommandIssued,
            "ManeuverTerminated" => EventKind::ManeuverTerminated,
            "SelfTestResult" => EventKind::SelfTestResult,
            "FailoverActivated" => EventKind::FailoverActivated,
            "GroundLinkSent" => EventKind::GroundLinkSent,
            _ => return None,
        })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A timestamped pipeline event. The payload is a flat string map; keys are
/// kept sorted so serialized records are byte-stable. Numeric payload values
/// must be formatted with [`payload_int`] / [`payload_real`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub t: f64,
    pub kind: EventKind,
    pub payload: BTreeMap<String, String>,
}

impl TraceEvent {
    pub fn new(t: f64, kind: EventKind) -> Self {
        Self {
            t,
            kind,
            payload: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    pub fn with_int(self, key: &str, value: i64) -> Self {
        self.with(key, payload_int(value))
    }

    pub fn with_real(self, key: &str, value: f64) -> Self {
        self.with(key, payload_real(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.payload.get(key).map(String::as_str)
    }
}

/// Ground-link rendering of an integer payload value (bare digits).
pub fn payload_int(value: i64) -> String {
    value.to_string()
}

/// Ground-link rendering of a real payload value (exactly 3 decimals).
pub fn payload_real(value: f64) -> String {
    format!("{value:.3}")
}

/// Requirement levels recognized in traceability data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReqLevel {
    Srats,
    Hlr,
    Dhlr,
    Llr,
}

impl ReqLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReqLevel::Srats => "SRATS",
            ReqLevel::Hlr => "HLR",
            ReqLevel::Dhlr => "DHLR",
            ReqLevel::Llr => "LLR",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RequirementIdError {
    #[error("requirement tag {0:?} does not match (SRATS|HLR|DHLR|LLR)_[0-9a-zA-Z-]+")]
    BadTag(String),
}

/// A requirement identifier such as `SRATS_003` or `LLR_008b-01`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RequirementId {
    tag: String,
}

impl RequirementId {
    pub fn parse(tag: &str) -> Result<Self, RequirementIdError> {
        let level_len = ["DHLR", "SRATS", "HLR", "LLR"]
            .iter()
            .find(|p| tag.starts_with(&format!("{p}_")))
            .map(|p| p.len());
        let ok = match level_len {
            Some(n) => {
                let suffix = &tag[n + 1..];
                !suffix.is_empty()
                    && suffix.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
            }
            None => false,
        };
        if ok {
            Ok(Self {
                tag: tag.to_string(),
            })
        } else {
            Err(RequirementIdError::BadTag(tag.to_string()))
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn level(&self) -> ReqLevel {
        if self.tag.starts_with("SRATS_") {
            ReqLevel::Srats
        } else if self.tag.starts_with("DHLR_") {
            ReqLevel::Dhlr
        } else if self.tag.starts_with("HLR_") {
            ReqLevel::Hlr
        } else {
            ReqLevel::Llr
        }
    }
}

impl fmt::Display for RequirementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)
    }
}
