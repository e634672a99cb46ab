//! Deterministic collision avoidance pipeline for unmanned aircraft:
//! detection, tracking, collision evaluation, threat prioritization,
//! maneuver determination and command, plus health management, runtime
//! monitors over event traces, a scenario simulator with fault injection,
//! and requirements-traceability tooling.

pub mod assessment;
pub mod detection;
pub mod health;
pub mod maneuver;
pub mod monitors;
pub mod sim;
pub mod traceability;
pub mod tracking;
pub mod types;
