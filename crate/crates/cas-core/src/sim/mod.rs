//! Deterministic discrete-time scenario engine: scripted trajectories,
//! FMEA-style fault injection, the fixed-order pipeline loop, and the
//! brute-force oracles that cross-check it.

pub mod oracle;
pub mod run;
pub mod scenario;

pub use oracle::{min_separation_of_run, oracle_accepts, oracle_detect, oracle_min_separation, OracleVolume};
pub use run::{event_order_violation, run, OwnTickState, PipelineConfig, RunOutput};
pub use scenario::{
    load_scenario, FaultInjection, FaultKind, IntruderDef, OwnInit, Scenario, ScenarioError,
    SensorConfig, VelocitySegment,
};
