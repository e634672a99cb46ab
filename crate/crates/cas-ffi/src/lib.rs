//! C ABI over the collision avoidance pipeline.
//!
//! Conventions: handles are opaque pointers created and freed by this
//! library; every fallible call returns a [`CasStatus`] code and writes its
//! result through out-pointers; `cas_last_error` returns a thread-local
//! message for the most recent failure. Strings returned through
//! out-pointers are NUL-terminated, UTF-8, and owned by the handle (or, for
//! `cas_monitor_trace`, by the caller via `cas_string_free`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use cas_core::assessment::cpa;
use cas_core::health::parse_trace;
use cas_core::monitors::{check_all, MonitorConfig};
use cas_core::sim::{load_scenario, oracle_min_separation, run, PipelineConfig, Scenario};
use cas_core::types::Vec3;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    IoError = 3,
    ParseError = 4,
    ValidationError = 5,
    ZeroRelativePosition = 6,
    MalformedTrace = 7,
}

/// Closest-point-of-approach result, C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CasCpaResult {
    pub t_cpa: f64,
    pub miss_distance: f64,
    /// 1 when the geometry is closing, 0 otherwise.
    pub closing: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cas_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Closest point of approach for a relative position/velocity pair.
#[no_mangle]
pub extern "C" fn cas_cpa(
    px: f64,
    py: f64,
    pz: f64,
    vx: f64,
    vy: f64,
    vz: f64,
    out: *mut CasCpaResult,
) -> CasStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CasStatus::NullArgument;
    }
    match cpa(Vec3::new(px, py, pz), Vec3::new(vx, vy, vz)) {
        Ok(result) => {
            unsafe {
                *out = CasCpaResult {
                    t_cpa: result.t_cpa,
                    miss_distance: result.miss_distance,
                    closing: u8::from(result.closing),
                };
            }
            CasStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CasStatus::ZeroRelativePosition
        }
    }
}

/// Opaque scenario handle.
pub struct CasScenario {
    inner: Scenario,
}

/// Opaque run-result handle carrying the serialized outputs.
pub struct CasRun {
    trace: CString,
    gclog: CString,
    csv: CString,
}

unsafe fn cstr_arg(ptr: *const c_char, name: &str) -> Result<String, CasStatus> {
    if ptr.is_null() {
        set_error(format!("{name} is null"));
        return Err(CasStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s.to_string()),
        Err(_) => {
            set_error(format!("{name} is not valid UTF-8"));
            Err(CasStatus::InvalidUtf8)
        }
    }
}

/// Loads and validates a scenario file. On success writes a handle that
/// must be released with `cas_scenario_free`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cas_scenario_load(
    path: *const c_char,
    out: *mut *mut CasScenario,
) -> CasStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CasStatus::NullArgument;
    }
    let path = match cstr_arg(path, "path") {
        Ok(p) => p,
        Err(status) => return status,
    };
    let text = match std::fs::read_to_string(Path::new(&path)) {
        Ok(t) => t,
        Err(e) => {
            set_error(format!("{path}: {e}"));
            return CasStatus::IoError;
        }
    };
    match load_scenario(&text) {
        Ok(scenario) => {
            *out = Box::into_raw(Box::new(CasScenario { inner: scenario }));
            CasStatus::Ok
        }
        Err(e) => {
            set_error(format!("{path}: {e}"));
            match e {
                cas_core::sim::ScenarioError::Parse { .. } => CasStatus::ParseError,
                cas_core::sim::ScenarioError::Validation { .. } => CasStatus::ValidationError,
            }
        }
    }
}

/// Releases a scenario handle. A null pointer is a no-op.
///
/// # Safety
/// `scenario` must have come from `cas_scenario_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cas_scenario_free(scenario: *mut CasScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of simulation ticks the scenario will run.
///
/// # Safety
/// `scenario` must be a live handle from `cas_scenario_load`.
#[no_mangle]
pub unsafe extern "C" fn cas_scenario_ticks(scenario: *const CasScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.ticks())
}

fn to_cstring(text: String) -> CString {
    CString::new(text.replace('\0', " ")).unwrap_or_default()
}

/// Runs a scenario with default pipeline configuration. On success writes
/// a run handle that must be released with `cas_run_free`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cas_scenario_run(
    scenario: *const CasScenario,
    out: *mut *mut CasRun,
) -> CasStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CasStatus::NullArgument;
    }
    let Some(scenario) = scenario.as_ref() else {
        set_error("scenario handle is null");
        return CasStatus::NullArgument;
    };
    let output = run(&scenario.inner, &PipelineConfig::default());
    *out = Box::into_raw(Box::new(CasRun {
        trace: to_cstring(output.trace_text()),
        gclog: to_cstring(output.gclog_text()),
        csv: to_cstring(output.csv),
    }));
    CasStatus::Ok
}

/// Releases a run handle. A null pointer is a no-op.
///
/// # Safety
/// `run` must have come from `cas_scenario_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cas_run_free(run: *mut CasRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Serialized event trace of a run; owned by the handle.
///
/// # Safety
/// `run` must be a live handle from `cas_scenario_run`.
#[no_mangle]
pub unsafe extern "C" fn cas_run_trace(run: *const CasRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.trace.as_ptr())
}

/// Ground-link log of a run; owned by the handle.
///
/// # Safety
/// `run` must be a live handle from `cas_scenario_run`.
#[no_mangle]
pub unsafe extern "C" fn cas_run_gclog(run: *const CasRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.gclog.as_ptr())
}

/// Per-tick CSV of a run; owned by the handle.
///
/// # Safety
/// `run` must be a live handle from `cas_scenario_run`.
#[no_mangle]
pub unsafe extern "C" fn cas_run_csv(run: *const CasRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.csv.as_ptr())
}

/// Minimum own-intruder separation of the closed-loop run, measured by the
/// fine-resampling oracle. `maneuver_enabled = 0` measures the uncontrolled
/// baseline. With no intruders the result is +inf.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cas_min_separation(
    scenario: *const CasScenario,
    maneuver_enabled: u8,
    out: *mut f64,
) -> CasStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CasStatus::NullArgument;
    }
    let Some(scenario) = scenario.as_ref() else {
        set_error("scenario handle is null");
        return CasStatus::NullArgument;
    };
    *out = oracle_min_separation(
        &scenario.inner,
        &PipelineConfig::default(),
        maneuver_enabled != 0,
    );
    CasStatus::Ok
}

/// Runs the four trace monitors over serialized trace text. On success
/// writes a NUL-terminated report (one `<property> <verdict>` line per
/// property) that the caller frees with `cas_string_free`.
///
/// # Safety
/// `trace_text` must be a valid NUL-terminated string; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cas_monitor_trace(
    trace_text: *const c_char,
    horizon_ticks: u32,
    raw_c2: u8,
    out: *mut *mut c_char,
) -> CasStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CasStatus::NullArgument;
    }
    let text = match cstr_arg(trace_text, "trace_text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let trace = match parse_trace(&text) {
        Ok(t) => t,
        Err(e) => {
            set_error(e.to_string());
            return CasStatus::MalformedTrace;
        }
    };
    let cfg = MonitorConfig {
        horizon_h: horizon_ticks as usize,
        raw_c2: raw_c2 != 0,
    };
    let verdicts = match check_all(&trace, &cfg) {
        Ok(v) => v,
        Err(e) => {
            set_error(e.to_string());
            return CasStatus::MalformedTrace;
        }
    };
    let mut report = String::new();
    for v in verdicts {
        report.push_str(v.property.as_str());
        report.push(' ');
        report.push_str(v.status.as_str());
        if let Some(w) = v.witness {
            report.push_str(&format!(" t={:.3} {}", w.t, w.description));
        }
        report.push('\n');
    }
    *out = to_cstring(report).into_raw();
    CasStatus::Ok
}

/// Frees a string returned by `cas_monitor_trace`. A null pointer is a
/// no-op.
///
/// # Safety
/// `s` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cas_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpa_through_the_abi() {
        let mut out = CasCpaResult {
            t_cpa: 0.0,
            miss_distance: 0.0,
            closing: 0,
        };
        let status = cas_cpa(1000.0, 0.0, 0.0, -100.0, 0.0, 0.0, &mut out);
        assert_eq!(status, CasStatus::Ok);
        assert!((out.t_cpa - 10.0).abs() < 1e-12);
        assert!(out.miss_distance < 1e-9);
        assert_eq!(out.closing, 1);

        let status = cas_cpa(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, &mut out);
        assert_eq!(status, CasStatus::ZeroRelativePosition);
        let msg = unsafe { CStr::from_ptr(cas_last_error()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn null_arguments_are_rejected() {
        assert_eq!(
            cas_cpa(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, ptr::null_mut()),
            CasStatus::NullArgument
        );
        unsafe {
            let mut handle: *mut CasScenario = ptr::null_mut();
            assert_eq!(
                cas_scenario_load(ptr::null(), &mut handle),
                CasStatus::NullArgument
            );
            cas_scenario_free(ptr::null_mut());
            cas_run_free(ptr::null_mut());
            cas_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_is_exposed() {
        let v = unsafe { CStr::from_ptr(cas_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
