//! C ABI over the simulator.
//!
//! Configurations and run results are opaque heap handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns a [`UdnStatus`]; the message of the last failure on the
//! calling thread is available from [`udn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use udn_handover::harness::{iteration_seed, run_cell, run_iteration, RunOptions};
use udn_handover::kpi::{GridPoint, KpiCell, RunResult};
use udn_handover::radio::{noise_power_dbm, pathloss_db};
use udn_handover::scenario::{validate_config, RouteLabel, SimConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidConfig = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdnCase {
    A = 0,
    B = 1,
    /// Route taken from the configuration.
    Custom = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdnGridPoint {
    pub route: UdnCase,
    pub ttt_tics: u32,
    pub den_gnb: u32,
    pub velocity_kmh: f64,
}

/// Aggregated KPIs of one grid cell. Undefined geometries are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdnKpiCell {
    pub point: UdnGridPoint,
    pub iterations: u32,
    pub mean_ho_rate: f64,
    pub ho_avg_geo_db: f64,
    pub pooled_ho_avg_geo_db: f64,
    pub failure: bool,
    pub iterations_with_handover: u32,
    pub connection_losses_mean: f64,
}

/// Opaque simulation configuration.
pub struct UdnConfig {
    inner: SimConfig,
}

/// Opaque result of a single iteration.
pub struct UdnRunResult {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: UdnStatus, msg: impl Into<String>) -> UdnStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> UdnStatus) -> UdnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(UdnStatus::Panic, "internal panic"),
    }
}

impl From<UdnCase> for RouteLabel {
    fn from(c: UdnCase) -> Self {
        match c {
            UdnCase::A => RouteLabel::CaseA,
            UdnCase::B => RouteLabel::CaseB,
            UdnCase::Custom => RouteLabel::Custom,
        }
    }
}

impl From<RouteLabel> for UdnCase {
    fn from(c: RouteLabel) -> Self {
        match c {
            RouteLabel::CaseA => UdnCase::A,
            RouteLabel::CaseB => UdnCase::B,
            RouteLabel::Custom => UdnCase::Custom,
        }
    }
}

impl From<UdnGridPoint> for GridPoint {
    fn from(p: UdnGridPoint) -> Self {
        GridPoint {
            case: p.route.into(),
            ttt_tics: p.ttt_tics,
            den_gnb: p.den_gnb,
            velocity_kmh: p.velocity_kmh,
        }
    }
}

impl From<&KpiCell> for UdnKpiCell {
    fn from(c: &KpiCell) -> Self {
        UdnKpiCell {
            point: UdnGridPoint {
                route: c.point.case.into(),
                ttt_tics: c.point.ttt_tics,
                den_gnb: c.point.den_gnb,
                velocity_kmh: c.point.velocity_kmh,
            },
            iterations: c.iterations,
            mean_ho_rate: c.mean_ho_rate,
            ho_avg_geo_db: c.ho_avg_geo_db.unwrap_or(f64::NAN),
            pooled_ho_avg_geo_db: c.pooled_ho_avg_geo_db.unwrap_or(f64::NAN),
            failure: c.failure,
            iterations_with_handover: c.iterations_with_handover,
            connection_losses_mean: c.connection_losses_mean,
        }
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn udn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn udn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration holding the built-in defaults.
#[no_mangle]
pub extern "C" fn udn_config_new() -> *mut UdnConfig {
    Box::into_raw(Box::new(UdnConfig {
        inner: SimConfig::default(),
    }))
}

/// Parses config-file text into a new configuration.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn udn_config_parse(text: *const c_char, out: *mut *mut UdnConfig) -> UdnStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(UdnStatus::NullPointer, "null argument");
        }
        let text = match CStr::from_ptr(text).to_str() {
            Ok(t) => t,
            Err(e) => return fail(UdnStatus::InvalidUtf8, e.to_string()),
        };
        match SimConfig::from_config_str(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(UdnConfig { inner }));
                UdnStatus::Ok
            }
            Err(e) => fail(UdnStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must be NULL or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn udn_config_free(cfg: *mut UdnConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Checks every configuration invariant.
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn udn_config_validate(cfg: *const UdnConfig) -> UdnStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(UdnStatus::NullPointer, "null config");
        };
        match validate_config(cfg.inner) {
            Ok(_) => UdnStatus::Ok,
            Err(e) => fail(UdnStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Renders the configuration in config-file syntax. Release the string
/// with [`udn_string_free`].
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn udn_config_to_string(cfg: *const UdnConfig) -> *mut c_char {
    match cfg.as_ref() {
        Some(cfg) => CString::new(cfg.inner.to_config_string())
            .map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("null config");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn udn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Pathloss in dB at `distance_m` under the configuration's link budget.
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn udn_pathloss_db(cfg: *const UdnConfig, distance_m: f64) -> f64 {
    cfg.as_ref().map_or(f64::NAN, |c| pathloss_db(distance_m, &c.inner.link))
}

/// Receiver noise power in dBm.
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn udn_noise_power_dbm(cfg: *const UdnConfig) -> f64 {
    cfg.as_ref().map_or(f64::NAN, |c| noise_power_dbm(&c.inner.link))
}

/// Runs `iterations` Monte Carlo iterations of one grid cell.
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn udn_run_cell(
    cfg: *const UdnConfig,
    point: UdnGridPoint,
    iterations: u32,
    seed: u64,
    crn: bool,
    out: *mut UdnKpiCell,
) -> UdnStatus {
    guard(|| {
        let (Some(cfg), false) = (cfg.as_ref(), out.is_null()) else {
            return fail(UdnStatus::NullPointer, "null argument");
        };
        let opts = RunOptions { crn, parallel: true };
        match run_cell(&cfg.inner, &point.into(), iterations, seed, opts) {
            Ok(cell) => {
                *out = UdnKpiCell::from(&cell);
                UdnStatus::Ok
            }
            Err(e) => fail(UdnStatus::InvalidConfig, e.to_string()),
        }
    })
}

/// Runs iteration `iteration` of a grid cell exactly as [`udn_run_cell`]
/// would, returning the per-run result.
///
/// # Safety
/// `cfg` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn udn_run_iteration(
    cfg: *const UdnConfig,
    point: UdnGridPoint,
    iteration: u32,
    seed: u64,
    crn: bool,
    out: *mut *mut UdnRunResult,
) -> UdnStatus {
    guard(|| {
        let (Some(cfg), false) = (cfg.as_ref(), out.is_null()) else {
            return fail(UdnStatus::NullPointer, "null argument");
        };
        let point: GridPoint = point.into();
        let valid = match validate_config(point.apply(&cfg.inner)) {
            Ok(v) => v,
            Err(e) => return fail(UdnStatus::InvalidConfig, e.to_string()),
        };
        let s = iteration_seed(seed, &point, &valid.scenario.route, iteration, crn);
        let inner = run_iteration(&valid, s, None);
        *out = Box::into_raw(Box::new(UdnRunResult { inner }));
        UdnStatus::Ok
    })
}

/// # Safety
/// `res` must be NULL or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn udn_run_result_free(res: *mut UdnRunResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// # Safety
/// `res` must be a live run-result handle.
#[no_mangle]
pub unsafe extern "C" fn udn_run_result_ho_times(res: *const UdnRunResult) -> u32 {
    res.as_ref().map_or(0, |r| r.inner.ho_times)
}

/// # Safety
/// `res` must be a live run-result handle.
#[no_mangle]
pub unsafe extern "C" fn udn_run_result_connection_losses(res: *const UdnRunResult) -> u32 {
    res.as_ref().map_or(0, |r| r.inner.connection_losses)
}

/// Average handover geometry of the run; NaN without handovers.
///
/// # Safety
/// `res` must be a live run-result handle.
#[no_mangle]
pub unsafe extern "C" fn udn_run_result_ho_avg_geo_db(res: *const UdnRunResult) -> f64 {
    res.as_ref()
        .and_then(|r| r.inner.ho_avg_geo())
        .unwrap_or(f64::NAN)
}

/// Best-cell geometry sampled at handover `index`.
///
/// # Safety
/// `res` must be a live run-result handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn udn_run_result_ho_geo(
    res: *const UdnRunResult,
    index: usize,
    out: *mut f64,
) -> UdnStatus {
    let (Some(res), false) = (res.as_ref(), out.is_null()) else {
        return fail(UdnStatus::NullPointer, "null argument");
    };
    match res.inner.ho_best_geos.get(index) {
        Some(&g) => {
            *out = g;
            UdnStatus::Ok
        }
        None => fail(
            UdnStatus::OutOfRange,
            format!("handover index {index} out of range ({})", res.inner.ho_times),
        ),
    }
}
