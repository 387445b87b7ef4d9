//! C ABI over the helios dispatch simulator.
//!
//! Objects cross the boundary as opaque handles created by `helios_*_new`,
//! `helios_*_load` or `helios_simulate` and released by the matching
//! `helios_*_free`. Every fallible call returns a [`HeliosStatus`]; on failure
//! [`helios_last_error`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use helios::baselines::StrategyKind;
use helios::engine::{run_closed_loop, DispatchTrace};
use helios::io::{self, report, Config};
use helios::{Error, Scenario};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeliosStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    BudgetExceeded = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Simulator configuration.
pub struct HeliosConfig(Config);

/// Hourly load and resource data.
pub struct HeliosScenario(Scenario);

/// Closed-loop result of one strategy.
pub struct HeliosTrace(DispatchTrace);

/// One simulated hour.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeliosStepRecord {
    pub hour: usize,
    pub load_kw: f64,
    pub renewable_available_kw: f64,
    pub renewable_used_kw: f64,
    pub p_ch_kw: f64,
    pub p_dis_kw: f64,
    pub backup_kw: f64,
    pub curtailed_kw: f64,
    pub soc_start_kwh: f64,
    pub soc_kwh: f64,
    pub cost_battery: f64,
    pub cost_backup: f64,
    pub cost_penalty: f64,
    pub cost_total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HeliosStatus {
    match e {
        Error::Parse { .. } | Error::Config { .. } => HeliosStatus::Parse,
        Error::Io(_) => HeliosStatus::Io,
        Error::BudgetExceeded { .. } => HeliosStatus::BudgetExceeded,
        _ => HeliosStatus::InvalidArgument,
    }
}

struct Fail(HeliosStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HeliosStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus thread-local message.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> HeliosStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeliosStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HeliosStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            HeliosStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next `helios_*` call on the same thread.
#[no_mangle]
pub extern "C" fn helios_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn helios_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn helios_config_new(out: *mut *mut HeliosConfig) -> HeliosStatus {
    guard(|| put(out, HeliosConfig(Config::default())))
}

/// Configuration from a `key = value` file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_config_load(
    path: *const c_char,
    out: *mut *mut HeliosConfig,
) -> HeliosStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let cfg = Config::load(Path::new(path))?;
        cfg.validate()?;
        put(out, HeliosConfig(cfg))
    })
}

/// Sets one configuration key using the config-file syntax, e.g. `("horizon", "6")`.
/// The configuration is unchanged on failure.
///
/// # Safety
/// `cfg` must come from this library; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn helios_config_set(
    cfg: *mut HeliosConfig,
    key: *const c_char,
    value: *const c_char,
) -> HeliosStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        cfg.0.set(key, value)?;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn helios_config_free(cfg: *mut HeliosConfig) {
    free(cfg)
}

/// Renewable power (kW) predicted by the configured surrogate.
///
/// # Safety
/// `cfg` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_renewable_predict(
    cfg: *const HeliosConfig,
    irradiance: f64,
    wind_speed: f64,
    out: *mut f64,
) -> HeliosStatus {
    guard(|| {
        let cfg = ref_arg(cfg, "cfg")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = cfg.0.renewable.predict(irradiance, wind_speed);
        Ok(())
    })
}

/// Loads an hourly CSV (`hour,irradiance_kwh_m2,wind_ms,load_kw[,renewable_kw]`).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_scenario_load_csv(
    path: *const c_char,
    out: *mut *mut HeliosScenario,
) -> HeliosStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(out, HeliosScenario(io::load_hourly_csv(Path::new(path))?))
    })
}

/// Synthetic scenario using the profile in `cfg`.
///
/// # Safety
/// `cfg` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_scenario_synthetic(
    cfg: *const HeliosConfig,
    days: usize,
    seed: u64,
    out: *mut *mut HeliosScenario,
) -> HeliosStatus {
    guard(|| {
        let cfg = ref_arg(cfg, "cfg")?;
        put(
            out,
            HeliosScenario(io::generate_synthetic(days, &cfg.0.synthetic, seed)?),
        )
    })
}

/// Scenario from caller-owned arrays of length `steps`; the data is copied.
///
/// # Safety
/// Each array must hold `steps` readable doubles (may be NULL when `steps` is 0).
#[no_mangle]
pub unsafe extern "C" fn helios_scenario_from_arrays(
    start_hour: usize,
    steps: usize,
    irradiance: *const f64,
    wind_speed: *const f64,
    load: *const f64,
    out: *mut *mut HeliosScenario,
) -> HeliosStatus {
    guard(|| {
        let copy = |p: *const f64, what: &str| -> Result<Vec<f64>, Fail> {
            if steps == 0 {
                return Ok(Vec::new());
            }
            if p.is_null() {
                return Err(null(what));
            }
            Ok(std::slice::from_raw_parts(p, steps).to_vec())
        };
        let s = Scenario::new(
            start_hour,
            steps,
            copy(irradiance, "irradiance")?,
            copy(wind_speed, "wind_speed")?,
            copy(load, "load")?,
        )?;
        put(out, HeliosScenario(s))
    })
}

/// Number of hours in the scenario; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn helios_scenario_steps(s: *const HeliosScenario) -> usize {
    s.as_ref().map_or(0, |s| s.0.steps())
}

/// # Safety
/// `s` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn helios_scenario_free(s: *mut HeliosScenario) {
    free(s)
}

/// Closed-loop simulation of the named strategy (e.g. `"eg_mpc"`).
///
/// # Safety
/// Handles must come from this library; `strategy` must be NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_simulate(
    scenario: *const HeliosScenario,
    cfg: *const HeliosConfig,
    strategy: *const c_char,
    seed: u64,
    out: *mut *mut HeliosTrace,
) -> HeliosStatus {
    guard(|| {
        let scenario = ref_arg(scenario, "scenario")?;
        let cfg = ref_arg(cfg, "cfg")?;
        let kind: StrategyKind = str_arg(strategy, "strategy")?.parse()?;
        let trace = run_closed_loop(&scenario.0, kind, &cfg.0, seed)?;
        put(out, HeliosTrace(trace))
    })
}

/// Number of records; 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn helios_trace_len(t: *const HeliosTrace) -> usize {
    t.as_ref().map_or(0, |t| t.0.records.len())
}

/// Total realised cost.
///
/// # Safety
/// `t` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_trace_total_cost(
    t: *const HeliosTrace,
    out: *mut f64,
) -> HeliosStatus {
    guard(|| {
        let t = ref_arg(t, "trace")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = t.0.total_cost;
        Ok(())
    })
}

/// Copies record `index` into `out`.
///
/// # Safety
/// `t` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn helios_trace_record(
    t: *const HeliosTrace,
    index: usize,
    out: *mut HeliosStepRecord,
) -> HeliosStatus {
    guard(|| {
        let t = ref_arg(t, "trace")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = t.0.records.get(index).ok_or_else(|| {
            Fail(
                HeliosStatus::OutOfRange,
                format!("record {index} of {}", t.0.records.len()),
            )
        })?;
        *out = HeliosStepRecord {
            hour: r.hour,
            load_kw: r.load,
            renewable_available_kw: r.renewable_available,
            renewable_used_kw: r.renewable_used,
            p_ch_kw: r.p_ch,
            p_dis_kw: r.p_dis,
            backup_kw: r.backup,
            curtailed_kw: r.curtailed,
            soc_start_kwh: r.soc_start,
            soc_kwh: r.soc,
            cost_battery: r.cost.battery,
            cost_backup: r.cost.backup,
            cost_penalty: r.cost.penalty,
            cost_total: r.cost.total,
        };
        Ok(())
    })
}

/// Writes the per-hour trace CSV.
///
/// # Safety
/// `t` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn helios_trace_write_csv(
    t: *const HeliosTrace,
    path: *const c_char,
) -> HeliosStatus {
    guard(|| {
        let t = ref_arg(t, "trace")?;
        let path = str_arg(path, "path")?;
        let file = std::fs::File::create(path).map_err(Error::from)?;
        report::write_trace_csv(&t.0, std::io::BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `t` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn helios_trace_free(t: *mut HeliosTrace) {
    free(t)
}
