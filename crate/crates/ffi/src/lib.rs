//! C ABI for the wakesize toolkit.
//!
//! Every function returns a [`WsStatus`]; on failure the message is kept per
//! thread and read with [`ws_last_error`]. Handles are opaque and released
//! with their `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use wakesize::grid::GridCase;
use wakesize::lipschitz::{extreme_bounds, ExtremeOptions};
use wakesize::pipeline::with_envelopes;
use wakesize::sizing::{
    algorithm2, Aggregate, ExtremeSlopes, IterationOptions, Objective, SizingProblem, SizingSolution, SizingStatus,
};
use wakesize::uncertainty::{AmbiguityRadii, ScenarioSet};
use wakesize::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Solver = 5,
    Panic = 6,
    /// Output buffer too small; the required length is still reported.
    BufferTooSmall = 7,
}

/// Outcome of a sizing run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsSizingStatus {
    Converged = 0,
    Infeasible = 1,
    IterationLimit = 2,
}

/// Sizing settings. A NaN budget means no budget.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsSizeOptions {
    pub eps0: f64,
    pub g_cap: f64,
    pub budget: f64,
    pub tol_x: f64,
    pub max_iterations: usize,
    pub node_limit: usize,
    pub seed: u64,
}

/// Grid case with wake envelopes filled in.
pub struct WsCase(GridCase);

pub struct WsScenarios(ScenarioSet);

pub struct WsSolution(SizingSolution);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> WsStatus {
    match e {
        Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::WeightMismatch(..) => {
            WsStatus::InvalidArgument
        }
        Error::Io { .. } => WsStatus::Io,
        Error::Parse { .. } => WsStatus::Parse,
        _ => WsStatus::Solver,
    }
}

fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            WsStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            WsStatus::Panic
        }
    }
}

fn fail(e: Error) -> WsStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> WsStatus {
    set_error(format!("{what} is null"));
    WsStatus::NullPointer
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, WsStatus> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("path is not UTF-8".into());
        WsStatus::InvalidArgument
    })?;
    Ok(PathBuf::from(s))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, WsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Defaults: eps0 0.05, g_cap 220 MWh, no budget, tol_x 0.1 MW, 50
/// iterations, 20000 search nodes, seed 0.
#[no_mangle]
pub extern "C" fn ws_size_options_default() -> WsSizeOptions {
    WsSizeOptions {
        eps0: 0.05,
        g_cap: 220.0,
        budget: f64::NAN,
        tol_x: 0.1,
        max_iterations: 50,
        node_limit: 20_000,
        seed: 0,
    }
}

/// Loads a case JSON and fits any missing wake envelopes.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_case_load(path: *const c_char, out: *mut *mut WsCase) -> WsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        let case = GridCase::load(&path).and_then(|c| with_envelopes(&c, None, false)).map_err(fail)?;
        *out = Box::into_raw(Box::new(WsCase(case)));
        Ok(())
    })
}

/// # Safety
/// `case` must come from [`ws_case_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_case_free(case: *mut WsCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Length of the capacity vector: wind sites, then storage power, then
/// storage energy.
///
/// # Safety
/// `case` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_case_num_capacities(case: *const WsCase, out: *mut usize) -> WsStatus {
    guard(|| {
        let case = deref(case, "case")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = case.0.capacity_layout().len();
        Ok(())
    })
}

/// Reads a scenario CSV against `case`.
///
/// # Safety
/// `case` must be live, `path` NUL-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_scenarios_load(
    case: *const WsCase,
    path: *const c_char,
    out: *mut *mut WsScenarios,
) -> WsStatus {
    guard(|| {
        let case = deref(case, "case")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path)?;
        let set = ScenarioSet::read_csv(&path, &case.0).map_err(fail)?;
        *out = Box::into_raw(Box::new(WsScenarios(set)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`ws_scenarios_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_scenarios_free(s: *mut WsScenarios) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be live; `normal` and `extreme` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_scenarios_count(s: *const WsScenarios, normal: *mut usize, extreme: *mut usize) -> WsStatus {
    guard(|| {
        let s = deref(s, "scenarios")?;
        if normal.is_null() || extreme.is_null() {
            return Err(null("out"));
        }
        *normal = s.0.normal().len();
        *extreme = s.0.extreme().len();
        Ok(())
    })
}

/// Computes the shedding slope bounds and runs the iterative sizing.
///
/// # Safety
/// Handles must be live, `opts` readable, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_size(
    case: *const WsCase,
    scenarios: *const WsScenarios,
    opts: *const WsSizeOptions,
    out: *mut *mut WsSolution,
) -> WsStatus {
    guard(|| {
        let case = &deref(case, "case")?.0;
        let set = &deref(scenarios, "scenarios")?.0;
        let o = *deref(opts, "options")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(o.tol_x > 0.0) || o.max_iterations == 0 {
            set_error("tol_x must be positive and max_iterations at least 1".into());
            return Err(WsStatus::InvalidArgument);
        }
        let bounds_opts = ExtremeOptions { node_limit: o.node_limit, seed: o.seed, ..ExtremeOptions::default() };
        let bounds = extreme_bounds(case, &bounds_opts).map_err(fail)?;
        let prob = SizingProblem {
            radii: AmbiguityRadii::for_case(o.eps0, case, set).map_err(fail)?,
            case: case.clone(),
            scenarios: set.clone(),
            extreme: ExtremeSlopes::from(&bounds),
            g_cap: o.g_cap,
            objective: Objective::FuelCost { budget: (!o.budget.is_nan()).then_some(o.budget) },
            wake: true,
            aggregate: Aggregate::Average,
        };
        let iter = IterationOptions { tol_x: o.tol_x, max_iterations: o.max_iterations };
        let sol = algorithm2(&prob, &iter).map_err(fail)?;
        *out = Box::into_raw(Box::new(WsSolution(sol)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`ws_size`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_solution_free(s: *mut WsSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_solution_status(s: *const WsSolution, out: *mut WsSizingStatus) -> WsStatus {
    guard(|| {
        let s = deref(s, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match s.0.status {
            SizingStatus::Converged => WsSizingStatus::Converged,
            SizingStatus::Infeasible => WsSizingStatus::Infeasible,
            SizingStatus::IterationLimit => WsSizingStatus::IterationLimit,
        };
        Ok(())
    })
}

/// Copies the capacities into `buf` and stores their count in `len_out`.
/// Returns `BufferTooSmall` when `len` is short; the count is still set.
///
/// # Safety
/// `buf` must be null or valid for `len` doubles; `len_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_solution_capacities(
    s: *const WsSolution,
    buf: *mut f64,
    len: usize,
    len_out: *mut usize,
) -> WsStatus {
    guard(|| {
        let s = deref(s, "solution")?;
        if len_out.is_null() {
            return Err(null("len_out"));
        }
        let x = &s.0.x;
        *len_out = x.len();
        if x.len() > len || (buf.is_null() && !x.is_empty()) {
            set_error(format!("need room for {} values", x.len()));
            return Err(WsStatus::BufferTooSmall);
        }
        std::ptr::copy_nonoverlapping(x.as_ptr(), buf, x.len());
        Ok(())
    })
}

/// Investment (CNY) and fuel-cost term (CNY); NaN when infeasible.
///
/// # Safety
/// `s` must be live; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_solution_costs(s: *const WsSolution, investment: *mut f64, fuel: *mut f64) -> WsStatus {
    guard(|| {
        let s = deref(s, "solution")?;
        if investment.is_null() || fuel.is_null() {
            return Err(null("out"));
        }
        *investment = s.0.investment;
        *fuel = s.0.fuel;
        Ok(())
    })
}

/// Number of master solves performed.
///
/// # Safety
/// `s` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_solution_iterations(s: *const WsSolution, out: *mut usize) -> WsStatus {
    guard(|| {
        let s = deref(s, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.0.trace.len();
        Ok(())
    })
}
