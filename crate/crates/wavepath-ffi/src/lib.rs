//! C ABI over the planner.
//!
//! Handles are opaque; every call returns a `WpStatus`. On failure the message
//! of the most recent error on the calling thread is available from
//! `wp_last_error` until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wavepath::config::{parse_config, Task};
use wavepath::planner::path_length;
use wavepath::{Error, Outcome, Planner};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Config = -3,
    Numerical = -4,
    Panic = -5,
    Unsupported = -6,
    Internal = -255,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpOutcome {
    Running = 0,
    Reached = 1,
    StepBudgetExhausted = 2,
    BumpLost = 3,
}

impl From<Option<Outcome>> for WpOutcome {
    fn from(o: Option<Outcome>) -> Self {
        match o {
            None => WpOutcome::Running,
            Some(Outcome::Reached) => WpOutcome::Reached,
            Some(Outcome::StepBudgetExhausted) => WpOutcome::StepBudgetExhausted,
            Some(Outcome::BumpLost) => WpOutcome::BumpLost,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpSummary {
    pub outcome: WpOutcome,
    pub steps: u64,
    pub wavefronts: u64,
    pub path_length: f64,
}

/// Planner state. Create with `wp_planner_new`, release with `wp_planner_free`.
pub struct WpPlanner {
    inner: Planner,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let s = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(status: WpStatus, msg: impl ToString) -> WpStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> WpStatus {
    if e.is_numerical() {
        WpStatus::Numerical
    } else if matches!(e, Error::Io(_)) {
        WpStatus::Internal
    } else {
        WpStatus::Config
    }
}

fn guard(f: impl FnOnce() -> WpStatus) -> WpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WpStatus::Panic, "panic inside wavepath"))
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a planner from scenario JSON (a plan task). Warm-up runs here.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_planner_new(config_json: *const c_char, out: *mut *mut WpPlanner) -> WpStatus {
    guard(|| {
        if config_json.is_null() || out.is_null() {
            return fail(WpStatus::NullPointer, "null argument");
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(e) => return fail(WpStatus::InvalidUtf8, e),
        };
        let cfg = match parse_config(text) {
            Ok(c) => c,
            Err(e) => return fail(WpStatus::Config, e),
        };
        let (Task::Plan, Some(start), Some(target)) = (cfg.task, cfg.start, cfg.target) else {
            return fail(WpStatus::Unsupported, "only plan tasks can be driven through this interface");
        };
        match Planner::new(cfg.manifold, start, target, &cfg.setup) {
            Ok(p) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(WpPlanner { inner: p })) };
                WpStatus::Ok
            }
            Err(e) => fail(status_of(&e), e),
        }
    })
}

/// Advance one step and report where the run stands.
///
/// # Safety
/// `planner` must come from `wp_planner_new`; `outcome` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wp_planner_step(planner: *mut WpPlanner, outcome: *mut WpOutcome) -> WpStatus {
    guard(|| {
        // SAFETY: caller passes a live handle or NULL.
        let Some(p) = (unsafe { planner.as_mut() }) else {
            return fail(WpStatus::NullPointer, "null planner");
        };
        match p.inner.step() {
            Ok(o) => {
                if !outcome.is_null() {
                    // SAFETY: non-null, caller-owned.
                    unsafe { *outcome = o.into() };
                }
                WpStatus::Ok
            }
            Err(e) => fail(status_of(&e), e),
        }
    })
}

/// Current bump center in lattice coordinates.
///
/// # Safety
/// `planner` must come from `wp_planner_new`; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_planner_bump_center(planner: *const WpPlanner, x: *mut u32, y: *mut u32) -> WpStatus {
    guard(|| {
        // SAFETY: caller passes a live handle or NULL.
        let Some(p) = (unsafe { planner.as_ref() }) else {
            return fail(WpStatus::NullPointer, "null planner");
        };
        if x.is_null() || y.is_null() {
            return fail(WpStatus::NullPointer, "null output");
        }
        let (cx, cy) = p.inner.manifold().coords(p.inner.attractor().center());
        // SAFETY: non-null, caller-owned.
        unsafe {
            *x = cx as u32;
            *y = cy as u32;
        }
        WpStatus::Ok
    })
}

/// Step until the run ends and fill `summary`.
///
/// # Safety
/// `planner` must come from `wp_planner_new`; `summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_planner_run(planner: *mut WpPlanner, summary: *mut WpSummary) -> WpStatus {
    guard(|| {
        // SAFETY: caller passes a live handle or NULL.
        let Some(p) = (unsafe { planner.as_mut() }) else {
            return fail(WpStatus::NullPointer, "null planner");
        };
        if summary.is_null() {
            return fail(WpStatus::NullPointer, "null summary");
        }
        loop {
            match p.inner.step() {
                Ok(Some(_)) => break,
                Ok(None) => {}
                Err(e) => return fail(status_of(&e), e),
            }
        }
        let s = WpSummary {
            outcome: p.inner.outcome().into(),
            steps: p.inner.trajectory().len() as u64,
            wavefronts: p.inner.wavefronts_used() as u64,
            path_length: path_length(p.inner.manifold(), p.inner.path()),
        };
        // SAFETY: non-null, caller-owned.
        unsafe { *summary = s };
        WpStatus::Ok
    })
}

/// Release a planner. NULL is ignored.
///
/// # Safety
/// `planner` must come from `wp_planner_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wp_planner_free(planner: *mut WpPlanner) {
    if !planner.is_null() {
        // SAFETY: pointer came from Box::into_raw in wp_planner_new.
        drop(unsafe { Box::from_raw(planner) });
    }
}
