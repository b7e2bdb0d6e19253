//! C ABI over the dualris environment.
//!
//! Environments are opaque `DrisEnv` handles created by [`dris_env_new`]
//! and released by [`dris_env_free`]. Every fallible call returns a
//! [`DrisStatus`]; on failure a description is kept per thread and can be
//! copied out with [`dris_last_error_message`]. Panics never cross the
//! boundary and are reported as `DRIS_STATUS_INTERNAL`.
//!
//! Handles are not synchronized: use one handle from one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dualris::env::{Env, StepResult};
use dualris::scenario::ScenarioConfig;
use dualris::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    BadLength = 4,
    BadAction = 5,
    NoActiveEpisode = 6,
    EpisodeDone = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Scalar outcome of one step. Per-node rates are available through
/// [`dris_env_last_rates`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrisStepOut {
    pub reward: f64,
    /// 1 once the final slot has been played.
    pub done: u8,
    /// 1 if the move was reverted for leaving the area.
    pub boundary: u8,
    /// Minimum over nodes of the running time-averaged rate.
    pub min_rate: f64,
    /// Downlink transmit power after projection.
    pub power_used: f64,
    pub clamp_count: u32,
}

/// Opaque environment handle.
pub struct DrisEnv {
    env: Env,
    last_rates: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> DrisStatus {
    match e {
        Error::NoActiveEpisode => DrisStatus::NoActiveEpisode,
        Error::EpisodeDone => DrisStatus::EpisodeDone,
        Error::ActionLength { .. } => DrisStatus::BadLength,
        Error::NonFiniteAction(_) => DrisStatus::BadAction,
        Error::Parse(_) | Error::Invariant { .. } | Error::UnknownKey(_) => {
            DrisStatus::InvalidConfig
        }
        _ => DrisStatus::Internal,
    }
}

fn fail(status: DrisStatus, msg: impl Into<String>) -> DrisStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> DrisStatus) -> DrisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == DrisStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(DrisStatus::Internal, "internal panic"),
    }
}

/// Write `src` into a caller buffer of capacity `cap`.
///
/// # Safety
/// `dst` must be valid for `cap` writes when non-null.
unsafe fn copy_out(src: &[f64], dst: *mut f64, cap: usize) -> DrisStatus {
    if dst.is_null() {
        return fail(DrisStatus::NullPointer, "output buffer is null");
    }
    if cap < src.len() {
        return fail(
            DrisStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    DrisStatus::Ok
}

/// Create an environment from a JSON configuration. A null or empty string
/// selects the defaults.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` must be a
/// valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn dris_env_new(
    config_json: *const c_char,
    out: *mut *mut DrisEnv,
) -> DrisStatus {
    guard(|| {
        if out.is_null() {
            return fail(DrisStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = if config_json.is_null() {
            ""
        } else {
            match CStr::from_ptr(config_json).to_str() {
                Ok(s) => s,
                Err(e) => return fail(DrisStatus::InvalidUtf8, e.to_string()),
            }
        };
        let env = match ScenarioConfig::from_json(text).and_then(Env::new) {
            Ok(env) => env,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        *out = Box::into_raw(Box::new(DrisEnv {
            env,
            last_rates: Vec::new(),
        }));
        DrisStatus::Ok
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `env` must be null or a handle from [`dris_env_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dris_env_free(env: *mut DrisEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Observation vector length, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dris_env_obs_len(env: *const DrisEnv) -> usize {
    env.as_ref().map_or(0, |e| e.env.layout().obs_len())
}

/// Action vector length, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dris_env_action_len(env: *const DrisEnv) -> usize {
    env.as_ref().map_or(0, |e| e.env.layout().action_len())
}

/// Number of IoT nodes, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dris_env_num_nodes(env: *const DrisEnv) -> usize {
    env.as_ref().map_or(0, |e| e.env.layout().k)
}

/// Start an episode and write the initial observation.
///
/// # Safety
/// `env` must be a live handle and `obs_out` valid for `obs_cap` writes.
#[no_mangle]
pub unsafe extern "C" fn dris_env_reset(
    env: *mut DrisEnv,
    seed: u64,
    obs_out: *mut f64,
    obs_cap: usize,
) -> DrisStatus {
    guard(|| {
        let Some(h) = env.as_mut() else {
            return fail(DrisStatus::NullPointer, "env is null");
        };
        if obs_out.is_null() {
            return fail(DrisStatus::NullPointer, "obs_out is null");
        }
        let need = h.env.layout().obs_len();
        if obs_cap < need {
            return fail(
                DrisStatus::BufferTooSmall,
                format!("obs_out holds {obs_cap} values, {need} needed"),
            );
        }
        match h.env.reset(seed) {
            Ok(obs) => {
                h.last_rates.clear();
                copy_out(&obs.to_vec(), obs_out, obs_cap)
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Advance one slot. The buffer size is checked before the environment
/// changes, so `DRIS_STATUS_BUFFER_TOO_SMALL` leaves the episode untouched.
///
/// # Safety
/// `env` must be a live handle, `action` valid for `action_len` reads,
/// `obs_out` valid for `obs_cap` writes and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dris_env_step(
    env: *mut DrisEnv,
    action: *const f64,
    action_len: usize,
    obs_out: *mut f64,
    obs_cap: usize,
    out: *mut DrisStepOut,
) -> DrisStatus {
    guard(|| {
        let Some(h) = env.as_mut() else {
            return fail(DrisStatus::NullPointer, "env is null");
        };
        if action.is_null() || obs_out.is_null() || out.is_null() {
            return fail(
                DrisStatus::NullPointer,
                "action, obs_out and out must be non-null",
            );
        }
        let need = h.env.layout().obs_len();
        if obs_cap < need {
            return fail(
                DrisStatus::BufferTooSmall,
                format!("obs_out holds {obs_cap} values, {need} needed"),
            );
        }
        let action = slice::from_raw_parts(action, action_len);
        match h.env.step(action) {
            Ok(StepResult {
                obs,
                reward,
                done,
                info,
            }) => {
                *out = DrisStepOut {
                    reward,
                    done: u8::from(done),
                    boundary: u8::from(info.boundary),
                    min_rate: info.min_rate,
                    power_used: info.power_used,
                    clamp_count: info.clamp_count as u32,
                };
                h.last_rates = info.rates;
                copy_out(&obs.to_vec(), obs_out, obs_cap)
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Copy the per-node weighted rates of the most recent step (K values).
///
/// # Safety
/// `env` must be a live handle and `rates_out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn dris_env_last_rates(
    env: *const DrisEnv,
    rates_out: *mut f64,
    cap: usize,
) -> DrisStatus {
    guard(|| {
        let Some(h) = env.as_ref() else {
            return fail(DrisStatus::NullPointer, "env is null");
        };
        if h.last_rates.is_empty() {
            return fail(DrisStatus::NoActiveEpisode, "no step taken since reset");
        }
        copy_out(&h.last_rates, rates_out, cap)
    })
}

/// Copy this thread's last error message as a NUL-terminated string,
/// truncating to `cap - 1` bytes. Returns the full message length
/// excluding the terminator, so callers can size a buffer by calling with
/// `cap = 0`.
///
/// # Safety
/// `buf` must be null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn dris_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dris_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
