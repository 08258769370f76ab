//! C interface to the `tripartite` library.
//!
//! States live behind an opaque [`TpState`] handle created by one of the
//! `tp_state_new_*` constructors and released with [`tp_state_free`]. Every
//! fallible call returns a [`TpStatus`]; on failure the message is available
//! from [`tp_last_error_message`] on the same thread. Outputs are written
//! only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use tripartite::bell::{smax_ghz_closed, smax_w, svetlichny_value, Branch, MeasurementSettings};
use tripartite::entanglement::{entanglement_profile, ghz_profile_closed, w_profile_closed};
use tripartite::montecarlo::estimate_svetlichny;
use tripartite::optimize::{multistart_maximize, OptimizationConfig};
use tripartite::qcore::{
    ghz_state, make_state, w_state, GhzClassParams, ThreeQubitPureState, UnitVector, WClassParams,
};
use tripartite::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    WrongFamily = 4,
    Numerical = 5,
    Panic = 6,
}

/// Closed-form branch reported by [`tp_smax_closed`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpBranch {
    None = 0,
    Low = 1,
    High = 2,
}

/// Opaque three-qubit pure state.
pub struct TpState {
    state: ThreeQubitPureState,
    origin: Origin,
}

enum Origin {
    Ghz(GhzClassParams),
    W(WClassParams),
    Raw,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpProfile {
    pub tau: f64,
    pub c12: f64,
    pub c23: f64,
    pub c31: f64,
    pub c1_23: f64,
    pub c2_13: f64,
    pub c3_12: f64,
    pub monogamy_residual: f64,
}

/// Six measurement directions in the order a, a', b, b', c, c'.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpSettings {
    pub polar: [f64; 6],
    pub azimuth: [f64; 6],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TpEstimate {
    pub mean: f64,
    pub stderr: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TpStatus {
    match e {
        Error::NotNormalized { .. } | Error::ZeroState => TpStatus::NotNormalized,
        Error::WrongFamily(_) => TpStatus::WrongFamily,
        Error::InvalidParameter(_) | Error::NonFinite { .. } | Error::InvalidQubit(_) => {
            TpStatus::InvalidArgument
        }
        _ => TpStatus::Numerical,
    }
}

struct Fail(TpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn new_handle(out: *mut *mut TpState, make: impl FnOnce() -> Result<TpState, Fail>) -> TpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let handle = Box::into_raw(Box::new(make()?));
        out.write(handle);
        Ok(())
    })
}

fn to_settings(s: &TpSettings) -> Result<MeasurementSettings, Fail> {
    let mut v = [UnitVector::Z; 6];
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = UnitVector::new(s.polar[k], s.azimuth[k])?;
    }
    Ok(MeasurementSettings::from_array(v))
}

fn from_settings(ms: &MeasurementSettings) -> TpSettings {
    let v = ms.to_array();
    TpSettings {
        polar: v.map(|u| u.polar()),
        azimuth: v.map(|u| u.azimuth()),
    }
}

/// GHZ-class state with `theta, theta3` in `[0, pi/2]`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_state_new_ghz(theta: f64, theta3: f64, out: *mut *mut TpState) -> TpStatus {
    new_handle(out, || {
        let p = GhzClassParams::new(theta, theta3)?;
        Ok(TpState {
            state: ghz_state(&p),
            origin: Origin::Ghz(p),
        })
    })
}

/// W-class state with non-negative, normalized amplitudes.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_state_new_w(
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut TpState,
) -> TpStatus {
    new_handle(out, || {
        let p = WClassParams::new(alpha, beta, gamma)?;
        Ok(TpState {
            state: w_state(&p),
            origin: Origin::W(p),
        })
    })
}

/// State from 16 doubles: the real and imaginary parts of the amplitudes of
/// `|000>, |001>, ..., |111>`, interleaved.
///
/// # Safety
/// `re_im` must point to 16 readable doubles and `out` must be valid for
/// writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_state_new_raw(
    re_im: *const f64,
    normalize: bool,
    out: *mut *mut TpState,
) -> TpStatus {
    new_handle(out, || {
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        let v = std::slice::from_raw_parts(re_im, 16);
        let amps: [Complex64; 8] = std::array::from_fn(|k| Complex64::new(v[2 * k], v[2 * k + 1]));
        Ok(TpState {
            state: make_state(amps, normalize)?,
            origin: Origin::Raw,
        })
    })
}

/// Release a handle; null is ignored.
///
/// # Safety
/// `state` must be null or a handle from a constructor that was not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn tp_state_free(state: *mut TpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Entanglement profile, in closed form for family states.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn tp_state_profile(state: *const TpState, out: *mut TpProfile) -> TpStatus {
    guard(|| {
        let h = deref(state, "state")?;
        let p = match &h.origin {
            Origin::Ghz(p) => ghz_profile_closed(p),
            Origin::W(p) => w_profile_closed(p),
            Origin::Raw => entanglement_profile(&h.state)?,
        };
        let profile = TpProfile {
            tau: p.tau,
            c12: p.c12,
            c23: p.c23,
            c31: p.c31,
            c1_23: p.c1_23,
            c2_13: p.c2_13,
            c3_12: p.c3_12,
            monogamy_residual: p.monogamy_residual,
        };
        emit(out, profile, "out")
    })
}

/// `|<S>|` at the given settings.
///
/// # Safety
/// `state` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_svetlichny_value(
    state: *const TpState,
    settings: *const TpSettings,
    out: *mut f64,
) -> TpStatus {
    guard(|| {
        let h = deref(state, "state")?;
        let ms = to_settings(deref(settings, "settings")?)?;
        emit(out, svetlichny_value(&h.state, &ms), "out")
    })
}

/// Multistart maximum of `|<S>|`; `out_settings` may be null.
///
/// # Safety
/// `state` must be a live handle, `out_value` writable and `out_settings`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn tp_maximize(
    state: *const TpState,
    n_starts: u32,
    seed: u64,
    out_value: *mut f64,
    out_settings: *mut TpSettings,
) -> TpStatus {
    guard(|| {
        let h = deref(state, "state")?;
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let cfg = OptimizationConfig {
            n_starts: n_starts as usize,
            ..OptimizationConfig::with_seed(seed)
        };
        let r = multistart_maximize(&h.state, &cfg)?;
        out_value.write(r.best_value);
        if !out_settings.is_null() {
            out_settings.write(from_settings(&r.best_settings));
        }
        Ok(())
    })
}

/// Closed-form maximum for states built from family parameters; fails with
/// `WrongFamily` for raw states. `out_branch` is `Low`/`High` for GHZ-class
/// states and `None` for W-class ones, and may be null.
///
/// # Safety
/// `state` must be a live handle, `out_value` writable and `out_branch`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn tp_smax_closed(
    state: *const TpState,
    out_value: *mut f64,
    out_branch: *mut TpBranch,
) -> TpStatus {
    guard(|| {
        let h = deref(state, "state")?;
        let (value, branch) = match &h.origin {
            Origin::Ghz(p) => {
                let c = smax_ghz_closed(&ghz_profile_closed(p))?;
                let b = match c.branch {
                    Branch::Low => TpBranch::Low,
                    Branch::High => TpBranch::High,
                };
                (c.value, b)
            }
            Origin::W(p) => (smax_w(&w_profile_closed(p))?.value, TpBranch::None),
            Origin::Raw => {
                return Err(Fail(
                    TpStatus::WrongFamily,
                    "closed form needs a state built from family parameters".into(),
                ))
            }
        };
        emit(out_value, value, "out_value")?;
        if !out_branch.is_null() {
            out_branch.write(branch);
        }
        Ok(())
    })
}

/// Finite-shot estimate of `<S>` with `shots` per correlator.
///
/// # Safety
/// `state` must be a live handle, `settings` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_estimate_svetlichny(
    state: *const TpState,
    settings: *const TpSettings,
    shots: u64,
    seed: u64,
    out: *mut TpEstimate,
) -> TpStatus {
    guard(|| {
        let h = deref(state, "state")?;
        let ms = to_settings(deref(settings, "settings")?)?;
        let e = estimate_svetlichny(&h.state, &ms, shots, seed)?;
        emit(
            out,
            TpEstimate {
                mean: e.mean,
                stderr: e.stderr,
            },
            "out",
        )
    })
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn tp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
