//! C interface to `janus-core`.
//!
//! Handles are opaque and owned by the caller; every `*_new`/`*_parse`/
//! `*_apply` result must be released with the matching `*_free`. Functions
//! return a [`JanusStatus`]; on failure `janus_last_error` describes it.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use janus_core::graph::{random_config, Constraint};
use janus_core::observables::{Meter, Observable, Value};
use janus_core::steps::{Drift, Dynamics, Rules};
use janus_core::{Configuration, Error};

/// A configuration: a circle of named vertices.
pub struct JanusConfig(Configuration);

/// A dynamics together with its rule conventions.
pub struct JanusDynamics {
    dynamics: Dynamics,
    rules: Rules,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JanusStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Parse = 3,
    InvalidConfig = 4,
    Layers = 5,
    Domain = 6,
    Json = 7,
    Missing = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JanusDrift {
    AlongPort = 0,
    AgainstPort = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JanusStatus {
    match e {
        Error::Parse(_) => JanusStatus::Parse,
        Error::Invalid(_) => JanusStatus::InvalidConfig,
        Error::Layers { .. } => JanusStatus::Layers,
        Error::Json(_) => JanusStatus::Json,
        _ => JanusStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), JanusStatus>) -> JanusStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JanusStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            JanusStatus::Panic
        }
    }
}

fn fail(e: Error) -> JanusStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, JanusStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(JanusStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        JanusStatus::Utf8
    })
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, JanusStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        JanusStatus::NullPointer
    })
}

fn out_ok<T>(p: *mut T) -> Result<(), JanusStatus> {
    if p.is_null() {
        set_error("null output pointer".into());
        Err(JanusStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn janus_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Seeded random configuration. `one_of_each` requires at least one
/// layer-1 particle on each port.
#[no_mangle]
pub unsafe extern "C" fn janus_config_random(
    size: usize,
    layers: usize,
    density: f64,
    seed: u64,
    one_of_each: bool,
    out: *mut *mut JanusConfig,
) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let c = if one_of_each { Constraint::OneOfEach } else { Constraint::None };
        let x = random_config(size, layers, density, seed, c).map_err(fail)?;
        *out = Box::into_raw(Box::new(JanusConfig(x)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_config_from_json(json: *const c_char, out: *mut *mut JanusConfig) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let x = Configuration::from_json(str_arg(json)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(JanusConfig(x)));
        Ok(())
    })
}

/// Writes a newly allocated JSON string; release it with `janus_string_free`.
#[no_mangle]
pub unsafe extern "C" fn janus_config_to_json(cfg: *const JanusConfig, out: *mut *mut c_char) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let x = handle(cfg)?;
        let s = CString::new(x.0.to_json()).expect("json has no nul bytes");
        *out = s.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_config_clone(cfg: *const JanusConfig, out: *mut *mut JanusConfig) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let x = handle(cfg)?;
        *out = Box::into_raw(Box::new(JanusConfig(x.0.clone())));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_config_len(cfg: *const JanusConfig, out: *mut usize) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        *out = handle(cfg)?.0.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_config_layers(cfg: *const JanusConfig, out: *mut usize) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        *out = handle(cfg)?.0.layers();
        Ok(())
    })
}

/// Port bit masks of vertex `index`; bit `j-1` is layer `j`.
#[no_mangle]
pub unsafe extern "C" fn janus_config_bits(
    cfg: *const JanusConfig,
    index: usize,
    a: *mut u8,
    b: *mut u8,
) -> JanusStatus {
    guard(|| {
        out_ok(a)?;
        out_ok(b)?;
        let x = &handle(cfg)?.0;
        if index >= x.len() {
            set_error(format!("vertex {index} out of range for size {}", x.len()));
            return Err(JanusStatus::Domain);
        }
        let v = x.vertex(index);
        *a = v.a;
        *b = v.b;
        Ok(())
    })
}

/// Whether two configurations are the same named graph up to rotation.
#[no_mangle]
pub unsafe extern "C" fn janus_config_equal(
    x: *const JanusConfig,
    y: *const JanusConfig,
    out: *mut bool,
) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        *out = handle(x)?.0.same_graph(&handle(y)?.0);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_config_free(cfg: *mut JanusConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Parses a dynamics such as `"sqrt_tau,I"` with default rules.
#[no_mangle]
pub unsafe extern "C" fn janus_dynamics_parse(spec: *const c_char, out: *mut *mut JanusDynamics) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let d: Dynamics = str_arg(spec)?.parse().map_err(|e| fail(Error::Parse(e)))?;
        *out = Box::into_raw(Box::new(JanusDynamics { dynamics: d, rules: Rules::default() }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_dynamics_inverse(d: *const JanusDynamics, out: *mut *mut JanusDynamics) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let d = handle(d)?;
        let inv = JanusDynamics { dynamics: d.dynamics.inverse(), rules: d.rules.clone() };
        *out = Box::into_raw(Box::new(inv));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_dynamics_set_drift(d: *mut JanusDynamics, drift: JanusDrift) -> JanusStatus {
    guard(|| {
        let d = d.as_mut().ok_or_else(|| {
            set_error("null handle".into());
            JanusStatus::NullPointer
        })?;
        d.rules.drift = match drift {
            JanusDrift::AlongPort => Drift::AlongPort,
            JanusDrift::AgainstPort => Drift::AgainstPort,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_dynamics_free(d: *mut JanusDynamics) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Applies `d` `steps` times to `cfg` and returns a new configuration.
#[no_mangle]
pub unsafe extern "C" fn janus_apply(
    d: *const JanusDynamics,
    cfg: *const JanusConfig,
    steps: usize,
    out: *mut *mut JanusConfig,
) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let d = handle(d)?;
        let x = &handle(cfg)?.0;
        let y = d.dynamics.apply(x, steps, &d.rules).map_err(fail)?;
        *out = Box::into_raw(Box::new(JanusConfig(y)));
        Ok(())
    })
}

/// Measures an observable key such as `"S_global"` or `"S_local_avg_r5"`.
/// Returns `Missing` when the value is undefined (e.g. `d_f` without patterns).
#[no_mangle]
pub unsafe extern "C" fn janus_measure(cfg: *const JanusConfig, key: *const c_char, out: *mut f64) -> JanusStatus {
    guard(|| {
        out_ok(out)?;
        let x = &handle(cfg)?.0;
        let k: Observable = str_arg(key)?.parse().map_err(|e| fail(Error::Parse(e)))?;
        match Meter::default().measure(x, k).map_err(fail)? {
            Value::Missing => {
                set_error(format!("{k} is undefined for this configuration"));
                Err(JanusStatus::Missing)
            }
            v => {
                *out = v.as_f64().expect("numeric");
                Ok(())
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn janus_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
