//! C ABI over the walk laboratory.
//!
//! The surface is deliberately small: create a precision context, list or
//! run identity checks (results come back as the same JSON documents the CLI
//! writes), evaluate a walk density pointwise, and free what was handed out.
//! Every boundary catches panics — nothing unwinds into C — and every
//! fallible call returns a [`WalklabStatus`] with the result delivered
//! through an out-pointer.  Strings returned by this library must be
//! released with [`walklab_string_free`], contexts with
//! [`walklab_context_free`].
//!
//! The matching header is generated into `include/walklab.h` at build time.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use walklab_core::precision::{to_decimal_string, PrecisionContext};
use walklab_core::registry::{list_checks, run_checks_configured};
use walklab_core::report::render_json;
use walklab_core::walks::{density, WalkId};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WalklabStatus {
    /// The call succeeded and any out-pointer was filled.
    Ok = 0,
    /// A pointer was null, a string was not UTF-8, or a value was out of range.
    InvalidArgument = 1,
    /// The computation itself reported an error (domain, convergence, ...).
    EvaluationError = 2,
    /// A panic was caught at the boundary; the out-pointers are untouched.
    Panic = 3,
}

/// Opaque precision context.  One context may serve many calls; it is
/// immutable after creation and safe to share across threads.
pub struct WalklabContext {
    ctx: PrecisionContext,
}

fn take_str<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(p) }.to_str().ok()
}

fn give_string(s: String, out: *mut *mut c_char) -> WalklabStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            WalklabStatus::Ok
        }
        Err(_) => WalklabStatus::EvaluationError,
    }
}

fn guarded<F: FnOnce() -> WalklabStatus>(f: F) -> WalklabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(WalklabStatus::Panic)
}

/// Create a context carrying `digits` decimal digits of working precision
/// (5 ≤ digits ≤ 10000).  On success `*out` owns the context.
#[no_mangle]
pub extern "C" fn walklab_context_new(
    digits: u32,
    out: *mut *mut WalklabContext,
) -> WalklabStatus {
    if out.is_null() {
        return WalklabStatus::InvalidArgument;
    }
    guarded(|| match PrecisionContext::new(digits) {
        Ok(ctx) => {
            let boxed = Box::new(WalklabContext { ctx });
            unsafe { *out = Box::into_raw(boxed) };
            WalklabStatus::Ok
        }
        Err(_) => WalklabStatus::InvalidArgument,
    })
}

/// Release a context created by [`walklab_context_new`].  Null is a no-op.
#[no_mangle]
pub extern "C" fn walklab_context_free(ctx: *mut WalklabContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// JSON array of the registered checks matching `filter` (a glob over ids;
/// pass "*" for all).  Each element carries id, status, cost, default_digits
/// and description.  `*out_json` must be freed with [`walklab_string_free`].
#[no_mangle]
pub extern "C" fn walklab_list_checks(
    filter: *const c_char,
    out_json: *mut *mut c_char,
) -> WalklabStatus {
    if out_json.is_null() {
        return WalklabStatus::InvalidArgument;
    }
    let Some(filter) = take_str(filter) else {
        return WalklabStatus::InvalidArgument;
    };
    guarded(|| {
        let items: Vec<String> = list_checks(filter)
            .iter()
            .map(|d| {
                format!(
                    "{{\"id\":{},\"status\":{},\"cost\":{},\"default_digits\":{},\"description\":{}}}",
                    json_str(d.id),
                    json_str(d.status.as_str()),
                    json_str(d.cost.as_str()),
                    d.default_digits(),
                    json_str(d.description)
                )
            })
            .collect();
        give_string(format!("[{}]", items.join(",")), out_json)
    })
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Run every check matching `filter` at the context's precision with the
/// given seed, single-threaded, and return the full JSON report (the same
/// schema the CLI writes).  Individual check failures are recorded in the
/// report, not raised; the call fails only on invalid input.
#[no_mangle]
pub extern "C" fn walklab_run_checks(
    ctx: *const WalklabContext,
    filter: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> WalklabStatus {
    if ctx.is_null() || out_json.is_null() {
        return WalklabStatus::InvalidArgument;
    }
    let Some(filter) = take_str(filter) else {
        return WalklabStatus::InvalidArgument;
    };
    let digits = unsafe { &*ctx }.ctx.digits();
    guarded(|| {
        let results = run_checks_configured(filter, Some(digits), seed, 1);
        give_string(render_json(digits, seed, &results), out_json)
    })
}

/// Evaluate a walk density pointwise.  `walk` is one of "p2", "p3", "p4",
/// "phat"; `x` must lie strictly inside the support.  The value is returned
/// as a decimal string at the context's precision (densities are computed in
/// multiple precision; a double would throw most of that away).
#[no_mangle]
pub extern "C" fn walklab_density(
    ctx: *const WalklabContext,
    walk: *const c_char,
    x: f64,
    out_value: *mut *mut c_char,
) -> WalklabStatus {
    if ctx.is_null() || out_value.is_null() {
        return WalklabStatus::InvalidArgument;
    }
    let Some(walk) = take_str(walk).and_then(WalkId::from_name) else {
        return WalklabStatus::InvalidArgument;
    };
    if !x.is_finite() {
        return WalklabStatus::InvalidArgument;
    }
    let ctx = &unsafe { &*ctx }.ctx;
    guarded(|| {
        let xv = ctx.real_from_f64(x);
        match density(ctx, walk, &xv) {
            Ok(v) => give_string(to_decimal_string(&v, ctx.working_digits()), out_value),
            Err(_) => WalklabStatus::EvaluationError,
        }
    })
}

/// Release a string returned by this library.  Null is a no-op.
#[no_mangle]
pub extern "C" fn walklab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
