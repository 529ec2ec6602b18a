//! C ABI over `rectwalk`.
//!
//! A `RectwalkProblem` is built once per aspect ratio and caches the map
//! parameter, so repeated ratio queries at different exponents skip the
//! inversion. Every fallible call returns a `RectwalkStatus`; on failure the
//! message is kept per thread and can be copied out with
//! `rectwalk_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rectwalk::error::Error;
use rectwalk::hitting::{
    compute_ratio, ratio_closed_rw, ratio_quadrature, HittingExponent, RatioMethod,
};
use rectwalk::scmap::{alpha_from_aspect, rect_dims, AspectRatio, ModulusAlpha};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectwalkStatus {
    Ok = 0,
    /// Argument outside the mathematical domain (aspect < 1, exponent <= 0, ...).
    Domain = 1,
    /// Null pointer or unknown enum value.
    InvalidArgument = 2,
    /// A numerical routine missed its tolerance.
    Accuracy = 3,
    /// Internal panic caught at the boundary.
    Internal = 4,
}

/// Values accepted by the `method` argument of `rectwalk_problem_ratio`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectwalkMethod {
    Quadrature = 0,
    /// Closed form, exponent 1 only.
    Closed = 1,
    Leading = 2,
    TwoTerm = 3,
}

impl RectwalkMethod {
    fn from_raw(m: i32) -> Option<Self> {
        match m {
            0 => Some(Self::Quadrature),
            1 => Some(Self::Closed),
            2 => Some(Self::Leading),
            3 => Some(Self::TwoTerm),
            _ => None,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RectwalkRatio {
    /// `R = P(end) / P(side)`.
    pub value: f64,
    pub err_estimate: f64,
    /// `R / (1 + R)`.
    pub end_probability: f64,
    /// Set when an asymptotic formula was used at small aspect ratio.
    pub regime_warning: bool,
}

/// Opaque handle.
pub struct RectwalkProblem {
    aspect: AspectRatio,
    alpha: ModulusAlpha,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RectwalkStatus, msg: impl Into<String>) -> RectwalkStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> RectwalkStatus {
    let status = match e {
        Error::Domain(_) => RectwalkStatus::Domain,
        Error::Accuracy { .. } | Error::Integrand { .. } => RectwalkStatus::Accuracy,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> RectwalkStatus) -> RectwalkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(RectwalkStatus::Internal, "internal panic"),
    }
}

/// Builds a problem for an `aspect x 1` rectangle, `aspect >= 1`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_new(
    aspect: f64,
    out: *mut *mut RectwalkProblem,
) -> RectwalkStatus {
    guard(|| {
        if out.is_null() {
            return fail(RectwalkStatus::InvalidArgument, "out is null");
        }
        let built = AspectRatio::new(aspect).and_then(|r| Ok((r, alpha_from_aspect(r)?)));
        match built {
            Ok((aspect, alpha)) => {
                *out = Box::into_raw(Box::new(RectwalkProblem { aspect, alpha }));
                RectwalkStatus::Ok
            }
            Err(e) => {
                *out = ptr::null_mut();
                from_error(e)
            }
        }
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must come from `rectwalk_problem_new` and not be used after.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_free(problem: *mut RectwalkProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_aspect(
    problem: *const RectwalkProblem,
    out: *mut f64,
) -> RectwalkStatus {
    match (problem.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.aspect.value();
            RectwalkStatus::Ok
        }
        _ => fail(RectwalkStatus::InvalidArgument, "null argument"),
    }
}

/// `α - 1` for the map parameter.
///
/// # Safety
/// `problem` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_alpha_excess(
    problem: *const RectwalkProblem,
    out: *mut f64,
) -> RectwalkStatus {
    match (problem.as_ref(), out.is_null()) {
        (Some(p), false) => {
            *out = p.alpha.excess();
            RectwalkStatus::Ok
        }
        _ => fail(RectwalkStatus::InvalidArgument, "null argument"),
    }
}

/// Edge lengths of the image rectangle before scaling (`a / c` is the aspect).
///
/// # Safety
/// `problem` must be a live handle or null; `a` and `c` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_dims(
    problem: *const RectwalkProblem,
    a: *mut f64,
    c: *mut f64,
) -> RectwalkStatus {
    guard(|| match (problem.as_ref(), a.is_null() || c.is_null()) {
        (Some(p), false) => {
            let rect = rect_dims(p.alpha);
            *a = rect.a;
            *c = rect.c;
            RectwalkStatus::Ok
        }
        _ => fail(RectwalkStatus::InvalidArgument, "null argument"),
    })
}

/// End-versus-side ratio for hitting exponent `exponent` (1 for Brownian
/// motion, 0.625 for the self-avoiding walk). `method` is a
/// `RectwalkMethod` value; `rel_tol` applies to quadrature only.
///
/// # Safety
/// `problem` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_problem_ratio(
    problem: *const RectwalkProblem,
    exponent: f64,
    method: i32,
    rel_tol: f64,
    out: *mut RectwalkRatio,
) -> RectwalkStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(RectwalkStatus::InvalidArgument, "problem is null");
        };
        if out.is_null() {
            return fail(RectwalkStatus::InvalidArgument, "out is null");
        }
        let Some(method) = RectwalkMethod::from_raw(method) else {
            return fail(
                RectwalkStatus::InvalidArgument,
                format!("unknown method {method}"),
            );
        };
        let b = match HittingExponent::new(exponent) {
            Ok(b) => b,
            Err(e) => return from_error(e),
        };
        let res = match method {
            RectwalkMethod::Quadrature => ratio_quadrature(p.alpha, b, rel_tol),
            RectwalkMethod::Closed if b.is_brownian() => Ok(ratio_closed_rw(p.alpha)),
            RectwalkMethod::Closed => compute_ratio(p.aspect, b, RatioMethod::ClosedRw, rel_tol),
            RectwalkMethod::Leading => compute_ratio(p.aspect, b, RatioMethod::Leading, rel_tol),
            RectwalkMethod::TwoTerm => compute_ratio(p.aspect, b, RatioMethod::TwoTerm, rel_tol),
        };
        match res {
            Ok(r) => {
                *out = RectwalkRatio {
                    value: r.value,
                    err_estimate: r.err_estimate,
                    end_probability: r.end_probability(),
                    regime_warning: r.regime_warning,
                };
                RectwalkStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length without
/// the NUL, or 0 if there is none. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for writing `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rectwalk_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static version string.
#[no_mangle]
pub extern "C" fn rectwalk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
