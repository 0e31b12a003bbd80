//! C ABI for `wexsys`.
//!
//! Every fallible call returns a [`WxStatus`]. On failure the message is
//! kept per thread and read with [`wx_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wexsys::diagnostics::{classify, gram_matrix, weighted_norm, Regime, WeightedSystemSpec};
use wexsys::dual_system::{
    biorthogonality_inner_product, dual_coefficients, f_n_exact, Arithmetic, DualCoefficientTable,
    ExclusionSet,
};
use wexsys::kernels::{moment_integral, ToleranceConfig};
use wexsys::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WxStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Invalid = 3,
    Index = 4,
    Singular = 5,
    Accuracy = 6,
    Unsupported = 7,
    Numerical = 8,
    Arithmetic = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WxRegime {
    Exact = 0,
    MinimalNotComplete = 1,
    CompleteNotMinimal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WxComplex {
    pub re: f64,
    pub im: f64,
}

/// Exactness window `[lower, upper)` with the regime of the queried weight.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WxVerdict {
    pub regime: WxRegime,
    pub lower: f64,
    pub upper: f64,
}

/// Opaque excluded index set on the trigonometric map.
pub struct WxExclusion(ExclusionSet);

/// Opaque table of dual coefficients.
pub struct WxTable(DualCoefficientTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WxStatus {
    match e {
        Error::Domain(_) => WxStatus::Domain,
        Error::Accuracy { .. } => WxStatus::Accuracy,
        Error::Singular(_) => WxStatus::Singular,
        Error::Arithmetic(_) => WxStatus::Arithmetic,
        Error::Index(_) => WxStatus::Index,
        Error::Unsupported(_) => WxStatus::Unsupported,
        Error::Numerical(_) => WxStatus::Numerical,
        Error::Invalid(_) => WxStatus::Invalid,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    Buffer(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WxStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WxStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("{name} is null"));
            WxStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Buffer(need))) => {
            set_error(format!("buffer too small, {need} bytes required"));
            WxStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".to_string());
            WxStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(ptr: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or(Failure::Null(name))
}

unsafe fn handle<'a, T>(ptr: *const T, name: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(name))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn wx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out_verdict` must be null or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn wx_classify(
    alpha: f64,
    m: usize,
    out_verdict: *mut WxVerdict,
) -> WxStatus {
    guard(|| {
        let slot = out(out_verdict, "out_verdict")?;
        let v = classify(alpha, m)?;
        let regime = match v.regime {
            Regime::Exact => WxRegime::Exact,
            Regime::MinimalNotComplete => WxRegime::MinimalNotComplete,
            Regime::CompleteNotMinimal => WxRegime::CompleteNotMinimal,
        };
        *slot = WxVerdict {
            regime,
            lower: v.window.lower,
            upper: v.window.upper,
        };
        Ok(())
    })
}

/// `∫_0^1 t^beta e^{i theta t} dt` at default tolerances.
///
/// # Safety
/// `out_value` must be null or writable; `out_error` may be null.
#[no_mangle]
pub unsafe extern "C" fn wx_moment_integral(
    beta: f64,
    theta: f64,
    out_value: *mut WxComplex,
    out_error: *mut f64,
) -> WxStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let v = moment_integral(beta, theta, &ToleranceConfig::default())?;
        *slot = WxComplex {
            re: v.value.re,
            im: v.value.im,
        };
        if let Some(e) = out_error.as_mut() {
            *e = v.abs_error_estimate;
        }
        Ok(())
    })
}

/// # Safety
/// `indices` must point to `len` readable values; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_exclusion_new_trig(
    indices: *const i64,
    len: usize,
    out_handle: *mut *mut WxExclusion,
) -> WxStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        if indices.is_null() && len > 0 {
            return Err(Failure::Null("indices"));
        }
        let ints = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(indices, len)
        };
        let set = ExclusionSet::trigonometric(ints)?;
        *slot = Box::into_raw(Box::new(WxExclusion(set)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`wx_exclusion_new_trig`], freed once.
#[no_mangle]
pub unsafe extern "C" fn wx_exclusion_free(handle: *mut WxExclusion) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of excluded indices, or 0 for a null handle.
///
/// # Safety
/// `exclusion` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wx_exclusion_size(exclusion: *const WxExclusion) -> usize {
    exclusion.as_ref().map_or(0, |e| e.0.m())
}

/// Builds the table for `n_lo..=n_hi`.
///
/// # Safety
/// `exclusion` must be a live handle; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_table_new(
    exclusion: *const WxExclusion,
    n_lo: i64,
    n_hi: i64,
    exact: bool,
    out_handle: *mut *mut WxTable,
) -> WxStatus {
    guard(|| {
        let ex = handle(exclusion, "exclusion")?;
        let slot = out(out_handle, "out_handle")?;
        let arithmetic = if exact {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        };
        let table = dual_coefficients(&ex.0, n_lo..=n_hi, arithmetic)?;
        *slot = Box::into_raw(Box::new(WxTable(table)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`wx_table_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn wx_table_free(handle: *mut WxTable) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// `a_{n,j}` with 1-based `j`.
///
/// # Safety
/// `table` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_table_coefficient(
    table: *const WxTable,
    n: i64,
    j: usize,
    out_value: *mut f64,
) -> WxStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let slot = out(out_value, "out_value")?;
        *slot = t.0.coefficient(n, j)?;
        Ok(())
    })
}

/// Exact `a_{n,j}` as a NUL-terminated decimal `p/q` string. The required
/// size including the terminator is written to `out_required` when it is
/// non-null; a buffer that is too small yields `BufferTooSmall`.
///
/// # Safety
/// `table` must be a live handle; `buf` must hold `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wx_table_coefficient_exact(
    table: *const WxTable,
    n: i64,
    j: usize,
    buf: *mut c_char,
    buf_len: usize,
    out_required: *mut usize,
) -> WxStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let text = t.0.coefficient_exact(n, j)?.to_string();
        let need = text.len() + 1;
        if let Some(r) = out_required.as_mut() {
            *r = need;
        }
        if buf.is_null() || buf_len < need {
            return Err(Failure::Buffer(need));
        }
        std::ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Exact vanishing order of `f_n` at the origin, searched up to `max_order`.
///
/// # Safety
/// `exclusion` must be a live handle; `out_order` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_vanishing_order(
    exclusion: *const WxExclusion,
    n: i64,
    max_order: u32,
    out_order: *mut u32,
) -> WxStatus {
    guard(|| {
        let ex = handle(exclusion, "exclusion")?;
        let slot = out(out_order, "out_order")?;
        *slot = f_n_exact(&ex.0, n)?.vanishing_order(max_order)?;
        Ok(())
    })
}

/// `⟨f_n / t^α, t^α r_m⟩`.
///
/// # Safety
/// `exclusion` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_biorthogonality(
    exclusion: *const WxExclusion,
    n: i64,
    m: i64,
    out_value: *mut WxComplex,
) -> WxStatus {
    guard(|| {
        let ex = handle(exclusion, "exclusion")?;
        let slot = out(out_value, "out_value")?;
        let v = biorthogonality_inner_product(&ex.0, n, m)?;
        *slot = WxComplex { re: v.re, im: v.im };
        Ok(())
    })
}

/// Smallest eigenvalue of the Gram matrix truncated to `|n| <= truncation`.
///
/// # Safety
/// `exclusion` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_frame_lower_bound(
    exclusion: *const WxExclusion,
    alpha: f64,
    truncation: usize,
    out_value: *mut f64,
) -> WxStatus {
    guard(|| {
        let ex = handle(exclusion, "exclusion")?;
        let slot = out(out_value, "out_value")?;
        let spec = WeightedSystemSpec::new(alpha, ex.0.clone())?;
        *slot =
            gram_matrix(&spec, truncation, &ToleranceConfig::default())?.smallest_eigenvalue()?;
        Ok(())
    })
}

/// `‖t^α e^{2πint}‖` in `L²(0,1)`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wx_weighted_norm(alpha: f64, n: i64, out_value: *mut f64) -> WxStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        *slot = weighted_norm(alpha, n)?;
        Ok(())
    })
}
