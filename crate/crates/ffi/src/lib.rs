//! C interface to `gsdesign`.
//!
//! Every function returns a [`GsdStatus`]. On failure a message is kept per
//! thread and can be read with [`gsd_last_error_message`]. Designs are opaque
//! handles created by [`gsd_design_create`] or [`gsd_design_from_json`] and
//! released with [`gsd_design_free`]. Strings returned by the library are
//! released with [`gsd_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gsdesign::document::DesignDocument;
use gsdesign::{performance, Design, Error, Family, TrialParams};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An input was out of its domain or malformed.
    InvalidArgument = 2,
    /// A numerical search or integration failed.
    Numerical = 3,
    /// The caller's buffer is shorter than the number of stages.
    BufferTooSmall = 4,
    /// An internal error was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsdFamily {
    HaybittlePeto = 0,
    WangTsiatis = 1,
    InnerWedge = 2,
    DoubleTriangular = 3,
    PowerFamily = 4,
    Triangular = 5,
}

fn family_from_code(code: u32) -> Option<Family> {
    Some(match code {
        0 => Family::HaybittlePeto,
        1 => Family::WangTsiatis,
        2 => Family::InnerWedge,
        3 => Family::DoubleTriangular,
        4 => Family::PowerFamily,
        5 => Family::Triangular,
        _ => return None,
    })
}

impl From<Family> for GsdFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::HaybittlePeto => GsdFamily::HaybittlePeto,
            Family::WangTsiatis => GsdFamily::WangTsiatis,
            Family::InnerWedge => GsdFamily::InnerWedge,
            Family::DoubleTriangular => GsdFamily::DoubleTriangular,
            Family::PowerFamily => GsdFamily::PowerFamily,
            Family::Triangular => GsdFamily::Triangular,
        }
    }
}

/// Trial parameters. `omega` is read only when `has_omega` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsdParams {
    pub stages: usize,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub ratio: f64,
    pub omega: f64,
    pub has_omega: bool,
}

impl From<GsdParams> for TrialParams {
    fn from(p: GsdParams) -> Self {
        TrialParams {
            stages: p.stages,
            delta: p.delta,
            alpha: p.alpha,
            beta: p.beta,
            sigma0: p.sigma0,
            sigma1: p.sigma1,
            ratio: p.ratio,
            omega: p.has_omega.then_some(p.omega),
        }
    }
}

/// Expected sample size characteristics of a design.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GsdSummary {
    pub p_reject_null: f64,
    pub ess_null: f64,
    pub p_reject_alt: f64,
    pub ess_alt: f64,
    pub max_ess: f64,
    pub argmax_tau: f64,
    pub max_n: f64,
}

/// Opaque design handle.
pub struct GsdDesign {
    inner: Design,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: GsdStatus, message: impl Into<String>) -> GsdStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> GsdStatus {
    let status = if e.is_validation() {
        GsdStatus::InvalidArgument
    } else {
        GsdStatus::Numerical
    };
    fail(status, e.to_string())
}

/// Runs `f`, clearing the last error first and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> GsdStatus) -> GsdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(GsdStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn design_ref<'a>(design: *const GsdDesign) -> Result<&'a Design, GsdStatus> {
    if design.is_null() {
        Err(fail(GsdStatus::NullPointer, "design handle is null"))
    } else {
        Ok(&(*design).inner)
    }
}

unsafe fn write<T>(out: *mut T, value: T) -> GsdStatus {
    if out.is_null() {
        return fail(GsdStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    GsdStatus::Ok
}

unsafe fn write_slice(out: *mut f64, len: usize, values: &[f64]) -> GsdStatus {
    if out.is_null() {
        return fail(GsdStatus::NullPointer, "output buffer is null");
    }
    if len < values.len() {
        return fail(
            GsdStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    GsdStatus::Ok
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message describing the last failure on this thread, or null if the last
/// call succeeded. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn gsd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gsd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fills `out` with the default parameters (L = 3, delta 0.2, alpha 0.05,
/// beta 0.2, unit variances, equal allocation, no omega).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gsd_params_default(out: *mut GsdParams) -> GsdStatus {
    guard(|| {
        let d = TrialParams::default();
        write(
            out,
            GsdParams {
                stages: d.stages,
                delta: d.delta,
                alpha: d.alpha,
                beta: d.beta,
                sigma0: d.sigma0,
                sigma1: d.sigma1,
                ratio: d.ratio,
                omega: 0.5,
                has_omega: false,
            },
        )
    })
}

/// Builds a design of `family`, one of the `GsdFamily` values. On success
/// `*out` owns a new handle.
///
/// # Safety
/// `params` must be null or point to a valid `GsdParams`; `out` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_create(
    family: u32,
    params: *const GsdParams,
    out: *mut *mut GsdDesign,
) -> GsdStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return fail(GsdStatus::NullPointer, "params or out is null");
        }
        out.write(ptr::null_mut());
        let Some(family) = family_from_code(family) else {
            return fail(GsdStatus::InvalidArgument, format!("unknown design family code {family}"));
        };
        match family.design(&TrialParams::from(*params)) {
            Ok(inner) => {
                out.write(Box::into_raw(Box::new(GsdDesign { inner })));
                GsdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a design handle. Null is ignored.
///
/// # Safety
/// `design` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_free(design: *mut GsdDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_family(design: *const GsdDesign, out: *mut GsdFamily) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        write(out, d.family.into())
    })
}

/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_stages(design: *const GsdDesign, out: *mut usize) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        write(out, d.params.stages)
    })
}

/// Real-valued per-stage group size in arm 0 and arm 1.
///
/// # Safety
/// `design` must be a live handle or null; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_group_size(
    design: *const GsdDesign,
    arm0: *mut f64,
    arm1: *mut f64,
) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        if arm1.is_null() {
            return fail(GsdStatus::NullPointer, "output pointer is null");
        }
        let s = write(arm0, d.schedule.group_size);
        if s == GsdStatus::Ok {
            arm1.write(d.schedule.arm1_group_size);
        }
        s
    })
}

/// Maximum possible total sample size.
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_max_n(design: *const GsdDesign, out: *mut f64) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        write(out, d.max_n())
    })
}

/// Type-I error rate and power attained by the design.
///
/// # Safety
/// `design` must be a live handle or null; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_attained(
    design: *const GsdDesign,
    alpha: *mut f64,
    power: *mut f64,
) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        if power.is_null() {
            return fail(GsdStatus::NullPointer, "output pointer is null");
        }
        let s = write(alpha, d.attained_alpha);
        if s == GsdStatus::Ok {
            power.write(d.attained_power);
        }
        s
    })
}

/// Copies the lower (acceptance or futility) and upper (rejection or
/// efficacy) boundaries into buffers of at least `len` values.
///
/// # Safety
/// `design` must be a live handle or null; buffers null or writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_boundaries(
    design: *const GsdDesign,
    lower: *mut f64,
    upper: *mut f64,
    len: usize,
) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        let s = write_slice(lower, len, d.bounds.futility());
        if s != GsdStatus::Ok {
            return s;
        }
        write_slice(upper, len, d.bounds.efficacy())
    })
}

/// Copies the information levels into a buffer of at least `len` values.
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_information(design: *const GsdDesign, out: *mut f64, len: usize) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        write_slice(out, len, &d.schedule.info)
    })
}

/// P(reject H0) at effect `tau`.
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_rejection_probability(
    design: *const GsdDesign,
    tau: f64,
    out: *mut f64,
) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        match d.rejection_probability(tau) {
            Ok(v) => write(out, v),
            Err(e) => from_error(e),
        }
    })
}

/// E(N) at effect `tau`.
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_expected_sample_size(
    design: *const GsdDesign,
    tau: f64,
    out: *mut f64,
) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        match d.expected_sample_size(tau) {
            Ok(v) => write(out, v),
            Err(e) => from_error(e),
        }
    })
}

/// Error rates and expected sample sizes, including the maximum over tau.
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_summary(design: *const GsdDesign, out: *mut GsdSummary) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        match performance::summarize(d) {
            Ok(s) => write(
                out,
                GsdSummary {
                    p_reject_null: s.p_reject_null,
                    ess_null: s.ess_null,
                    p_reject_alt: s.p_reject_alt,
                    ess_alt: s.ess_alt,
                    max_ess: s.max_ess,
                    argmax_tau: s.argmax_tau,
                    max_n: s.max_n,
                },
            ),
            Err(e) => from_error(e),
        }
    })
}

/// Serialises the design as a JSON design document. Free `*out` with
/// [`gsd_string_free`].
///
/// # Safety
/// `design` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_to_json(design: *const GsdDesign, out: *mut *mut c_char) -> GsdStatus {
    guard(|| {
        let d = try_status!(design_ref(design));
        let json = DesignDocument::new(d, None, None).to_json();
        match CString::new(json) {
            Ok(s) => write(out, s.into_raw()),
            Err(_) => fail(GsdStatus::Internal, "document contains a NUL byte"),
        }
    })
}

/// Rebuilds a design from a JSON design document.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gsd_design_from_json(json: *const c_char, out: *mut *mut GsdDesign) -> GsdStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(GsdStatus::NullPointer, "json or out is null");
        }
        out.write(ptr::null_mut());
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(GsdStatus::InvalidArgument, "document is not UTF-8"),
        };
        match DesignDocument::from_json(text).and_then(|doc| doc.to_design()) {
            Ok(inner) => {
                out.write(Box::into_raw(Box::new(GsdDesign { inner })));
                GsdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
