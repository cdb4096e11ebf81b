//! C ABI over `soliton-core`.
//!
//! Objects are opaque handles released with their `_free` function. Every call
//! returns a [`SolitonStatus`]; on failure [`soliton_last_error`] describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use num_rational::BigRational;
use soliton_core::bounds::{check_one, BoundId, DEFAULT_GRID};
use soliton_core::funnel::lower_wall;
use soliton_core::funnel::upper_wall;
use soliton_core::profile_ode::{solve_bowl, solve_wing, ProfileCurve, SolverConfig, WingSolution};
use soliton_core::subsolution::{derive_polynomial, nonpositive_on_ray, SignVerdict};
use soliton_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Integration = 4,
    Construction = 5,
    Range = 6,
    Numerical = 7,
    Hypothesis = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonBranch {
    Lower = 0,
    Upper = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonSign {
    Nonpositive = 0,
    Nonnegative = 1,
    Change = 2,
}

/// One point `(s, r, V, alpha)` of a generating curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolitonSample {
    pub s: f64,
    pub r: f64,
    pub v: f64,
    pub alpha: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolitonBoundResult {
    pub min_margin: f64,
    pub worst_r: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub grid_size: usize,
    pub passed: bool,
}

/// Opaque winglike solution.
pub struct SolitonWing(WingSolution);

/// Opaque sampled curve.
pub struct SolitonCurve(ProfileCurve);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(e: &Error) -> SolitonStatus {
    match e {
        Error::Domain(_) => SolitonStatus::Domain,
        Error::Integration { .. } => SolitonStatus::Integration,
        Error::Construction(_) => SolitonStatus::Construction,
        Error::Range(_) => SolitonStatus::Range,
        Error::Reparametrization(_)
        | Error::Quadrature(_)
        | Error::Fit(_)
        | Error::ModelMismatch(_) => SolitonStatus::Numerical,
        Error::Hypothesis(_) => SolitonStatus::Hypothesis,
        Error::InvalidParameter(_) | Error::Parse(_) => SolitonStatus::InvalidParameter,
        Error::Io(_) => SolitonStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SolitonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SolitonStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            SolitonStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            SolitonStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn inp<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

fn config(tol: f64, r_max: f64) -> Result<SolverConfig, Fail> {
    let cfg = SolverConfig::default().with_tol(tol).with_r_max(r_max);
    cfg.validate()?;
    Ok(cfg)
}

/// Message of the last failed call on this thread; empty when none. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn soliton_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn soliton_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version"),
        };
    VERSION.as_ptr()
}

/// Solves the wing of dimension `n` and aperture `aperture` up to radius `r_max`.
///
/// # Safety
/// `out_wing` must be a valid pointer; it receives a handle to free with [`soliton_wing_free`].
#[no_mangle]
pub unsafe extern "C" fn soliton_wing_solve(
    n: usize,
    aperture: f64,
    tol: f64,
    r_max: f64,
    out_wing: *mut *mut SolitonWing,
) -> SolitonStatus {
    guard(|| {
        let slot = out(out_wing, "out_wing")?;
        *slot = ptr::null_mut();
        let w = solve_wing(n, aperture, &config(tol, r_max)?)?;
        *slot = Box::into_raw(Box::new(SolitonWing(w)));
        Ok(())
    })
}

/// # Safety
/// `wing` must be null or a handle from [`soliton_wing_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn soliton_wing_free(wing: *mut SolitonWing) {
    if !wing.is_null() {
        drop(Box::from_raw(wing));
    }
}

/// Radius of the horizontal tangent and depth below the waist.
///
/// # Safety
/// `wing` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_wing_turning(
    wing: *const SolitonWing,
    out_r_star: *mut f64,
    out_depth: *mut f64,
) -> SolitonStatus {
    guard(|| {
        let w = &inp(wing, "wing")?.0;
        *out(out_r_star, "out_r_star")? = w.r_star;
        *out(out_depth, "out_depth")? = w.depth;
        Ok(())
    })
}

/// Copies one branch of the wing into a new curve handle.
///
/// # Safety
/// `wing` must be a live handle; `out_curve` receives a handle to free with [`soliton_curve_free`].
#[no_mangle]
pub unsafe extern "C" fn soliton_wing_branch(
    wing: *const SolitonWing,
    branch: SolitonBranch,
    out_curve: *mut *mut SolitonCurve,
) -> SolitonStatus {
    guard(|| {
        let w = &inp(wing, "wing")?.0;
        let slot = out(out_curve, "out_curve")?;
        let c = match branch {
            SolitonBranch::Lower => w.lower.clone(),
            SolitonBranch::Upper => w.upper.clone(),
        };
        *slot = Box::into_raw(Box::new(SolitonCurve(c)));
        Ok(())
    })
}

/// Solves the bowl of dimension `n` up to radius `r_max`.
///
/// # Safety
/// `out_curve` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soliton_bowl_solve(
    n: usize,
    tol: f64,
    r_max: f64,
    out_curve: *mut *mut SolitonCurve,
) -> SolitonStatus {
    guard(|| {
        let slot = out(out_curve, "out_curve")?;
        *slot = ptr::null_mut();
        let c = solve_bowl(n, &config(tol, r_max)?)?;
        *slot = Box::into_raw(Box::new(SolitonCurve(c)));
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a live curve handle.
#[no_mangle]
pub unsafe extern "C" fn soliton_curve_free(curve: *mut SolitonCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle and `out_len` valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_curve_len(
    curve: *const SolitonCurve,
    out_len: *mut usize,
) -> SolitonStatus {
    guard(|| {
        *out(out_len, "out_len")? = inp(curve, "curve")?.0.len();
        Ok(())
    })
}

/// # Safety
/// `curve` must be a live handle and `out_sample` valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_curve_sample(
    curve: *const SolitonCurve,
    index: usize,
    out_sample: *mut SolitonSample,
) -> SolitonStatus {
    guard(|| {
        let c = &inp(curve, "curve")?.0;
        let slot = out(out_sample, "out_sample")?;
        let p = c.samples.get(index).ok_or_else(|| {
            Error::Range(format!(
                "sample index {index} out of range (len {})",
                c.len()
            ))
        })?;
        *slot = SolitonSample {
            s: p.s,
            r: p.r,
            v: p.v,
            alpha: p.alpha,
        };
        Ok(())
    })
}

/// Dense output at arc length `s`.
///
/// # Safety
/// `curve` must be a live handle and `out_sample` valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_curve_state_at(
    curve: *const SolitonCurve,
    s: f64,
    out_sample: *mut SolitonSample,
) -> SolitonStatus {
    guard(|| {
        let c = &inp(curve, "curve")?.0;
        let slot = out(out_sample, "out_sample")?;
        let p = c.state_at(s)?;
        *slot = SolitonSample {
            s: p.s,
            r: p.r,
            v: p.v,
            alpha: p.alpha,
        };
        Ok(())
    })
}

/// Lower and upper funnel walls at `r >= r0` (unshifted funnel).
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_funnel_walls(
    n: usize,
    r0: f64,
    lambda: f64,
    r: f64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> SolitonStatus {
    guard(|| {
        let lo = out(out_lower, "out_lower")?;
        let hi = out(out_upper, "out_upper")?;
        let f = soliton_core::funnel::Funnel::new(n, r0, lambda)?;
        f.walls(r)?;
        *lo = lower_wall(n, r0, lambda, r);
        *hi = upper_wall(n, r);
        Ok(())
    })
}

/// Number of bound identifiers accepted by [`soliton_bound_check`].
#[no_mangle]
pub extern "C" fn soliton_bound_count() -> usize {
    BoundId::ALL.len()
}

/// Name of bound `id` as a static NUL-terminated string, or null when out of range.
#[no_mangle]
pub extern "C" fn soliton_bound_name(id: usize) -> *const c_char {
    static NAMES: std::sync::OnceLock<Vec<CString>> = std::sync::OnceLock::new();
    let names = NAMES.get_or_init(|| {
        BoundId::ALL
            .iter()
            .map(|b| CString::new(b.name()).unwrap())
            .collect()
    });
    names.get(id).map_or(ptr::null(), |c| c.as_ptr())
}

/// Checks bound `id` (an index below [`soliton_bound_count`]) along the wing up to `r_max`.
///
/// # Safety
/// `wing` must be a live handle and `out_result` valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_bound_check(
    wing: *const SolitonWing,
    id: usize,
    r_max: f64,
    quad_tol: f64,
    out_result: *mut SolitonBoundResult,
) -> SolitonStatus {
    guard(|| {
        let w = &inp(wing, "wing")?.0;
        let slot = out(out_result, "out_result")?;
        let bound = *BoundId::ALL
            .get(id)
            .ok_or_else(|| Error::InvalidParameter(format!("bound id {id} out of range")))?;
        let rep = check_one(w, bound, r_max, quad_tol, DEFAULT_GRID);
        *slot = SolitonBoundResult {
            min_margin: rep.min_margin,
            worst_r: rep.worst_r,
            r_lo: rep.r_range.0,
            r_hi: rep.r_range.1,
            grid_size: rep.grid_size,
            passed: rep.passed(),
        };
        Ok(())
    })
}

/// Exact sign of the subsolution polynomial for `R* = num / den` on `[R*, inf)`.
///
/// On a sign change the bracket is written to `out_lo`, `out_hi`; otherwise both are NaN.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn soliton_subsol_verdict(
    n: usize,
    r_star_num: i64,
    r_star_den: i64,
    out_sign: *mut SolitonSign,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> SolitonStatus {
    guard(|| {
        let sign = out(out_sign, "out_sign")?;
        let lo = out(out_lo, "out_lo")?;
        let hi = out(out_hi, "out_hi")?;
        if r_star_den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()).into());
        }
        let r = BigRational::new(BigInt::from(r_star_num), BigInt::from(r_star_den));
        let p = derive_polynomial(n, &r)?;
        (*lo, *hi) = (f64::NAN, f64::NAN);
        *sign = match nonpositive_on_ray(&p, &r) {
            SignVerdict::NonpositiveOnRay => SolitonSign::Nonpositive,
            SignVerdict::NonnegativeOnRay => SolitonSign::Nonnegative,
            SignVerdict::SignChange { lo_f64, hi_f64, .. } => {
                (*lo, *hi) = (lo_f64, hi_f64);
                SolitonSign::Change
            }
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_last_error() {
        let mut w = ptr::null_mut();
        let st = unsafe { soliton_wing_solve(1, 1.0, 1e-10, 10.0, &mut w) };
        assert_eq!(st, SolitonStatus::InvalidParameter);
        assert!(w.is_null());
        let msg = unsafe { CStr::from_ptr(soliton_last_error()) }
            .to_str()
            .unwrap();
        assert!(msg.contains("n"), "{msg}");
        let st = unsafe { soliton_wing_solve(2, 1.0, 1e-10, 10.0, ptr::null_mut()) };
        assert_eq!(st, SolitonStatus::NullPointer);
    }

    #[test]
    fn bound_names() {
        assert_eq!(soliton_bound_count(), 15);
        let first = unsafe { CStr::from_ptr(soliton_bound_name(0)) };
        assert_eq!(first.to_str().unwrap(), "PHI_ENVELOPE");
        assert!(soliton_bound_name(15).is_null());
    }
}
