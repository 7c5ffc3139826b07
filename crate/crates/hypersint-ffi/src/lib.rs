//! C ABI for `hypersint`.
//!
//! Every function returns an [`HsStatus`]; results go through out-pointers.
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. On failure the message of the last error on the
//! calling thread is available from [`hs_last_error_message`].

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypersint::interbasis::{w_matrix, WMethod};
use hypersint::potential1::{
    p1_energy, p1_ep_lambda, p1_ep_roots, p1_hp_roots, p1_hp_tau, BetheRoots, P1Params, P1State, SolverOptions,
};
use hypersint::potential2::{p2_energy, P2Params, P2State};
use hypersint::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    NoBoundState = 3,
    OutOfWindow = 4,
    SolverFailure = 5,
    QuadratureFailure = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Which interbasis computation to use.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsWMethod {
    Quadrature = 0,
    Hyp3f2 = 1,
    Hahn = 2,
}

/// Parabolic chart of the first potential.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsParabolicChart {
    Elliptic = 0,
    Hyperbolic = 1,
}

/// Parameters of the first potential.
pub struct HsP1Params(P1Params);

/// Parameters of the second potential.
pub struct HsP2Params(P2Params);

/// A normalized eigenstate of the first potential.
pub struct HsP1State(P1State);

/// A normalized equidistant eigenstate of the second potential.
pub struct HsP2State(P2State);

/// All root configurations of one parabolic level.
pub struct HsRootSet {
    params: P1Params,
    chart: HsParabolicChart,
    roots: Vec<BetheRoots>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HsStatus {
    match e {
        Error::InvalidParams(_) | Error::InvalidSpec(_) | Error::Config(_) => HsStatus::InvalidParams,
        Error::NoBoundState(_) | Error::BoundaryState => HsStatus::NoBoundState,
        Error::OutOfWindow(_) => HsStatus::OutOfWindow,
        Error::SolverFailure { .. } => HsStatus::SolverFailure,
        Error::QuadratureFailure(_) => HsStatus::QuadratureFailure,
        _ => HsStatus::Numerical,
    }
}

// run `f`, recording errors and panics for hs_last_error_message
fn guard(f: impl FnOnce() -> Result<(), (HsStatus, String)>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside hypersint".into());
            HsStatus::Panic
        }
    }
}

fn lib<T>(r: hypersint::Result<T>) -> Result<T, (HsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HsStatus, String) {
    (HsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HsStatus, String)> {
    // SAFETY: the caller passes either null or a live handle from this library
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (HsStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, valid for writes
    unsafe { out.write(v) };
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: p came from Box::into_raw in this library and is freed once
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL,
/// or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            // SAFETY: buf is valid for cap bytes and n < cap
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Create parameters of the first potential.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_params_new(alpha: f64, beta: f64, gamma: f64, out: *mut *mut HsP1Params) -> HsStatus {
    guard(|| {
        let p = lib(P1Params::new(alpha, beta, gamma))?;
        unsafe { write(out, boxed(HsP1Params(p)), "out") }
    })
}

/// # Safety
/// `p` must be null or a handle from `hs_p1_params_new`, freed once.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_params_free(p: *mut HsP1Params) {
    unsafe { free(p) }
}

/// Highest bound level, or -1 when there are no bound states.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_nmax(p: *const HsP1Params, out: *mut i64) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        unsafe { write(out, p.0.nmax().map_or(-1, |n| n as i64), "out") }
    })
}

/// Energy of level `n`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_energy(p: *const HsP1Params, n: usize, out: *mut f64) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let e = lib(p1_energy(&p.0, n))?;
        unsafe { write(out, e, "out") }
    })
}

/// Equidistant state with quantum numbers (n, m).
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_state_equidistant(
    p: *const HsP1Params,
    n: usize,
    m: usize,
    out: *mut *mut HsP1State,
) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let s = lib(P1State::equidistant(&p.0, n, m))?;
        unsafe { write(out, boxed(HsP1State(s)), "out") }
    })
}

/// Horicyclic state with quantum numbers (n1, n2).
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_state_horicyclic(
    p: *const HsP1Params,
    n1: usize,
    n2: usize,
    out: *mut *mut HsP1State,
) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let s = lib(P1State::horicyclic(&p.0, n1, n2))?;
        unsafe { write(out, boxed(HsP1State(s)), "out") }
    })
}

/// Parabolic state for configuration `j` of a root set.
///
/// # Safety
/// `set` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_state_parabolic(set: *const HsRootSet, j: usize, out: *mut *mut HsP1State) -> HsStatus {
    guard(|| {
        let set = unsafe { deref(set, "root set") }?;
        let r = set
            .roots
            .get(j)
            .cloned()
            .ok_or_else(|| (HsStatus::OutOfWindow, format!("configuration {j} of {}", set.roots.len())))?;
        let s = match set.chart {
            HsParabolicChart::Elliptic => lib(P1State::elliptic_parabolic(&set.params, r))?,
            HsParabolicChart::Hyperbolic => lib(P1State::hyperbolic_parabolic(&set.params, r))?,
        };
        unsafe { write(out, boxed(HsP1State(s)), "out") }
    })
}

/// # Safety
/// `s` must be null or a state handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_state_free(s: *mut HsP1State) {
    unsafe { free(s) }
}

/// Wavefunction value at coordinates (u1, u2) of the state's own chart.
///
/// # Safety
/// `s` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_state_eval(s: *const HsP1State, u1: f64, u2: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let s = unsafe { deref(s, "state") }?;
        let v = lib(s.0.eval_chart(u1, u2))?;
        unsafe { write(out, v, "out") }
    })
}

/// Solve the zero equations of level `n` in a parabolic chart.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_roots(
    p: *const HsP1Params,
    chart: HsParabolicChart,
    n: usize,
    tol: f64,
    seed: u64,
    out: *mut *mut HsRootSet,
) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let opt = SolverOptions { tol, seed, ..SolverOptions::default() };
        let roots = match chart {
            HsParabolicChart::Elliptic => lib(p1_ep_roots(&p.0, n, &opt))?,
            HsParabolicChart::Hyperbolic => lib(p1_hp_roots(&p.0, n, &opt))?,
        };
        unsafe { write(out, boxed(HsRootSet { params: p.0, chart, roots }), "out") }
    })
}

/// # Safety
/// `s` must be null or a root-set handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn hs_root_set_free(s: *mut HsRootSet) {
    unsafe { free(s) }
}

/// Number of configurations in the set.
///
/// # Safety
/// `s` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_root_set_len(s: *const HsRootSet, out: *mut usize) -> HsStatus {
    guard(|| {
        let s = unsafe { deref(s, "root set") }?;
        unsafe { write(out, s.roots.len(), "out") }
    })
}

/// Roots of configuration `j` into `buf` (capacity `cap`), its residual and
/// separation constant (λ for elliptic, τ for hyperbolic). `len_out`
/// receives the number of roots even when the buffer is too small.
///
/// # Safety
/// Handles must be live, `buf` valid for `cap` doubles, outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_root_set_get(
    s: *const HsRootSet,
    j: usize,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
    residual_out: *mut f64,
    constant_out: *mut f64,
) -> HsStatus {
    guard(|| {
        let s = unsafe { deref(s, "root set") }?;
        let r = s.roots.get(j).ok_or_else(|| (HsStatus::OutOfWindow, format!("configuration {j} of {}", s.roots.len())))?;
        unsafe { write(len_out, r.roots.len(), "len_out") }?;
        if r.roots.len() > cap {
            return Err((HsStatus::BufferTooSmall, format!("need {} doubles, got {cap}", r.roots.len())));
        }
        if !r.roots.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            // SAFETY: buf holds cap >= len doubles
            unsafe { ptr::copy_nonoverlapping(r.roots.as_ptr(), buf, r.roots.len()) };
        }
        let c = match s.chart {
            HsParabolicChart::Elliptic => p1_ep_lambda(&s.params, &r.roots),
            HsParabolicChart::Hyperbolic => p1_hp_tau(&s.params, &r.roots),
        };
        unsafe { write(residual_out, r.residual, "residual_out") }?;
        unsafe { write(constant_out, c, "constant_out") }
    })
}

/// Interbasis matrix of level `n`, row-major with rows n1 and columns m,
/// into `buf` of capacity `cap` (at least (n+1)²).
///
/// # Safety
/// `p` must be a live handle and `buf` valid for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn hs_p1_interbasis(
    p: *const HsP1Params,
    n: usize,
    method: HsWMethod,
    buf: *mut f64,
    cap: usize,
) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let k = n + 1;
        if cap < k * k {
            return Err((HsStatus::BufferTooSmall, format!("need {} doubles, got {cap}", k * k)));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let m = match method {
            HsWMethod::Quadrature => WMethod::Quadrature,
            HsWMethod::Hyp3f2 => WMethod::Hyp3F2,
            HsWMethod::Hahn => WMethod::Hahn,
        };
        let w = lib(w_matrix(&p.0, n, m))?;
        for r in 0..k {
            for c in 0..k {
                // SAFETY: r * k + c < k² <= cap
                unsafe { *buf.add(r * k + c) = w.get(r, c) };
            }
        }
        Ok(())
    })
}

/// Create parameters of the second potential.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_params_new(alpha: f64, beta: f64, gamma: f64, out: *mut *mut HsP2Params) -> HsStatus {
    guard(|| {
        let p = lib(P2Params::new(alpha, beta, gamma))?;
        unsafe { write(out, boxed(HsP2Params(p)), "out") }
    })
}

/// # Safety
/// `p` must be null or a handle from `hs_p2_params_new`, freed once.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_params_free(p: *mut HsP2Params) {
    unsafe { free(p) }
}

/// Highest bound level, or -1 when there are no bound states.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_nmax(p: *const HsP2Params, out: *mut i64) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        unsafe { write(out, p.0.nmax().map_or(-1, |n| n as i64), "out") }
    })
}

/// Energy of level `n`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_energy(p: *const HsP2Params, n: usize, out: *mut f64) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let e = lib(p2_energy(&p.0, n))?;
        unsafe { write(out, e, "out") }
    })
}

/// Equidistant state with quantum numbers (n, m).
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_state_equidistant(
    p: *const HsP2Params,
    n: usize,
    m: usize,
    out: *mut *mut HsP2State,
) -> HsStatus {
    guard(|| {
        let p = unsafe { deref(p, "params") }?;
        let s = lib(P2State::equidistant(&p.0, n, m))?;
        unsafe { write(out, boxed(HsP2State(s)), "out") }
    })
}

/// # Safety
/// `s` must be null or a state handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_state_free(s: *mut HsP2State) {
    unsafe { free(s) }
}

/// Complex wavefunction value at equidistant coordinates (τ1, τ2).
///
/// # Safety
/// `s` must be a live handle and the outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_p2_state_eval(
    s: *const HsP2State,
    u1: f64,
    u2: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> HsStatus {
    guard(|| {
        let s = unsafe { deref(s, "state") }?;
        let v = lib(s.0.eval_chart(u1, u2))?;
        unsafe { write(re_out, v.re, "re_out") }?;
        unsafe { write(im_out, v.im, "im_out") }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::BoundaryState), HsStatus::NoBoundState);
        assert_eq!(status_of(&Error::SolverFailure { msg: String::new(), best_residual: 1.0 }), HsStatus::SolverFailure);
        assert_eq!(status_of(&Error::Pole(0.0)), HsStatus::Numerical);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), HsStatus::Panic);
        let mut buf = [0 as c_char; 64];
        let n = unsafe { hs_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert!(n > 0);
    }
}
