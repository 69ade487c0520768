//! C ABI for the rmom library.
//!
//! States are opaque handles created by `rmom_state_from_*` and released with
//! `rmom_state_free`. Every fallible call returns an [`RmomStatus`]; on
//! failure `rmom_last_error` gives a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rmom::detect::{ccnr_test, dv_test, moment_witness_labeled, ppt_test, sep_region};
use rmom::moments::{mc_moments, moment_observable, state_moments};
use rmom::qmat::{ComplexMatrix, DensityMatrix, C64};
use rmom::statezoo::StateSpec;
use rmom::{bloch, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmomStatus {
    Ok = 0,
    NullPointer = 1,
    Usage = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque density matrix.
pub struct RmomState {
    rho: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RmomStatus {
    match e {
        Error::Numerical(_) => RmomStatus::Numerical,
        _ => RmomStatus::Usage,
    }
}

/// Runs `f`, recording errors and converting panics into a status.
fn guard(f: impl FnOnce() -> Result<(), RmomStatus>) -> RmomStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RmomStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RmomStatus::Panic
        }
    }
}

fn lib<T>(r: rmom::Result<T>) -> Result<T, RmomStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), RmomStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(RmomStatus::NullPointer);
    }
    Ok(())
}

unsafe fn state_ref<'a>(s: *const RmomState) -> Result<&'a DensityMatrix, RmomStatus> {
    non_null(s, "state")?;
    Ok(&(*s).rho)
}

fn boxed(rho: DensityMatrix, out: *mut *mut RmomState) {
    unsafe { *out = Box::into_raw(Box::new(RmomState { rho })) };
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next rmom call on the same thread.
#[no_mangle]
pub extern "C" fn rmom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a state from row-major real and imaginary parts of length
/// `prod(dims)^2`. `im` may be null for a real matrix.
///
/// # Safety
/// `dims` must point to `n_dims` values and `re`/`im` to `prod(dims)^2` values.
#[no_mangle]
pub unsafe extern "C" fn rmom_state_from_matrix(
    dims: *const usize,
    n_dims: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut RmomState,
) -> RmomStatus {
    guard(|| {
        non_null(dims, "dims")?;
        non_null(re, "re")?;
        non_null(out, "out")?;
        let dims = std::slice::from_raw_parts(dims, n_dims).to_vec();
        let dim = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&d| d <= 256)
            .ok_or_else(|| {
                set_error("total dimension must be at most 256");
                RmomStatus::Usage
            })?;
        let n = dim * dim;
        let re = std::slice::from_raw_parts(re, n);
        let data: Vec<C64> = if im.is_null() {
            re.iter().map(|&x| C64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, n);
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()
        };
        let m = lib(ComplexMatrix::from_row_major(dim, dim, data))?;
        boxed(lib(DensityMatrix::new(dims, m))?, out);
        Ok(())
    })
}

/// Builds a state from JSON: `{"name":..,"params":{..}}` for a named state or
/// `{"dims":[..],"re":[..],"im":[..]}` for a raw matrix.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rmom_state_from_json(json: *const c_char, out: *mut *mut RmomState) -> RmomStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json).to_str().map_err(|_| {
            set_error("json is not UTF-8");
            RmomStatus::Usage
        })?;
        let spec = lib(StateSpec::from_json(text))?;
        boxed(lib(spec.resolve())?, out);
        Ok(())
    })
}

/// # Safety
/// `state` must come from `rmom_state_from_*` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rmom_state_free(state: *mut RmomState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Total Hilbert-space dimension and number of parties.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_state_shape(state: *const RmomState, dim: *mut usize, n_parties: *mut usize) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(dim, "dim")?;
        non_null(n_parties, "n_parties")?;
        *dim = rho.dim();
        *n_parties = rho.n_parties();
        Ok(())
    })
}

/// Sector lengths A_0..A_n written to `out`; `written` receives n+1.
/// Returns `BufferTooSmall` (with `written` set) if `cap` < n+1.
///
/// # Safety
/// `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn rmom_sector_lengths(
    state: *const RmomState,
    out: *mut f64,
    cap: usize,
    written: *mut usize,
) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(written, "written")?;
        let s = lib(bloch::sector_lengths(rho))?;
        *written = s.a.len();
        if cap < s.a.len() {
            set_error(&format!("need room for {} values", s.a.len()));
            return Err(RmomStatus::BufferTooSmall);
        }
        non_null(out, "out")?;
        ptr::copy_nonoverlapping(s.a.as_ptr(), out, s.a.len());
        Ok(())
    })
}

/// Analytic randomized-measurement moments S2 and S4 of a d x d state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_moments(state: *const RmomState, s2: *mut f64, s4: *mut f64) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(s2, "s2")?;
        non_null(s4, "s4")?;
        let m = lib(state_moments(rho))?;
        *s2 = m.s2;
        *s4 = m.s4;
        Ok(())
    })
}

unsafe fn scalar(
    state: *const RmomState,
    out: *mut f64,
    f: fn(&DensityMatrix) -> rmom::Result<f64>,
) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(out, "out")?;
        *out = lib(f(rho))?;
        Ok(())
    })
}

/// Smallest eigenvalue of the partial transpose on the second party.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_ppt_min_eig(state: *const RmomState, out: *mut f64) -> RmomStatus {
    scalar(state, out, ppt_test)
}

/// Trace norm of the realigned matrix.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_ccnr_norm(state: *const RmomState, out: *mut f64) -> RmomStatus {
    scalar(state, out, ccnr_test)
}

/// Trace norm of the correlation matrix.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_dv_norm(state: *const RmomState, out: *mut f64) -> RmomStatus {
    scalar(state, out, dv_test)
}

/// Full detection report as a JSON string, released with `rmom_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_analyze_json(state: *const RmomState, out: *mut *mut c_char) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(out, "out")?;
        let report = lib(moment_witness_labeled(rho, "state"))?;
        let text = lib(serde_json::to_string(&report).map_err(Error::from))?;
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rmom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Range of S4 over separable d x d states with the given S2 (0 <= s2 <= 1).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rmom_sep_region(s2: f64, d: usize, s4_min: *mut f64, s4_max: *mut f64) -> RmomStatus {
    guard(|| {
        non_null(s4_min, "s4_min")?;
        non_null(s4_max, "s4_max")?;
        let (lo, hi) = lib(sep_region(s2, d))?;
        *s4_min = lo;
        *s4_max = hi;
        Ok(())
    })
}

/// Monte Carlo estimates of the second and fourth randomized-measurement
/// moments with standard errors. `out` receives [r2, r2_err, r4, r4_err].
///
/// # Safety
/// `out` must have room for 4 values.
#[no_mangle]
pub unsafe extern "C" fn rmom_mc_moments(
    state: *const RmomState,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> RmomStatus {
    guard(|| {
        let rho = state_ref(state)?;
        non_null(out, "out")?;
        let obs = lib(moment_observable(rho.local_dim().unwrap_or(0)))?;
        let est = lib(mc_moments(rho, &obs, &[2, 4], samples, seed))?;
        let (e2, e4) = (est.get(2).expect("r=2"), est.get(4).expect("r=4"));
        let vals = [e2.mean, e2.std_err, e4.mean, e4.std_err];
        ptr::copy_nonoverlapping(vals.as_ptr(), out, 4);
        Ok(())
    })
}
