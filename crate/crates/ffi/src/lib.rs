//! C ABI for the radialwave library.
//!
//! Conventions:
//! - every fallible call returns an `RwStatus` code; `RW_OK` is 0;
//! - objects cross the boundary as opaque handles created by `rw_*_new`
//!   constructors and released by the matching `rw_*_free`;
//! - the text of the most recent error in the calling thread is available
//!   through `rw_last_error`;
//! - panics never unwind across the boundary (they map to `RW_PANIC`).

use radialwave::funcs::{bump, Grid, RadialFunction};
use radialwave::scenario::{load_scenario, run_scenario, RunMode};
use radialwave::wave::{propagate_spectral, CauchyData, WaveState};
use radialwave::{DensityModel, Error};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    RwOk = 0,
    RwErrDomain = 1,
    RwErrInterpolation = 2,
    RwErrConvergence = 3,
    RwErrSingular = 4,
    RwErrRoot = 5,
    RwErrResolution = 6,
    RwErrTruncation = 7,
    RwErrTail = 8,
    RwErrCfl = 9,
    RwErrBoundaryTouch = 10,
    RwErrConfig = 11,
    RwErrIo = 12,
    /// A required pointer argument was null.
    RwErrNullArgument = 13,
    /// A string argument was not valid UTF-8.
    RwErrUtf8 = 14,
    /// Diagnostics ran but at least one failed (scenario runner only).
    RwDiagnosticFailure = 15,
    /// An internal panic was caught at the boundary.
    RwPanic = 16,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
}

fn status_of(err: &Error) -> RwStatus {
    match err {
        Error::Domain(_) => RwStatus::RwErrDomain,
        Error::Interpolation(_) => RwStatus::RwErrInterpolation,
        Error::Convergence(_) => RwStatus::RwErrConvergence,
        Error::Singular(_) => RwStatus::RwErrSingular,
        Error::Root(_) => RwStatus::RwErrRoot,
        Error::Resolution(_) => RwStatus::RwErrResolution,
        Error::Truncation(_) => RwStatus::RwErrTruncation,
        Error::Tail(_) => RwStatus::RwErrTail,
        Error::Cfl(_) => RwStatus::RwErrCfl,
        Error::BoundaryTouch(_) => RwStatus::RwErrBoundaryTouch,
        Error::Config(_) => RwStatus::RwErrConfig,
        Error::Io(_) => RwStatus::RwErrIo,
    }
}

fn fail(err: Error) -> RwStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

fn guarded(f: impl FnOnce() -> RwStatus) -> RwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic caught at the FFI boundary");
            RwStatus::RwPanic
        }
    }
}

/// Copy the calling thread's most recent error message into `buf`
/// (NUL-terminated, truncated to `cap` bytes). Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (length query).
#[no_mangle]
pub unsafe extern "C" fn rw_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Opaque density-model handle.
pub struct RwModel {
    inner: DensityModel,
}

/// Opaque wave-state handle (a snapshot u(., t), u_t(., t)).
pub struct RwWaveState {
    inner: WaveState,
}

/// Create a Jacobi density model A(r) = (2 sinh(s r)/s)^(2a+1) (2 cosh(s r))^(2b+1).
///
/// # Safety
/// `out` must be a valid pointer; on `RW_OK` it receives a handle that
/// must be released with `rw_model_free`.
#[no_mangle]
pub unsafe extern "C" fn rw_model_jacobi(
    alpha: f64,
    beta: f64,
    scale: f64,
    out: *mut *mut RwModel,
) -> RwStatus {
    if out.is_null() {
        set_error("rw_model_jacobi: out is null");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| match radialwave::make_jacobi_model(alpha, beta, scale) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(RwModel { inner: m }));
            RwStatus::RwOk
        }
        Err(e) => fail(e),
    })
}

/// Load a model from a catalog file (`model = jacobi` / `model = table`).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as in `rw_model_jacobi`.
#[no_mangle]
pub unsafe extern "C" fn rw_model_from_catalog(
    path: *const c_char,
    out: *mut *mut RwModel,
) -> RwStatus {
    if path.is_null() || out.is_null() {
        set_error("rw_model_from_catalog: null argument");
        return RwStatus::RwErrNullArgument;
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        set_error("rw_model_from_catalog: path is not UTF-8");
        return RwStatus::RwErrUtf8;
    };
    guarded(|| {
        let read = std::fs::read_to_string(path)
            .map_err(Error::Io)
            .and_then(|text| {
                let base = Path::new(path).parent().unwrap_or(Path::new("."));
                radialwave::density::model_from_catalog(&text, base)
            });
        match read {
            Ok(m) => {
                *out = Box::into_raw(Box::new(RwModel { inner: m }));
                RwStatus::RwOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Release a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be a handle from a constructor, released at most once.
#[no_mangle]
pub unsafe extern "C" fn rw_model_free(model: *mut RwModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Half the horosphere mean curvature of the model (NaN for null).
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rw_model_rho(model: *const RwModel) -> f64 {
    if model.is_null() {
        return f64::NAN;
    }
    (*model).inner.rho
}

/// Evaluate the density: writes A(r) and A'(r)/A(r).
///
/// # Safety
/// `model` must be a live handle; `a_out` and `logderiv_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rw_eval_density(
    model: *const RwModel,
    r: f64,
    a_out: *mut f64,
    logderiv_out: *mut f64,
) -> RwStatus {
    if model.is_null() || a_out.is_null() || logderiv_out.is_null() {
        set_error("rw_eval_density: null argument");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| match radialwave::eval_density(&(*model).inner, r) {
        Ok((a, ld)) => {
            *a_out = a;
            *logderiv_out = ld;
            RwStatus::RwOk
        }
        Err(e) => fail(e),
    })
}

/// Evaluate the radial eigenfunction phi_lambda(r) (real for real lambda).
///
/// # Safety
/// `model` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_eigenfunction(
    model: *const RwModel,
    lambda: f64,
    r: f64,
    out: *mut f64,
) -> RwStatus {
    if model.is_null() || out.is_null() {
        set_error("rw_eigenfunction: null argument");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| {
        if r < 0.0 {
            return fail(Error::Domain("rw_eigenfunction: r must be >= 0".into()));
        }
        let grid = Grid::span(r.max(1e-3), 1e-3);
        match radialwave::eigen::eval_phi(
            &(*model).inner,
            num_complex::Complex64::new(lambda, 0.0),
            grid,
        ) {
            Ok(phi) => {
                *out = phi.at(r).re;
                RwStatus::RwOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Evaluate the Plancherel density |c(lambda)|^-2.
///
/// # Safety
/// `model` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rw_plancherel_density(
    model: *const RwModel,
    lambda: f64,
    out: *mut f64,
) -> RwStatus {
    if model.is_null() || out.is_null() {
        set_error("rw_plancherel_density: null argument");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| match radialwave::eigen::plancherel_density(&(*model).inner, &[lambda]) {
        Ok(w) => {
            *out = w[0];
            RwStatus::RwOk
        }
        Err(e) => fail(e),
    })
}

/// Solve the shifted wave equation with mollifier Cauchy data
/// f = bump(radius, amplitude), g = 0, by the spectral solver, and return
/// the snapshot at time t.
///
/// # Safety
/// `model` must be a live handle; `out` receives a handle to release with
/// `rw_wave_state_free`.
#[no_mangle]
pub unsafe extern "C" fn rw_propagate_bump(
    model: *const RwModel,
    radius: f64,
    amplitude: f64,
    t: f64,
    out: *mut *mut RwWaveState,
) -> RwStatus {
    if model.is_null() || out.is_null() {
        set_error("rw_propagate_bump: null argument");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| {
        if !(radius > 0.0) {
            return fail(Error::Domain("bump radius must be positive".into()));
        }
        let grid = Grid::span(radius + 0.25, 2e-4);
        let f = bump(grid, radius, amplitude);
        let data = CauchyData::new(f, RadialFunction::zeros(grid));
        match propagate_spectral(&(*model).inner, &data, t) {
            Ok(st) => {
                *out = Box::into_raw(Box::new(RwWaveState { inner: st }));
                RwStatus::RwOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Release a wave-state handle. Null is a no-op.
///
/// # Safety
/// `state` must be a handle from `rw_propagate_bump`, released at most once.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_state_free(state: *mut RwWaveState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Snapshot time of a wave state (NaN for null).
///
/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_state_time(state: *const RwWaveState) -> f64 {
    if state.is_null() {
        return f64::NAN;
    }
    (*state).inner.t
}

/// Sample u and u_t of a snapshot at radius r (interpolated; zero beyond
/// the stored grid).
///
/// # Safety
/// `state` must be a live handle; the four output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_state_sample(
    state: *const RwWaveState,
    r: f64,
    re_u: *mut f64,
    im_u: *mut f64,
    re_ut: *mut f64,
    im_ut: *mut f64,
) -> RwStatus {
    if state.is_null() || re_u.is_null() || im_u.is_null() || re_ut.is_null() || im_ut.is_null() {
        set_error("rw_wave_state_sample: null argument");
        return RwStatus::RwErrNullArgument;
    }
    guarded(|| {
        let st = &(*state).inner;
        let u = st.u.at(r);
        let ut = st.ut.at(r);
        *re_u = u.re;
        *im_u = u.im;
        *re_ut = ut.re;
        *im_ut = ut.im;
        RwStatus::RwOk
    })
}

/// Run a scenario config end to end (the `radialwave run` semantics).
/// Returns `RW_OK` when every asserted diagnostic passes,
/// `RW_DIAGNOSTIC_FAILURE` when at least one fails, or an error code.
/// `out_dir` overrides the config's output directory when non-null.
///
/// # Safety
/// `config_path` must be NUL-terminated; `out_dir` NUL-terminated or null.
#[no_mangle]
pub unsafe extern "C" fn rw_run_scenario(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> RwStatus {
    if config_path.is_null() {
        set_error("rw_run_scenario: config_path is null");
        return RwStatus::RwErrNullArgument;
    }
    let Ok(config) = CStr::from_ptr(config_path).to_str() else {
        set_error("rw_run_scenario: config_path is not UTF-8");
        return RwStatus::RwErrUtf8;
    };
    let out_override = if out_dir.is_null() {
        None
    } else {
        match CStr::from_ptr(out_dir).to_str() {
            Ok(s) => Some(PathBuf::from(s)),
            Err(_) => {
                set_error("rw_run_scenario: out_dir is not UTF-8");
                return RwStatus::RwErrUtf8;
            }
        }
    };
    guarded(|| {
        let mut sc = match load_scenario(Path::new(config)) {
            Ok(sc) => sc,
            Err(e) => return fail(e),
        };
        if let Some(dir) = out_override {
            sc.out_dir = dir;
        }
        match run_scenario(&sc, RunMode::Full, false) {
            Ok(bundle) if bundle.diagnostics_pass => RwStatus::RwOk,
            Ok(bundle) => {
                set_error(&format!("diagnostics failed: {}", bundle.failed.join(", ")));
                RwStatus::RwDiagnosticFailure
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn model_lifecycle_and_density() {
        unsafe {
            let mut m: *mut RwModel = ptr::null_mut();
            assert_eq!(rw_model_jacobi(0.5, -0.5, 1.0, &mut m), RwStatus::RwOk);
            assert!((rw_model_rho(m) - 1.0).abs() < 1e-12);
            let (mut a, mut ld) = (0.0, 0.0);
            assert_eq!(rw_eval_density(m, 1.0, &mut a, &mut ld), RwStatus::RwOk);
            assert!((a - 4.0 * 1.0f64.sinh().powi(2)).abs() < 1e-12);
            rw_model_free(m);
        }
    }

    #[test]
    fn invalid_model_sets_error() {
        unsafe {
            let mut m: *mut RwModel = ptr::null_mut();
            let code = rw_model_jacobi(0.5, -0.5, 0.0, &mut m);
            assert_eq!(code, RwStatus::RwErrDomain);
            let mut buf = [0i8; 256];
            let n = rw_last_error(buf.as_mut_ptr(), buf.len());
            assert!(n > 0);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(
                rw_model_jacobi(0.5, -0.5, 1.0, ptr::null_mut()),
                RwStatus::RwErrNullArgument
            );
            assert_eq!(
                rw_run_scenario(ptr::null(), ptr::null()),
                RwStatus::RwErrNullArgument
            );
            rw_model_free(ptr::null_mut());
            rw_wave_state_free(ptr::null_mut());
        }
    }

    #[test]
    fn eigenfunction_h3_closed_form() {
        unsafe {
            let mut m: *mut RwModel = ptr::null_mut();
            assert_eq!(rw_model_jacobi(0.5, -0.5, 1.0, &mut m), RwStatus::RwOk);
            let (lam, r) = (2.0, 1.5);
            let mut phi = 0.0;
            assert_eq!(rw_eigenfunction(m, lam, r, &mut phi), RwStatus::RwOk);
            let exact = (lam * r).sin() / (lam * r.sinh());
            assert!((phi - exact).abs() < 1e-8, "{phi} vs {exact}");
            rw_model_free(m);
        }
    }

    #[test]
    fn propagate_bump_snapshot() {
        unsafe {
            let mut m: *mut RwModel = ptr::null_mut();
            assert_eq!(rw_model_jacobi(0.5, -0.5, 1.0, &mut m), RwStatus::RwOk);
            let mut st: *mut RwWaveState = ptr::null_mut();
            assert_eq!(rw_propagate_bump(m, 0.5, 1.0, 0.0, &mut st), RwStatus::RwOk);
            assert_eq!(rw_wave_state_time(st), 0.0);
            let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
            assert_eq!(
                rw_wave_state_sample(st, 0.0, &mut a, &mut b, &mut c, &mut d),
                RwStatus::RwOk
            );
            // t = 0 snapshot is the data: the mollifier exp(-1/(1-(r/R)^2))
            // has center value e^-1
            assert!((a - (-1.0f64).exp()).abs() < 1e-12, "{a}");
            assert_eq!(b, 0.0);
            rw_wave_state_free(st);
            rw_model_free(m);
        }
    }
}
