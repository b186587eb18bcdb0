//! C ABI over the besovclaw toolkit.
//!
//! Objects cross the boundary as opaque handles created by `*_new` / solver
//! calls and released by the matching `*_free`. Every fallible call returns
//! an `i32` status ([`BC_OK`] on success); the message of the last failure
//! on the calling thread is available from [`bc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use besovclaw::besov::{increment_functional, Direction};
use besovclaw::fields::{make_bump_cutoff, Grid2D, TxBox, VelocityGrid};
use besovclaw::flux_entropy::{
    certify_hyp_a_with, make_entropy_pair, tartar_gap, CertificateMode, EntropySpec, FluxFunction,
};
use besovclaw::kinetic::delta;
use besovclaw::solver::{max_speed, nt_for_cfl, solve_fv, InitialData, Scheme, SolutionRecord};
use besovclaw::verify::{random_pairs, verify_lemma_delta};
use besovclaw::Error;

pub const BC_OK: i32 = 0;
/// A required pointer argument was null.
pub const BC_ERR_NULL: i32 = 1;
/// Malformed or out-of-range input.
pub const BC_ERR_INVALID: i32 = 2;
/// CFL condition violated.
pub const BC_ERR_CFL: i32 = 3;
/// A cutoff or shift leaves the computational domain.
pub const BC_ERR_SUPPORT: i32 = 4;
/// Non-finite values or solver blow-up.
pub const BC_ERR_NUMERIC: i32 = 5;
/// A convexity or monotonicity hypothesis does not hold.
pub const BC_ERR_HYPOTHESIS: i32 = 6;
/// Output buffer too small.
pub const BC_ERR_BUFFER: i32 = 7;
/// Internal panic caught at the boundary.
pub const BC_ERR_PANIC: i32 = 8;

/// Opaque flux function handle.
pub struct BcFlux {
    inner: FluxFunction,
}

/// Opaque solution record handle.
pub struct BcSolution {
    inner: SolutionRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::CflExceeded => BC_ERR_CFL,
        Error::SupportEscape(_) | Error::NonCommensurateShift | Error::VelocitySupportExceeded | Error::EmptySupport => {
            BC_ERR_SUPPORT
        }
        Error::NonFinite | Error::Blowup => BC_ERR_NUMERIC,
        Error::NotUniformlyConvex | Error::EntropyNotConvex | Error::FluxNotConvex | Error::HypFViolated => {
            BC_ERR_HYPOTHESIS
        }
        _ => BC_ERR_INVALID,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BC_OK
        }
        Ok(Err((code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            BC_ERR_PANIC
        }
    }
}

fn lib(e: Error) -> (i32, String) {
    (code_of(&e), e.to_string())
}

fn null(what: &str) -> (i32, String) {
    (BC_ERR_NULL, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (i32, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BC_ERR_INVALID, format!("{what} is not valid UTF-8")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (i32, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread (empty after a success).
///
/// # Safety
/// The returned pointer is valid until the next call into this library on
/// the same thread and must not be freed.
#[no_mangle]
pub unsafe extern "C" fn bc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a flux from a spec such as `burgers`, `even_power:2` or `poly:0,0,0.5`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer. On
/// success `*out` owns a handle to be released with [`bc_flux_free`].
#[no_mangle]
pub unsafe extern "C" fn bc_flux_new(spec: *const c_char, out: *mut *mut BcFlux) -> i32 {
    guard(|| {
        let out = out_ref(out, "out")?;
        let flux = FluxFunction::parse(c_str(spec, "spec")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(BcFlux { inner: flux }));
        Ok(())
    })
}

/// Releases a flux handle. Null is ignored.
///
/// # Safety
/// `flux` must come from [`bc_flux_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bc_flux_free(flux: *mut BcFlux) {
    if !flux.is_null() {
        drop(Box::from_raw(flux));
    }
}

/// Evaluates `a(v)` and `a'(v)`.
///
/// # Safety
/// `flux` must be a live handle; `out_a` and `out_da` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bc_flux_eval(flux: *const BcFlux, v: f64, out_a: *mut f64, out_da: *mut f64) -> i32 {
    guard(|| {
        let f = &flux.as_ref().ok_or_else(|| null("flux"))?.inner;
        *out_ref(out_a, "out_a")? = f.a(v);
        *out_ref(out_da, "out_da")? = f.da(v);
        Ok(())
    })
}

/// Finite-volume solve on `[x0, x1] × [0, t1]` with `nx` cells; the number
/// of time rows follows from `cfl`.
///
/// # Safety
/// `flux` must be a live handle, `init` and `scheme` NUL-terminated strings
/// (`riemann:UL,UR` or `sine:A,P`; `godunov` or `lax_friedrichs`), `out` a
/// valid pointer. On success `*out` owns a handle released with
/// [`bc_solution_free`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bc_solve_fv(
    flux: *const BcFlux,
    init: *const c_char,
    scheme: *const c_char,
    x0: f64,
    x1: f64,
    nx: usize,
    t1: f64,
    cfl: f64,
    out: *mut *mut BcSolution,
) -> i32 {
    guard(|| {
        let out = out_ref(out, "out")?;
        let f = &flux.as_ref().ok_or_else(|| null("flux"))?.inner;
        let init = InitialData::parse(c_str(init, "init")?).map_err(lib)?;
        let scheme = Scheme::parse(c_str(scheme, "scheme")?).map_err(lib)?;
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(lib(Error::CflExceeded));
        }
        if nx == 0 || !(x1 > x0) {
            return Err((BC_ERR_INVALID, "empty grid".into()));
        }
        let (lo, hi) = init.range();
        let nt = nt_for_cfl(0.0, t1, (x1 - x0) / nx as f64, cfl, max_speed(f, lo, hi));
        let grid = Grid2D::new(0.0, t1, x0, x1, nt, nx).map_err(lib)?;
        let rec = solve_fv(&init, f, grid, scheme, cfl).map_err(lib)?;
        *out = Box::into_raw(Box::new(BcSolution { inner: rec }));
        Ok(())
    })
}

/// Releases a solution handle. Null is ignored.
///
/// # Safety
/// `sol` must come from [`bc_solve_fv`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bc_solution_free(sol: *mut BcSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of time rows and space cells.
///
/// # Safety
/// `sol` must be a live handle; `nt` and `nx` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bc_solution_dims(sol: *const BcSolution, nt: *mut usize, nx: *mut usize) -> i32 {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("sol"))?.inner;
        *out_ref(nt, "nt")? = s.grid().nt;
        *out_ref(nx, "nx")? = s.grid().nx;
        Ok(())
    })
}

/// Copies the row-major `nt × nx` values into `buf` of length `len`.
///
/// # Safety
/// `sol` must be a live handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bc_solution_copy_values(sol: *const BcSolution, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("sol"))?.inner;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = s.field.values();
        if len < v.len() {
            return Err((BC_ERR_BUFFER, format!("buffer holds {len} values, need {}", v.len())));
        }
        std::ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// `Δ(u, ū)` for states in `[-vmax, vmax]`.
///
/// # Safety
/// `flux` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_delta(flux: *const BcFlux, u: f64, ubar: f64, vmax: f64, out: *mut f64) -> i32 {
    guard(|| {
        let f = &flux.as_ref().ok_or_else(|| null("flux"))?.inner;
        let out = out_ref(out, "out")?;
        let vg = VelocityGrid::new(-vmax, vmax, 4).map_err(lib)?;
        *out = delta(u, ubar, f, &vg).map_err(lib)?;
        Ok(())
    })
}

/// Tartar gap `(w−v)(q(w)−q(v)) − (a(w)−a(v))(η(w)−η(v))` for an entropy
/// spec such as `quadratic` or `even_power:2`.
///
/// # Safety
/// `flux` must be a live handle, `entropy` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_tartar_gap(
    flux: *const BcFlux,
    entropy: *const c_char,
    v: f64,
    w: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let f = &flux.as_ref().ok_or_else(|| null("flux"))?.inner;
        let out = out_ref(out, "out")?;
        let spec = EntropySpec::parse(c_str(entropy, "entropy")?).map_err(lib)?;
        let range = v.abs().max(w.abs()).max(1e-12);
        let pair = make_entropy_pair(spec, f, range).map_err(lib)?;
        *out = tartar_gap(&pair, f, v, w);
        Ok(())
    })
}

/// `∬ χ² |D^h u|^p` with `direction` 0 for x and 1 for t, and the smooth
/// cutoff supported in `[ta, tb] × [xa, xb]`.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bc_increment_functional(
    sol: *const BcSolution,
    direction: u32,
    h: f64,
    p: f64,
    ta: f64,
    tb: f64,
    xa: f64,
    xb: f64,
    plateau: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("sol"))?.inner;
        let out = out_ref(out, "out")?;
        let dir = match direction {
            0 => Direction::X,
            1 => Direction::T,
            d => return Err((BC_ERR_INVALID, format!("direction {d} must be 0 (x) or 1 (t)"))),
        };
        let chi = make_bump_cutoff(TxBox::new(ta, tb, xa, xb), plateau).map_err(lib)?;
        *out = increment_functional(&s.field, dir, h, p, &chi).map_err(lib)?.value;
        Ok(())
    })
}

/// Result of [`bc_verify_lemma_delta`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BcLemmaReport {
    pub pairs: usize,
    pub violations_corrected: usize,
    pub violations_stated: usize,
    pub worst_ratio_corrected: f64,
    pub worst_ratio_stated: f64,
    /// 1 when the corrected bound holds on every pair.
    pub pass: i32,
}

/// Scans `npairs` seeded random pairs in `[-range, range]` against both
/// lower-bound constants for `Δ`. `sharp` selects the sharp convexity
/// certificate (nonzero) or the analytic one (zero).
///
/// # Safety
/// `flux` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bc_verify_lemma_delta(
    flux: *const BcFlux,
    npairs: usize,
    seed: u64,
    range: f64,
    sharp: i32,
    out: *mut BcLemmaReport,
) -> i32 {
    guard(|| {
        let f = &flux.as_ref().ok_or_else(|| null("flux"))?.inner;
        let out = out_ref(out, "out")?;
        let mode = if sharp != 0 { CertificateMode::Sharp } else { CertificateMode::Analytic };
        let cert = certify_hyp_a_with(f, range, 1000, mode).map_err(lib)?;
        let r = verify_lemma_delta(f, &cert, &random_pairs(npairs, range, seed)).map_err(lib)?;
        *out = BcLemmaReport {
            pairs: r.pairs,
            violations_corrected: r.violations_corrected,
            violations_stated: r.violations_stated,
            worst_ratio_corrected: r.worst_ratio_corrected,
            worst_ratio_stated: r.worst_ratio_stated,
            pass: r.pass as i32,
        };
        Ok(())
    })
}
