//! C ABI over `lebesgue-core`.
//!
//! Every fallible entry point returns an [`LbStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`lb_last_error_message`] on the calling thread. Step functions and
//! sampled series are opaque handles released with their `_free` function;
//! strings returned by the library are released with [`lb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lebesgue_core::densities::{box_mass_l, PartitionSpec};
use lebesgue_core::estimate::McConfig;
use lebesgue_core::laplace::{self, LaplaceMc};
use lebesgue_core::mellin;
use lebesgue_core::processes::{self, SeriesTag, WeightedAtomSeries};
use lebesgue_core::rng::RngStream;
use lebesgue_core::special;
use lebesgue_core::step::StepFunction;
use lebesgue_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Singularity = 3,
    HighVariance = 4,
    Numerical = 5,
    Parse = 6,
    Panic = 7,
}

/// Law of a sampled series.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbSeriesKind {
    Dirichlet = 0,
    Gamma = 1,
    /// Gamma-process draw carrying its Lebesgue importance weight.
    Lebesgue = 2,
}

/// Opaque piecewise-constant function on `[0, 1)`.
pub struct LbStepFunction(StepFunction);

/// Opaque truncated atomic measure on `[0, 1)`.
pub struct LbSeries(WeightedAtomSeries);

/// Monte Carlo estimate with its standard error.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LbEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Saddle point of the Mellin integral at one `lambda`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LbSaddle {
    pub lambda: f64,
    pub gamma: f64,
    pub l_value: f64,
    pub l_ratio: f64,
    pub curvature: f64,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => LbStatus::Domain,
            Error::Singularity(_) => LbStatus::Singularity,
            Error::HighVariance(_) => LbStatus::HighVariance,
            Error::Numerical(_) => LbStatus::Numerical,
            Error::Parse(_) => LbStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(LbStatus::NullPointer, format!("{name} is null"))
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> LbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            LbStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn scalar(out: *mut f64, value: impl FnOnce() -> lebesgue_core::Result<f64>) -> LbStatus {
    guard(|| write(out, "out", value()?))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn lb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_log_gamma(x: f64, out: *mut f64) -> LbStatus {
    scalar(out, || special::log_gamma(x))
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_digamma(x: f64, out: *mut f64) -> LbStatus {
    scalar(out, || special::digamma(x))
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_trigamma(x: f64, out: *mut f64) -> LbStatus {
    scalar(out, || special::trigamma(x))
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_bessel_j(order: f64, x: f64, out: *mut f64) -> LbStatus {
    scalar(out, || special::bessel_j(order, x))
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_bessel_k0(x: f64, out: *mut f64) -> LbStatus {
    scalar(out, || special::bessel_k0(x))
}

/// Parses `"v@lo:hi,v@lo:hi,..."`.
///
/// # Safety
/// `spec` must be NULL or a NUL-terminated string; `out` must be NULL or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_step_function_parse(spec: *const c_char, out: *mut *mut LbStepFunction) -> LbStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| Failure(LbStatus::Parse, "step function spec is not UTF-8".into()))?;
        let f: StepFunction = text.parse()?;
        write(out, "out", Box::into_raw(Box::new(LbStepFunction(f))))
    })
}

/// Builds a step function from `n_values + 1` breakpoints running from 0
/// to 1 and the value on each piece.
///
/// # Safety
/// The arrays must hold the stated number of elements; `out` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_step_function_new(
    breakpoints: *const f64,
    n_breakpoints: usize,
    values: *const f64,
    n_values: usize,
    out: *mut *mut LbStepFunction,
) -> LbStatus {
    guard(|| {
        let bps = slice(breakpoints, n_breakpoints, "breakpoints")?.to_vec();
        let vals = slice(values, n_values, "values")?.to_vec();
        let f = StepFunction::new(bps, vals)?;
        write(out, "out", Box::into_raw(Box::new(LbStepFunction(f))))
    })
}

/// # Safety
/// `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_step_function_eval(f: *const LbStepFunction, x: f64, out: *mut f64) -> LbStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, "out", f.0.eval(x))
    })
}

/// # Safety
/// `f` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_step_function_free(f: *mut LbStepFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `θ ∫ ln f`.
///
/// # Safety
/// `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_log_mean(theta: f64, f: *const LbStepFunction, out: *mut f64) -> LbStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, "out", laplace::log_mean(theta, &f.0)?)
    })
}

/// Multiplicator character `exp(θ ∫ ln a)`.
///
/// # Safety
/// `a` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_phi(theta: f64, a: *const LbStepFunction, out: *mut f64) -> LbStatus {
    guard(|| {
        let a = deref(a, "a")?;
        write(out, "out", laplace::phi(theta, &a.0)?)
    })
}

/// Closed-form Laplace transform `exp(−θ ∫ ln f)`.
///
/// # Safety
/// `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_analytic_laplace(theta: f64, f: *const LbStepFunction, out: *mut f64) -> LbStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, "out", laplace::analytic_laplace(theta, &f.0)?)
    })
}

/// Importance-sampled Laplace transform. Refused with
/// `LB_STATUS_HIGH_VARIANCE` when `min f <= 1/2` unless
/// `allow_high_variance` is set.
///
/// # Safety
/// `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_mc_laplace(
    theta: f64,
    f: *const LbStepFunction,
    samples: u64,
    seed: u64,
    streams: u64,
    eps: f64,
    allow_high_variance: bool,
    out: *mut LbEstimate,
) -> LbStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let cfg = LaplaceMc { mc: McConfig::new(samples, seed, streams)?, eps, allow_high_variance };
        let r = laplace::mc_laplace(theta, &f.0, &cfg)?;
        write(out, "out", LbEstimate { estimate: r.estimate, std_error: r.stderr, n_samples: r.n_samples })
    })
}

/// Draws one series from stream `stream_id` of `seed`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_sample(
    kind: LbSeriesKind,
    theta: f64,
    eps: f64,
    seed: u64,
    stream_id: u64,
    out: *mut *mut LbSeries,
) -> LbStatus {
    guard(|| {
        let mut rng = RngStream::new(seed, stream_id).rng();
        let tag = SeriesTag { seed, stream_id };
        let s = match kind {
            LbSeriesKind::Dirichlet => processes::sample_dirichlet_process(theta, eps, tag, &mut rng)?,
            LbSeriesKind::Gamma => processes::sample_gamma_process(theta, eps, tag, &mut rng)?,
            LbSeriesKind::Lebesgue => processes::sample_lebesgue_weighted(theta, eps, tag, &mut rng)?,
        };
        write(out, "out", Box::into_raw(Box::new(LbSeries(s))))
    })
}

/// Number of retained atoms; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lb_series_len(s: *const LbSeries) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Borrowed array of `lb_series_len` masses in non-increasing order,
/// valid while the handle lives; NULL for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lb_series_masses(s: *const LbSeries) -> *const f64 {
    s.as_ref().map_or(ptr::null(), |s| s.0.masses.as_ptr())
}

/// Borrowed array of atom locations aligned with the masses.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lb_series_locations(s: *const LbSeries) -> *const f64 {
    s.as_ref().map_or(ptr::null(), |s| s.0.locations.as_ptr())
}

/// Total mass; `LB_STATUS_DOMAIN` for normalized (Dirichlet) series.
///
/// # Safety
/// `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_total_mass(s: *const LbSeries, out: *mut f64) -> LbStatus {
    guard(|| {
        let s = deref(s, "series")?;
        let total = s.0.total_mass.ok_or_else(|| {
            Failure(LbStatus::Domain, "normalized series carry no total mass".into())
        })?;
        write(out, "out", total)
    })
}

/// Log importance weight; zero for draws from a probability law.
///
/// # Safety
/// `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_log_weight(s: *const LbSeries, out: *mut f64) -> LbStatus {
    guard(|| {
        let s = deref(s, "series")?;
        write(out, "out", s.0.log_weight)
    })
}

/// Upper bound on the mass dropped by truncation.
///
/// # Safety
/// `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_tail_bound(s: *const LbSeries, out: *mut f64) -> LbStatus {
    guard(|| {
        let s = deref(s, "series")?;
        write(out, "out", s.0.tail_bound)
    })
}

/// JSON rendering; free with [`lb_string_free`].
///
/// # Safety
/// `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_to_json(s: *const LbSeries, out: *mut *mut c_char) -> LbStatus {
    guard(|| {
        let s = deref(s, "series")?;
        let json = CString::new(s.0.to_json()).map_err(|e| Failure(LbStatus::Numerical, e.to_string()))?;
        write(out, "out", json.into_raw())
    })
}

/// New series with each mass multiplied by `a` at its location.
///
/// # Safety
/// `a` and `s` must be NULL or live handles; `out` must be NULL or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_series_apply_multiplicator(
    a: *const LbStepFunction,
    s: *const LbSeries,
    out: *mut *mut LbSeries,
) -> LbStatus {
    guard(|| {
        let a = deref(a, "a")?;
        let s = deref(s, "series")?;
        let moved = processes::apply_multiplicator(&a.0, &s.0);
        write(out, "out", Box::into_raw(Box::new(LbSeries(moved))))
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_series_free(s: *mut LbSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Solves `ψ(γ) = ln λ`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_solve_saddle(lambda: f64, out: *mut LbSaddle) -> LbStatus {
    guard(|| {
        let s = mellin::solve_saddle(lambda)?;
        write(
            out,
            "out",
            LbSaddle {
                lambda: s.lambda,
                gamma: s.gamma,
                l_value: s.l_value,
                l_ratio: s.l_ratio,
                curvature: s.curvature,
                residual: s.residual,
            },
        )
    })
}

/// `F_n(λ)` by the vertical-contour integral.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_f_contour(n: usize, lambda: f64, out: *mut f64) -> LbStatus {
    scalar(out, || mellin::f_contour(n, lambda, None))
}

/// `F_n(λ)` by direct integration over the orthant; `n <= 4`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_f_direct(n: usize, lambda: f64, out: *mut f64) -> LbStatus {
    scalar(out, || mellin::f_direct(n, lambda))
}

/// Exact Lebesgue mass of the box `[0, b]ⁿ` for part weights `weights`.
///
/// # Safety
/// `weights` must hold `n` elements; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lb_box_mass_l(weights: *const f64, n: usize, b: f64, out: *mut f64) -> LbStatus {
    guard(|| {
        let spec = PartitionSpec::new(slice(weights, n, "weights")?.to_vec())?;
        write(out, "out", box_mass_l(&spec, b)?)
    })
}
