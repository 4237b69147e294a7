//! C ABI for the qsync simulator.
//!
//! Objects cross the boundary as opaque handles created by `qs_*_new` style
//! functions and released with the matching `qs_*_free`. Every fallible call
//! returns a [`QsStatus`]; on failure the message is available from
//! [`qs_last_error_message`] until the next failing call on the same thread.
//! Output arrays are caller-allocated: functions check the capacity and report
//! the length they need through `needed` when it is non-null.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qsync::instanton::{apply_mode_filter, saddle_filter, solve_saddle, solve_saddle_2d};
use qsync::model::parse_config_str;
use qsync::spectrum::transmission_at;
use qsync::spinon::{dense_solve, spinon_energies, SpinChainSpec, MAX_DENSE_SITES};
use qsync::{
    make_config, sample_disorder, Boundary, DisorderRealization, Error, ModelConfig, RawParams,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ValidityRegime = 3,
    SolverFailure = 4,
    BufferTooSmall = 5,
    Parse = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsBoundary {
    Periodic = 0,
    Open = 1,
}

/// Opaque validated model configuration.
pub struct QsConfig {
    inner: ModelConfig,
}

/// Opaque disorder realization tied to the configuration it was drawn for.
pub struct QsDisorder {
    inner: DisorderRealization,
}

/// Saddle-point solution for one realization.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QsSaddle {
    pub x0: f64,
    pub y0: f64,
    /// Correlation radius in lattice units.
    pub r0: f64,
    pub iterations: u32,
    /// Number of solver warnings (finite-size or out-of-range coupling).
    pub warnings: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::ValidityRegime(_) => QsStatus::ValidityRegime,
        Error::NoSignChange { .. }
        | Error::Tuning { .. }
        | Error::NonFiniteEnergy { .. }
        | Error::Diagonalization { .. } => QsStatus::SolverFailure,
        Error::Parse { .. } => QsStatus::Parse,
        _ => QsStatus::InvalidArgument,
    }
}

fn fail(status: QsStatus, msg: impl Into<String>) -> QsStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QsStatus>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(QsStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, QsStatus>;
}

impl<T> OrStatus<T> for qsync::Result<T> {
    fn or_status(self) -> Result<T, QsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, QsStatus> {
    p.as_ref()
        .ok_or_else(|| fail(QsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], QsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(QsStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copies `data` into a caller buffer of capacity `cap`, recording the length.
unsafe fn emit(
    data: &[f64],
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> Result<(), QsStatus> {
    if !needed.is_null() {
        *needed = data.len();
    }
    if cap < data.len() {
        return Err(fail(
            QsStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", data.len()),
        ));
    }
    if data.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(fail(QsStatus::NullPointer, "output buffer is null"));
    }
    ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), QsStatus> {
    if out.is_null() {
        return Err(fail(QsStatus::NullPointer, "output handle pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a configuration from physical parameters. `dimension` is 1 or 2; in
/// 2D `n_sites` must be a perfect square.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qs_config_new(
    n_sites: usize,
    dimension: u8,
    boundary: QsBoundary,
    mean_splitting: f64,
    disorder_width: f64,
    coupling: f64,
    temperature: f64,
    out: *mut *mut QsConfig,
) -> QsStatus {
    guard(|| {
        let raw = RawParams {
            n_sites,
            dimension,
            boundary: match boundary {
                QsBoundary::Periodic => Boundary::Periodic,
                QsBoundary::Open => Boundary::Open,
            },
            mean_splitting,
            disorder_width,
            coupling,
            temperature,
            lattice_spacing: 1.0,
        };
        put(
            out,
            QsConfig {
                inner: make_config(&raw).or_status()?,
            },
        )
    })
}

/// Parses a versioned TOML configuration document.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_config_from_toml(
    toml: *const c_char,
    out: *mut *mut QsConfig,
) -> QsStatus {
    guard(|| {
        if toml.is_null() {
            return Err(fail(QsStatus::NullPointer, "toml is null"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| fail(QsStatus::Parse, "configuration is not UTF-8"))?;
        let file = parse_config_str(text, Path::new("<ffi>")).or_status()?;
        put(
            out,
            QsConfig {
                inner: file.model_config().or_status()?,
            },
        )
    })
}

/// Copy of `config` with K̃ = κ·δΔ.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_config_with_kappa(
    config: *const QsConfig,
    kappa: f64,
    out: *mut *mut QsConfig,
) -> QsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        put(
            out,
            QsConfig {
                inner: c.inner.with_kappa(kappa).or_status()?,
            },
        )
    })
}

/// Dimensionless coupling κ = K̃/δΔ, or NaN for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_config_kappa(config: *const QsConfig) -> f64 {
    config.as_ref().map_or(f64::NAN, |c| c.inner.kappa())
}

/// Number of sites, or 0 for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_config_n_sites(config: *const QsConfig) -> usize {
    config.as_ref().map_or(0, |c| c.inner.n_sites())
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_config_free(config: *mut QsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Draws the seeded Gaussian disorder realization for `config`.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_disorder_sample(
    config: *const QsConfig,
    seed: u64,
    out: *mut *mut QsDisorder,
) -> QsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        put(
            out,
            QsDisorder {
                inner: sample_disorder(&c.inner, seed),
            },
        )
    })
}

/// Wraps caller-supplied splittings Δᵢ (one per site) as a realization.
///
/// # Safety
/// `config` must be a live handle, `values` must hold `len` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_disorder_from_values(
    config: *const QsConfig,
    values: *const f64,
    len: usize,
    seed: u64,
    out: *mut *mut QsDisorder,
) -> QsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let v = slice(values, len, "values")?.to_vec();
        put(
            out,
            QsDisorder {
                inner: DisorderRealization::from_splittings(&c.inner, v, seed).or_status()?,
            },
        )
    })
}

/// Copies the splittings into `out` (capacity `cap`).
///
/// # Safety
/// `disorder` must be a live handle; `out` must hold `cap` doubles; `needed`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_disorder_values(
    disorder: *const QsDisorder,
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> QsStatus {
    guard(|| {
        emit(
            &deref(disorder, "disorder")?.inner.splittings,
            out,
            cap,
            needed,
        )
    })
}

/// # Safety
/// `disorder` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_disorder_free(disorder: *mut QsDisorder) {
    if !disorder.is_null() {
        drop(Box::from_raw(disorder));
    }
}

/// Solves the saddle-point equations for one realization.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qs_saddle_solve(
    disorder: *const QsDisorder,
    config: *const QsConfig,
    out: *mut QsSaddle,
) -> QsStatus {
    guard(|| {
        let (d, c) = (deref(disorder, "disorder")?, deref(config, "config")?);
        if out.is_null() {
            return Err(fail(QsStatus::NullPointer, "out is null"));
        }
        let sol = match c.inner.dimension() {
            1 => solve_saddle(&d.inner, &c.inner),
            _ => solve_saddle_2d(&d.inner, &c.inner),
        }
        .or_status()?;
        *out = QsSaddle {
            x0: sol.x0,
            y0: sol.y0,
            r0: sol.r0,
            iterations: sol.iterations as u32,
            warnings: sol.warnings.len() as u32,
        };
        Ok(())
    })
}

/// Saddle-filtered frequencies ωᵢ for one realization.
///
/// # Safety
/// Handles must be live; `out` must hold `cap` doubles; `needed` and `r0`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_saddle_filter(
    disorder: *const QsDisorder,
    config: *const QsConfig,
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
    r0: *mut f64,
) -> QsStatus {
    guard(|| {
        let (d, c) = (deref(disorder, "disorder")?, deref(config, "config")?);
        let (field, sol) = saddle_filter(&d.inner, &c.inner).or_status()?;
        if !r0.is_null() {
            *r0 = sol.r0;
        }
        emit(&field.frequencies, out, cap, needed)
    })
}

/// Filters the realization with a given radius (∞ keeps only the zero mode).
///
/// # Safety
/// Handles must be live; `out` must hold `cap` doubles; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_mode_filter(
    disorder: *const QsDisorder,
    config: *const QsConfig,
    r0: f64,
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> QsStatus {
    guard(|| {
        let (d, c) = (deref(disorder, "disorder")?, deref(config, "config")?);
        let field = apply_mode_filter(&d.inner, &c.inner, r0).or_status()?;
        emit(&field.frequencies, out, cap, needed)
    })
}

/// D(ω) = 1 − Σᵢ α/((ω − ωᵢ)² + γ²) on `n_grid` probe frequencies.
///
/// # Safety
/// `frequencies` must hold `n_freq` doubles, `grid` and `out` `n_grid` each.
#[no_mangle]
pub unsafe extern "C" fn qs_transmission(
    frequencies: *const f64,
    n_freq: usize,
    alpha: f64,
    gamma: f64,
    grid: *const f64,
    n_grid: usize,
    out: *mut f64,
) -> QsStatus {
    guard(|| {
        if !(alpha > 0.0 && gamma > 0.0 && alpha.is_finite() && gamma.is_finite()) {
            return Err(fail(
                QsStatus::InvalidArgument,
                "alpha and gamma must be positive",
            ));
        }
        let f = slice(frequencies, n_freq, "frequencies")?;
        let w = slice(grid, n_grid, "grid")?;
        emit(
            &transmission_at(f, alpha, gamma, w),
            out,
            n_grid,
            ptr::null_mut(),
        )
    })
}

/// Spinon energies Eₖ (ascending) of the open chain with transverse fields
/// Δᵢ and bond coupling K̃.
///
/// # Safety
/// `splittings` must hold `n` doubles; `out` must hold `cap` doubles;
/// `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_spinon_energies(
    splittings: *const f64,
    n: usize,
    coupling: f64,
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> QsStatus {
    guard(|| {
        let spec = SpinChainSpec::new(slice(splittings, n, "splittings")?.to_vec(), coupling)
            .or_status()?;
        emit(&spinon_energies(&spec).or_status()?, out, cap, needed)
    })
}

/// All 2ᴺ many-body levels by dense diagonalization (N ≤ 12), ascending.
///
/// # Safety
/// `splittings` must hold `n` doubles; `out` must hold `cap` doubles;
/// `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn qs_dense_levels(
    splittings: *const f64,
    n: usize,
    coupling: f64,
    out: *mut f64,
    cap: usize,
    needed: *mut usize,
) -> QsStatus {
    guard(|| {
        if n > MAX_DENSE_SITES {
            return Err(fail(
                QsStatus::InvalidArgument,
                format!("dense diagonalization is limited to {MAX_DENSE_SITES} sites"),
            ));
        }
        let spec = SpinChainSpec::new(slice(splittings, n, "splittings")?.to_vec(), coupling)
            .or_status()?;
        emit(
            &dense_solve(&spec).or_status()?.eigenvalues,
            out,
            cap,
            needed,
        )
    })
}
