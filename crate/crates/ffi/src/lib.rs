//! C ABI over `dyadic-cf`.
//!
//! Objects cross the boundary as opaque handles created by `dc_*_new`-style
//! constructors and released with the matching `dc_*_free`. Every fallible
//! call returns a [`DcStatus`]; on failure a message is kept per thread and
//! can be read with [`dc_last_error_message`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dyadic_cf::identification::{identify_from_samples, identify_from_slices, Identification};
use dyadic_cf::{
    analytic_cf, compose_phi_y_slices, invert_cf, sample_components, ComplexCurve, DensityEstimate, Error,
    FreqGrid, IdentifyOptions, ModelConfig, SampleSet, Window,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    /// The identification pipeline failed in one of its stages.
    Identification = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Which component CF to read from an identification or closed form.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcComponent {
    Alpha = 0,
    Eta = 1,
    Epsilon = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcWindow {
    Sharp = 0,
    CosineTaper = 1,
}

pub struct DcConfig {
    inner: ModelConfig,
}

pub struct DcSamples {
    inner: SampleSet,
}

pub struct DcCurve {
    inner: ComplexCurve,
}

pub struct DcIdentification {
    inner: Identification,
}

pub struct DcDensity {
    inner: DensityEstimate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) => DcStatus::Io,
            Error::Json(_) | Error::Csv { .. } => DcStatus::Parse,
            Error::Stage { .. } | Error::Divergent { .. } | Error::WithDiagnostics { .. } => {
                DcStatus::Identification
            }
            _ => DcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs `f`, records its error, and turns panics into [`DcStatus::Panic`].
fn guard(f: impl FnOnce() -> Outcome<()>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            DcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            DcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DcStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DcStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn options_from(json: *const c_char) -> Outcome<IdentifyOptions> {
    if json.is_null() {
        return Ok(IdentifyOptions::default());
    }
    let text = read_str(json, "options_json")?;
    serde_json::from_str(text).map_err(|e| Failure(DcStatus::Parse, format!("options: {e}")))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next fallible call on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model config from JSON, e.g.
/// `{"c": 0, "alpha": {"kind": "laplace", "scale": 1}, ...}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_config_from_json(json: *const c_char, out: *mut *mut DcConfig) -> DcStatus {
    guard(|| {
        let cfg = ModelConfig::from_json(read_str(json, "json")?)?;
        put(out, DcConfig { inner: cfg })
    })
}

/// Builds a config from `kind:scale` strings such as `"uniform_symmetric:1"`.
///
/// # Safety
/// The three strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_config_new(
    c: f64,
    alpha: *const c_char,
    eta: *const c_char,
    epsilon: *const c_char,
    out: *mut *mut DcConfig,
) -> DcStatus {
    guard(|| {
        let cfg = ModelConfig::new(
            c,
            read_str(alpha, "alpha")?.parse()?,
            read_str(eta, "eta")?.parse()?,
            read_str(epsilon, "epsilon")?.parse()?,
        );
        put(out, DcConfig { inner: cfg })
    })
}

/// # Safety
/// `cfg` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_config_free(cfg: *mut DcConfig) {
    release(cfg)
}

/// Draws `n` triples with the given seed.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_simulate(
    cfg: *const DcConfig,
    n: usize,
    seed: u64,
    out: *mut *mut DcSamples,
) -> DcStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?;
        let samples = sample_components(&cfg.inner, n, seed)?;
        put(out, DcSamples { inner: samples })
    })
}

/// Reads a samples CSV (and its sidecar when present).
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_samples_read_csv(path: *const c_char, out: *mut *mut DcSamples) -> DcStatus {
    guard(|| {
        let samples = dyadic_cf::io::read_samples(read_str(path, "path")?)?;
        put(out, DcSamples { inner: samples })
    })
}

/// Writes a samples CSV and its sidecar.
///
/// # Safety
/// `samples` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dc_samples_write_csv(samples: *const DcSamples, path: *const c_char) -> DcStatus {
    guard(|| {
        let s = borrow(samples, "samples")?;
        dyadic_cf::io::write_samples(&s.inner, read_str(path, "path")?)?;
        Ok(())
    })
}

/// Number of triples, or 0 for a null handle.
///
/// # Safety
/// `samples` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_samples_len(samples: *const DcSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies the triples row by row into `out` (`3 * len` doubles).
///
/// # Safety
/// `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dc_samples_copy(
    samples: *const DcSamples,
    out: *mut f64,
    capacity: usize,
) -> DcStatus {
    guard(|| {
        let s = borrow(samples, "samples")?;
        let need = 3 * s.inner.len();
        if out.is_null() {
            return Err(null("out"));
        }
        if capacity < need {
            return Err(Failure(
                DcStatus::BufferTooSmall,
                format!("need {need} doubles, got {capacity}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (row, t) in dst.chunks_exact_mut(3).zip(s.inner.triples()) {
            row.copy_from_slice(&[t.y_ij, t.y_kj, t.y_il]);
        }
        Ok(())
    })
}

/// # Safety
/// `samples` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_samples_free(samples: *mut DcSamples) {
    release(samples)
}

/// Runs the identification on samples over `|s| <= s_max` with the given
/// grid spacing. `options_json` may be null for the defaults.
///
/// # Safety
/// `samples` must be a live handle; `options_json` null or NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_identify_samples(
    samples: *const DcSamples,
    s_max: f64,
    spacing: f64,
    options_json: *const c_char,
    out: *mut *mut DcIdentification,
) -> DcStatus {
    guard(|| {
        let s = borrow(samples, "samples")?;
        let grid = FreqGrid::with_spacing(s_max, spacing)?;
        let id = identify_from_samples(&s.inner, &grid, &options_from(options_json)?)?;
        put(out, DcIdentification { inner: id })
    })
}

/// Runs the identification on the closed-form slices of `cfg`.
///
/// # Safety
/// As [`dc_identify_samples`].
#[no_mangle]
pub unsafe extern "C" fn dc_identify_oracle(
    cfg: *const DcConfig,
    s_max: f64,
    spacing: f64,
    options_json: *const c_char,
    out: *mut *mut DcIdentification,
) -> DcStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?;
        let grid = FreqGrid::with_spacing(s_max, spacing)?;
        let slices = compose_phi_y_slices(&cfg.inner, &grid);
        let id = identify_from_slices(&slices, &options_from(options_json)?)?;
        put(out, DcIdentification { inner: id })
    })
}

/// Copies one identified CF into a new curve handle.
///
/// # Safety
/// `id` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_identification_curve(
    id: *const DcIdentification,
    which: DcComponent,
    out: *mut *mut DcCurve,
) -> DcStatus {
    guard(|| {
        let id = &borrow(id, "id")?.inner;
        let curve = match which {
            DcComponent::Alpha => id.alpha_cf(),
            DcComponent::Eta => id.eta_cf(),
            DcComponent::Epsilon => id.epsilon_cf(),
        };
        put(out, DcCurve { inner: curve.clone() })
    })
}

/// Diagnostics as a JSON string to be released with [`dc_string_free`], or
/// null on failure.
///
/// # Safety
/// `id` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_identification_diagnostics_json(id: *const DcIdentification) -> *mut c_char {
    let mut text = None;
    let status = guard(|| {
        let id = borrow(id, "id")?;
        text = Some(id.inner.diagnostics().to_json());
        Ok(())
    });
    match (status, text.and_then(|t| CString::new(t).ok())) {
        (DcStatus::Ok, Some(c)) => c.into_raw(),
        _ => ptr::null_mut(),
    }
}

/// # Safety
/// `id` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_identification_free(id: *mut DcIdentification) {
    release(id)
}

/// The closed-form CF of one component of `cfg` on a grid.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_analytic_cf(
    cfg: *const DcConfig,
    which: DcComponent,
    s_max: f64,
    spacing: f64,
    out: *mut *mut DcCurve,
) -> DcStatus {
    guard(|| {
        let cfg = borrow(cfg, "cfg")?.inner;
        let grid = FreqGrid::with_spacing(s_max, spacing)?;
        let dist = match which {
            DcComponent::Alpha => cfg.alpha,
            DcComponent::Eta => cfg.eta,
            DcComponent::Epsilon => cfg.epsilon,
        };
        put(
            out,
            DcCurve {
                inner: analytic_cf(&dist, &grid),
            },
        )
    })
}

/// Number of grid points, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_curve_len(curve: *const DcCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.grid().len())
}

/// Copies frequencies and real/imaginary parts; any of the three output
/// arrays may be null to skip it.
///
/// # Safety
/// Each non-null array must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dc_curve_copy(
    curve: *const DcCurve,
    s: *mut f64,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
) -> DcStatus {
    guard(|| {
        let c = &borrow(curve, "curve")?.inner;
        let n = c.grid().len();
        if capacity < n {
            return Err(Failure(
                DcStatus::BufferTooSmall,
                format!("need {n} points, got {capacity}"),
            ));
        }
        for (i, (x, v)) in c.points().enumerate() {
            if !s.is_null() {
                *s.add(i) = x;
            }
            if !re.is_null() {
                *re.add(i) = v.re;
            }
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        Ok(())
    })
}

/// Writes a curve CSV with columns `s,re,im`.
///
/// # Safety
/// `curve` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dc_curve_write_csv(curve: *const DcCurve, path: *const c_char) -> DcStatus {
    guard(|| {
        let c = borrow(curve, "curve")?;
        dyadic_cf::io::write_curve_csv(&c.inner, read_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `curve` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_curve_free(curve: *mut DcCurve) {
    release(curve)
}

/// Inverts a CF to a density on the default spatial grid.
///
/// # Safety
/// `curve` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_invert_cf(
    curve: *const DcCurve,
    cutoff: f64,
    window: DcWindow,
    out: *mut *mut DcDensity,
) -> DcStatus {
    guard(|| {
        let c = borrow(curve, "curve")?;
        let w = match window {
            DcWindow::Sharp => Window::Sharp,
            DcWindow::CosineTaper => Window::CosineTaper,
        };
        put(
            out,
            DcDensity {
                inner: invert_cf(&c.inner, cutoff, w)?,
            },
        )
    })
}

/// Number of spatial points, or 0 for a null handle.
///
/// # Safety
/// `density` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_density_len(density: *const DcDensity) -> usize {
    density.as_ref().map_or(0, |d| d.inner.values.len())
}

/// Copies abscissae and density values; either array may be null.
///
/// # Safety
/// Each non-null array must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dc_density_copy(
    density: *const DcDensity,
    x: *mut f64,
    f: *mut f64,
    capacity: usize,
) -> DcStatus {
    guard(|| {
        let d = &borrow(density, "density")?.inner;
        let n = d.values.len();
        if capacity < n {
            return Err(Failure(
                DcStatus::BufferTooSmall,
                format!("need {n} points, got {capacity}"),
            ));
        }
        for (i, (xv, fv)) in d.points().enumerate() {
            if !x.is_null() {
                *x.add(i) = xv;
            }
            if !f.is_null() {
                *f.add(i) = fv;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `density` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dc_density_free(density: *mut DcDensity) {
    release(density)
}
