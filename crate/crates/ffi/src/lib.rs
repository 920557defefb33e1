//! C ABI over the expograph renderer.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free` function. Every fallible call returns an
//! [`ExpoStatus`] and leaves a description of the last failure on the
//! calling thread, readable through [`expo_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use expograph::basicfamily::{basic_family_step, FamilyError, FamilyParams};
use expograph::imageio::{self, ImageBuffer};
use expograph::render::{render_scene, OutcomeGrid, RenderError};
use expograph::roots::{find_all_roots, RootError};
use expograph::scene::{Scene, SceneError, M_MAX_CAP};
use expograph::Polynomial;
use num_complex::Complex64;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The scene text is not valid scene JSON.
    InvalidScene = 3,
    /// The input parsed but violates a constraint, e.g. `|1 - alpha| >= 1`.
    ConstraintViolation = 4,
    InvalidArgument = 5,
    /// The iteration denominator vanished.
    Singular = 6,
    NonFinite = 7,
    /// The root finder gave up.
    NoConvergence = 8,
    RenderFailure = 9,
    /// The output buffer is too small; the needed size has been reported.
    BufferTooSmall = 10,
    Io = 11,
    /// A bug inside the library; the call had no effect.
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpoFormat {
    Ppm = 0,
    Png = 1,
}

/// A complex number, layout-compatible with `double[2]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpoComplex {
    pub re: f64,
    pub im: f64,
}

impl From<ExpoComplex> for Complex64 {
    fn from(c: ExpoComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ExpoComplex {
    fn from(c: Complex64) -> Self {
        ExpoComplex { re: c.re, im: c.im }
    }
}

/// A validated scene.
pub struct ExpoScene {
    scene: Scene,
}

/// A finished render: the outcome grid, its colored image, and the roots.
pub struct ExpoRender {
    grid: OutcomeGrid,
    image: ImageBuffer,
    roots: Vec<Complex64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ExpoStatus, String);

impl Failure {
    fn new(status: ExpoStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        let status = match e {
            SceneError::Parse(_) => ExpoStatus::InvalidScene,
            SceneError::Constraint(_) => ExpoStatus::ConstraintViolation,
        };
        Failure::new(status, e)
    }
}

impl From<RootError> for Failure {
    fn from(e: RootError) -> Self {
        let status = match e {
            RootError::DegreeTooLow => ExpoStatus::InvalidArgument,
            RootError::NonFiniteCoefficients => ExpoStatus::NonFinite,
            RootError::NoConvergence { .. } => ExpoStatus::NoConvergence,
        };
        Failure::new(status, e)
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Roots(r) => r.into(),
            other => Failure::new(ExpoStatus::RenderFailure, other),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let status = match e {
            FamilyError::InvalidOrder(_) | FamilyError::ConstantPolynomial => ExpoStatus::InvalidArgument,
            FamilyError::AlphaOutsideDisc(_) => ExpoStatus::ConstraintViolation,
            FamilyError::NonFiniteInput | FamilyError::NonFiniteResult => ExpoStatus::NonFinite,
            FamilyError::SingularDenominator => ExpoStatus::Singular,
        };
        Failure::new(status, e)
    }
}

impl From<imageio::ImageError> for Failure {
    fn from(e: imageio::ImageError) -> Self {
        Failure::new(ExpoStatus::Io, e)
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Run `f`, record any failure, and map it to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ExpoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            ExpoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            ExpoStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(ExpoStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|e| Failure::new(ExpoStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn poly_arg(coeffs: *const ExpoComplex, len: usize) -> Result<Polynomial, Failure> {
    non_null(coeffs, "coeffs")?;
    if len == 0 {
        return Err(Failure::new(ExpoStatus::InvalidArgument, "coefficient count is zero"));
    }
    let c = std::slice::from_raw_parts(coeffs, len);
    Ok(Polynomial::new(c.iter().map(|&z| Complex64::from(z)).collect::<Vec<_>>()))
}

/// Copy `bytes` into a caller buffer of `cap` bytes. `needed` always
/// receives the full size; a null or short buffer yields `BufferTooSmall`.
unsafe fn copy_out(bytes: &[u8], buf: *mut u8, cap: usize, needed: *mut usize) -> Result<(), Failure> {
    non_null(needed, "needed")?;
    *needed = bytes.len();
    if buf.is_null() || cap < bytes.len() {
        return Err(Failure::new(
            ExpoStatus::BufferTooSmall,
            format!("need {} bytes, buffer holds {cap}", bytes.len()),
        ));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn expo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null if the last
/// call succeeded. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn expo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse and validate a scene from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_scene_from_json(json: *const c_char, out: *mut *mut ExpoScene) -> ExpoStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let scene = Scene::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(ExpoScene { scene }));
        Ok(())
    })
}

/// Release a scene. Null is ignored.
///
/// # Safety
/// `scene` must come from [`expo_scene_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn expo_scene_free(scene: *mut ExpoScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Render a scene with `workers` threads (0 picks a default). The result
/// does not depend on the worker count.
///
/// # Safety
/// `scene` must be a live scene handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_render(scene: *const ExpoScene, workers: u32, out: *mut *mut ExpoRender) -> ExpoStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        non_null(scene, "scene")?;
        let scene = &(*scene).scene;
        let workers = if workers == 0 { expograph::render::default_workers() } else { workers as usize };
        let rendered = render_scene(scene, workers)?;
        let image = expograph::render::colorize(&rendered.grid, rendered.roots.len(), scene.palette);
        *out = Box::into_raw(Box::new(ExpoRender { grid: rendered.grid, image, roots: rendered.roots.roots }));
        Ok(())
    })
}

/// Release a render. Null is ignored.
///
/// # Safety
/// `render` must come from [`expo_render`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn expo_render_free(render: *mut ExpoRender) {
    if !render.is_null() {
        drop(Box::from_raw(render));
    }
}

/// Image width in pixels; 0 for a null handle.
///
/// # Safety
/// `render` must be null or a live render handle.
#[no_mangle]
pub unsafe extern "C" fn expo_render_width(render: *const ExpoRender) -> u32 {
    render.as_ref().map_or(0, |r| r.image.width())
}

/// Image height in pixels; 0 for a null handle.
///
/// # Safety
/// `render` must be null or a live render handle.
#[no_mangle]
pub unsafe extern "C" fn expo_render_height(render: *const ExpoRender) -> u32 {
    render.as_ref().map_or(0, |r| r.image.height())
}

/// Borrow the row-major RGB pixels (`width * height * 3` bytes). The
/// pointer lives as long as the handle.
///
/// # Safety
/// `render` must be a live render handle; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn expo_render_rgb(render: *const ExpoRender, len: *mut usize) -> *const u8 {
    let Some(r) = render.as_ref() else {
        return ptr::null();
    };
    if !len.is_null() {
        *len = r.image.pixels().len();
    }
    r.image.pixels().as_ptr()
}

/// Number of roots the render classified against.
///
/// # Safety
/// `render` must be null or a live render handle.
#[no_mangle]
pub unsafe extern "C" fn expo_render_root_count(render: *const ExpoRender) -> usize {
    render.as_ref().map_or(0, |r| r.roots.len())
}

/// Root `index`, in the order used by pixel root indices.
///
/// # Safety
/// `render` must be a live render handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_render_root(
    render: *const ExpoRender,
    index: usize,
    out: *mut ExpoComplex,
) -> ExpoStatus {
    guard(|| {
        non_null(render, "render")?;
        non_null(out, "out")?;
        let roots = &(*render).roots;
        let z = roots.get(index).ok_or_else(|| {
            Failure::new(ExpoStatus::InvalidArgument, format!("root index {index} out of range ({})", roots.len()))
        })?;
        *out = (*z).into();
        Ok(())
    })
}

/// Copy the outcome grid in its flat binary layout: row-major, five bytes
/// per pixel (status, root index as little-endian u16, iterations as
/// little-endian u16). Call with a null buffer to learn the size.
///
/// # Safety
/// `render` must be a live render handle, `buf` null or writable for `cap`
/// bytes, and `needed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_render_outcomes(
    render: *const ExpoRender,
    buf: *mut u8,
    cap: usize,
    needed: *mut usize,
) -> ExpoStatus {
    guard(|| {
        non_null(render, "render")?;
        copy_out(&(*render).grid.to_bytes(), buf, cap, needed)
    })
}

fn encode(image: &ImageBuffer, format: ExpoFormat) -> Vec<u8> {
    match format {
        ExpoFormat::Ppm => imageio::ppm_bytes(image),
        ExpoFormat::Png => imageio::png_bytes(image),
    }
}

/// Encode the image into a caller buffer. Call with a null buffer to learn
/// the size.
///
/// # Safety
/// As for [`expo_render_outcomes`].
#[no_mangle]
pub unsafe extern "C" fn expo_render_encode(
    render: *const ExpoRender,
    format: ExpoFormat,
    buf: *mut u8,
    cap: usize,
    needed: *mut usize,
) -> ExpoStatus {
    guard(|| {
        non_null(render, "render")?;
        copy_out(&encode(&(*render).image, format), buf, cap, needed)
    })
}

/// Encode the image to a file.
///
/// # Safety
/// `render` must be a live render handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn expo_render_write(
    render: *const ExpoRender,
    format: ExpoFormat,
    path: *const c_char,
) -> ExpoStatus {
    guard(|| {
        non_null(render, "render")?;
        let path = Path::new(str_arg(path, "path")?);
        std::fs::write(path, encode(&(*render).image, format))
            .map_err(|e| Failure::new(ExpoStatus::Io, format!("{}: {e}", path.display())))
    })
}

/// All roots of the polynomial with ascending coefficients `coeffs[0..len]`,
/// sorted by real then imaginary part. `roots_out` must hold `cap` values;
/// `count` receives the degree even when the buffer is too small.
///
/// # Safety
/// `coeffs` must be readable for `len` values, `roots_out` null or writable
/// for `cap` values, and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_find_roots(
    coeffs: *const ExpoComplex,
    len: usize,
    roots_out: *mut ExpoComplex,
    cap: usize,
    count: *mut usize,
) -> ExpoStatus {
    guard(|| {
        non_null(count, "count")?;
        let p = poly_arg(coeffs, len)?;
        *count = p.degree();
        if p.degree() == 0 {
            return Err(RootError::DegreeTooLow.into());
        }
        if roots_out.is_null() || cap < p.degree() {
            return Err(Failure::new(
                ExpoStatus::BufferTooSmall,
                format!("need room for {} roots, buffer holds {cap}", p.degree()),
            ));
        }
        let rs = find_all_roots(&p)?;
        for (i, r) in rs.roots.iter().enumerate() {
            *roots_out.add(i) = (*r).into();
        }
        Ok(())
    })
}

/// One step `B_{m,alpha}(z)` of the basic family on the given polynomial.
///
/// # Safety
/// `coeffs` must be readable for `len` values and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn expo_basic_family_step(
    coeffs: *const ExpoComplex,
    len: usize,
    z: ExpoComplex,
    m: u32,
    alpha: ExpoComplex,
    out: *mut ExpoComplex,
) -> ExpoStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = poly_arg(coeffs, len)?;
        if m as usize > M_MAX_CAP {
            return Err(Failure::new(ExpoStatus::InvalidArgument, format!("m must be at most {M_MAX_CAP}")));
        }
        let params = FamilyParams::new(m as usize, alpha.into())?;
        *out = basic_family_step(&p, z.into(), &params)?.into();
        Ok(())
    })
}
