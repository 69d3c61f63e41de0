//! C ABI for `gperim`.
//!
//! Grids and fields cross the boundary as opaque heap handles that the caller
//! releases with [`gp_grid_free`] and [`gp_field_free`]. Fallible functions
//! return a [`GpStatus`] and write results through out-pointers, which are
//! left untouched on failure. The message for the most recent failure on the
//! calling thread is available from [`gp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use gperim::{DoubleWell, Error, GaussianGrid, ScalarField};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidGrid = 3,
    ShapeMismatch = 4,
    NotIndicator = 5,
    InvalidArgument = 6,
    Parse = 7,
    Io = 8,
    Infeasible = 9,
    Panic = 10,
}

/// Opaque grid handle.
pub struct GpGrid {
    inner: Arc<GaussianGrid>,
}

/// Opaque scalar field handle. Holds a reference to its grid, so it stays
/// valid after the grid handle it was built from is freed.
pub struct GpField {
    inner: ScalarField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GpStatus {
    match err {
        Error::Domain { .. } => GpStatus::Domain,
        Error::InvalidGrid(_) => GpStatus::InvalidGrid,
        Error::ShapeMismatch(_) => GpStatus::ShapeMismatch,
        Error::NotIndicator(_) => GpStatus::NotIndicator,
        Error::InfeasiblePair { .. } => GpStatus::Infeasible,
        Error::InvalidArgument(_) => GpStatus::InvalidArgument,
        Error::Parse { .. } => GpStatus::Parse,
        Error::Io(_) => GpStatus::Io,
    }
}

struct Fail(GpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GpStatus::NullPointer, format!("{what} is null"))
}

/// Run `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> GpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            GpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed_field(f: ScalarField) -> *mut GpField {
    Box::into_raw(Box::new(GpField { inner: f }))
}

/// Message for the last failure on this thread, or null if none occurred.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gp_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Standard normal CDF.
#[no_mangle]
pub extern "C" fn gp_normal_cdf(x: f64) -> f64 {
    gperim::std_normal_cdf(x)
}

/// Standard normal quantile; `p` must lie in `(0, 1)`.
///
/// # Safety
/// `out` must be null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gp_normal_quantile(p: f64, out: *mut f64) -> GpStatus {
    guard(|| write_out(out, gperim::std_normal_quantile(p)?))
}

/// Gaussian isoperimetric profile at `p` in `[0, 1]`.
///
/// # Safety
/// `out` must be null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gp_isoperimetric_profile(p: f64, out: *mut f64) -> GpStatus {
    guard(|| write_out(out, gperim::isoperimetric_profile(p)?))
}

/// Build a grid with `points_per_axis` nodes per axis on `[-half_width, half_width]^dim`.
///
/// # Safety
/// `out` must be null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_new(
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
    out: *mut *mut GpGrid,
) -> GpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = gperim::build_grid(dim, half_width, points_per_axis)?;
        write_out(out, Box::into_raw(Box::new(GpGrid { inner })))
    })
}

/// Release a grid. Null is ignored.
///
/// # Safety
/// `grid` must be null or a handle from [`gp_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_free(grid: *mut GpGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_len(grid: *const GpGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.len())
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_grid_dim(grid: *const GpGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.dim())
}

/// Copy `len` node values (row-major) into a new field on `grid`.
///
/// # Safety
/// `values` must be valid for `len` reads; `grid` and `out` as above.
#[no_mangle]
pub unsafe extern "C" fn gp_field_from_values(
    grid: *const GpGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut GpField,
) -> GpStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let v = slice(values, len, "values")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let f = ScalarField::new(&g.inner, v.to_vec())?;
        write_out(out, boxed_field(f))
    })
}

/// Release a field. Null is ignored.
///
/// # Safety
/// `field` must be null or a handle produced by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_field_free(field: *mut GpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of values, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_field_len(field: *const GpField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.len())
}

/// Copy the field values into `dst`, which must hold exactly the field length.
///
/// # Safety
/// `dst` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gp_field_values(field: *const GpField, dst: *mut f64, len: usize) -> GpStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if len != f.inner.len() {
            return Err(Fail(
                GpStatus::ShapeMismatch,
                format!("buffer holds {len} values, field has {}", f.inner.len()),
            ));
        }
        if len > 0 && dst.is_null() {
            return Err(null("destination"));
        }
        if len > 0 {
            ptr::copy_nonoverlapping(f.inner.values().as_ptr(), dst, len);
        }
        Ok(())
    })
}

/// Indicator of `{x : <h, x> < c}` on `grid`; `h` has `h_len == dim` entries.
///
/// # Safety
/// `h` must be valid for `h_len` reads.
#[no_mangle]
pub unsafe extern "C" fn gp_half_space_indicator(
    grid: *const GpGrid,
    h: *const f64,
    h_len: usize,
    c: f64,
    out: *mut *mut GpField,
) -> GpStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let h = slice(h, h_len, "normal")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let e = gperim::half_space_indicator(h, c, &g.inner)?;
        write_out(out, boxed_field(e))
    })
}

unsafe fn scalar(
    field: *const GpField,
    out: *mut f64,
    f: impl FnOnce(&ScalarField) -> gperim::Result<f64>,
) -> GpStatus {
    guard(|| {
        let u = deref(field, "field")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        write_out(out, f(&u.inner)?)
    })
}

/// Gaussian integral of the field.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_volume(field: *const GpField, out: *mut f64) -> GpStatus {
    scalar(field, out, |u| Ok(gperim::volume_gamma(u)))
}

/// Gaussian total variation.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_total_variation(field: *const GpField, out: *mut f64) -> GpStatus {
    scalar(field, out, |u| Ok(gperim::total_variation_gamma(u)))
}

/// Gaussian perimeter of a set indicator.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_perimeter(field: *const GpField, out: *mut f64) -> GpStatus {
    scalar(field, out, gperim::perimeter_gamma)
}

/// Relaxed perimeter energy of a `[0, 1]`-valued field.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_relaxed_energy(field: *const GpField, out: *mut f64) -> GpStatus {
    scalar(field, out, |u| Ok(gperim::relaxed_energy(u)))
}

/// Allen-Cahn energy at width `eps` with the quartic double well.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_allen_cahn_energy(field: *const GpField, eps: f64, out: *mut f64) -> GpStatus {
    scalar(field, out, |u| {
        gperim::allen_cahn_energy(u, eps, &DoubleWell::quartic())
    })
}

/// Surface tension constant of the quartic double well.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_well_constant(out: *mut f64) -> GpStatus {
    guard(|| write_out(out, gperim::well_constant(&DoubleWell::quartic(), 64)?))
}

/// Ehrhard symmetral of a set indicator, keeping the first `k` variables.
///
/// # Safety
/// `set` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_symmetrize_set(
    set: *const GpField,
    k: usize,
    out: *mut *mut GpField,
) -> GpStatus {
    guard(|| {
        let e = deref(set, "set")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = gperim::ehrhard_symmetrize_set(&e.inner, k)?;
        write_out(out, boxed_field(s))
    })
}

/// Ehrhard symmetral of a `[0, 1]`-valued function through `n_levels` level sets.
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_symmetrize_function(
    field: *const GpField,
    k: usize,
    n_levels: usize,
    out: *mut *mut GpField,
) -> GpStatus {
    guard(|| {
        let u = deref(field, "field")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = gperim::ehrhard_symmetrize_function(&u.inner, k, n_levels)?;
        write_out(out, boxed_field(s))
    })
}

/// Serialize a field to the text dump format. Free the result with
/// [`gp_string_free`].
///
/// # Safety
/// `field` null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gp_field_dump(field: *const GpField, out: *mut *mut c_char) -> GpStatus {
    guard(|| {
        let u = deref(field, "field")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = gperim::dump::to_dump_string(&u.inner);
        let c = CString::new(text).map_err(|e| Fail(GpStatus::Io, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}

/// Parse a field from the text dump format.
///
/// # Safety
/// `text` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gp_field_parse(text: *const c_char, out: *mut *mut GpField) -> GpStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(GpStatus::Parse, format!("dump is not UTF-8: {e}")))?;
        let f = gperim::dump::parse_dump(s)?;
        write_out(out, boxed_field(f))
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from [`gp_field_dump`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, GpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(gp_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }

    #[test]
    fn every_error_variant_has_a_status() {
        let e = Error::Parse {
            line: 2,
            reason: "x".into(),
        };
        assert_eq!(status_of(&e), GpStatus::Parse);
        assert_eq!(
            status_of(&Error::InfeasiblePair { node: 0, norm: 2.0 }),
            GpStatus::Infeasible
        );
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(gp_version()) };
        assert_eq!(v.to_str().unwrap(), gperim::VERSION);
    }
}
