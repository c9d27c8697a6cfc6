//! C interface to henonlab.
//!
//! Objects cross the boundary as opaque handles created by `hl_*_new` or a
//! computation and released by the matching `hl_*_free`. Every fallible call
//! returns an [`HlStatus`]; on failure the message is available from
//! [`hl_last_error`] on the same thread until the next failing call. Panics
//! are caught and reported as [`HlStatus::Panic`].

use henonlab::periodic::{find_periodic_orbits, OrbitSearch, OrbitType, PeriodicOrbit};
use henonlab::potential::Potential;
use henonlab::splitting::{
    build_julia_cover, recheck, verify_dominated_splitting, verify_hyperbolicity, ConeParams, CoverOptions,
    SplittingCertificate, DEFAULT_R,
};
use henonlab::{Direction, HenonError, HenonMap, Point2C, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMap = 3,
    NotInvertible = 4,
    NoConvergence = 5,
    OrbitEscaped = 6,
    Parse = 7,
    Io = 8,
    Certificate = 9,
    Panic = 10,
    Internal = 11,
}

/// A point (x, y) of C² as four doubles.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HlPoint {
    pub x_re: f64,
    pub x_im: f64,
    pub y_re: f64,
    pub y_im: f64,
}

impl From<HlPoint> for Point2C {
    fn from(p: HlPoint) -> Self {
        Point2C::new(C64::new(p.x_re, p.x_im), C64::new(p.y_re, p.y_im))
    }
}

impl From<Point2C> for HlPoint {
    fn from(p: Point2C) -> Self {
        HlPoint {
            x_re: p.x.re,
            x_im: p.x.im,
            y_re: p.y.re,
            y_im: p.y.im,
        }
    }
}

/// Orbit type codes used in [`HlOrbitInfo::kind`].
pub const HL_ORBIT_ATTRACTING: i32 = 0;
pub const HL_ORBIT_SADDLE: i32 = 1;
pub const HL_ORBIT_SEMI_PARABOLIC: i32 = 2;
pub const HL_ORBIT_SEMI_NEUTRAL: i32 = 3;

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HlOrbitInfo {
    pub period: usize,
    pub kind: i32,
    pub lambda1_re: f64,
    pub lambda1_im: f64,
    pub lambda2_re: f64,
    pub lambda2_im: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HlCertificateSummary {
    pub boxes: usize,
    pub verified: usize,
    /// Chain length N; 0 when no box verified.
    pub n: usize,
    pub c: f64,
    /// Certified expansion rate, NaN for splitting-only certificates.
    pub lambda_u: f64,
}

/// Opaque map handle.
pub struct HlMap(HenonMap);

/// Opaque list of periodic orbits.
pub struct HlOrbits(Vec<PeriodicOrbit>);

/// Opaque splitting or hyperbolicity certificate.
pub struct HlCertificate(SplittingCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &HenonError) -> HlStatus {
    match e {
        HenonError::InvalidMap(_) => HlStatus::InvalidMap,
        HenonError::Domain(_) | HenonError::InvalidArgument(_) | HenonError::NotFound(_) => {
            HlStatus::InvalidArgument
        }
        HenonError::NotInvertible => HlStatus::NotInvertible,
        HenonError::FiltrationSearch { .. } | HenonError::NoConvergence(_) => HlStatus::NoConvergence,
        HenonError::OrbitEscaped { .. } => HlStatus::OrbitEscaped,
        HenonError::Certificate(_) => HlStatus::Certificate,
        HenonError::Io(_) => HlStatus::Io,
        HenonError::Json(_) => HlStatus::Parse,
    }
}

/// Runs `f`, converting errors and panics into a status with a stored message.
fn guard<F>(f: F) -> HlStatus
where
    F: FnOnce() -> Result<(), (HlStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            HlStatus::Panic
        }
    }
}

fn lib<T>(r: henonlab::Result<T>) -> Result<T, (HlStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn string_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (HlStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (HlStatus::Parse, format!("{what}: {e}")))
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds (p(x) − b·y, x) from `len` coefficients in ascending degree.
///
/// # Safety
/// `re` and `im` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    b_re: f64,
    b_im: f64,
    out: *mut *mut HlMap,
) -> HlStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("coefficients"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let coeffs = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let map = lib(HenonMap::new(coeffs, C64::new(b_re, b_im)))?;
        write_out(out, Box::into_raw(Box::new(HlMap(map))), "out")
    })
}

/// Parses a map file body (JSON schema `{"p": [...], "b": ..., "compose": [...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_from_json(json: *const c_char, out: *mut *mut HlMap) -> HlStatus {
    guard(|| {
        let text = string_arg(json, "json")?;
        let map = lib(henonlab::io::map_from_json(text))?;
        write_out(out, Box::into_raw(Box::new(HlMap(map))), "out")
    })
}

/// # Safety
/// `map` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn hl_map_free(map: *mut HlMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Topological degree d of the map.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_degree(map: *const HlMap, out: *mut usize) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        write_out(out, m.0.degree(), "out")
    })
}

/// # Safety
/// `map` must be a live handle; `z` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_apply(map: *const HlMap, z: *const HlPoint, out: *mut HlPoint) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let z = *deref(z, "z")?;
        let w = lib(m.0.apply(z.into()))?;
        write_out(out, w.into(), "out")
    })
}

/// # Safety
/// `map` must be a live handle; `z` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_apply_inverse(map: *const HlMap, z: *const HlPoint, out: *mut HlPoint) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let z = *deref(z, "z")?;
        let w = lib(m.0.apply_inverse(z.into()))?;
        write_out(out, w.into(), "out")
    })
}

/// Verified filtration radius R.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_map_filtration_radius(map: *const HlMap, out: *mut f64) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let r = lib(m.0.filtration_radius())?.radius;
        write_out(out, r, "out")
    })
}

/// Green function G⁺ (`backward` = 0) or G⁻ (`backward` ≠ 0) at z.
///
/// # Safety
/// `map` must be a live handle; `z` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hl_green(map: *const HlMap, z: *const HlPoint, backward: i32, out: *mut f64) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let z = *deref(z, "z")?;
        let dir = if backward != 0 { Direction::Backward } else { Direction::Forward };
        let pot = lib(Potential::new(&m.0))?;
        let g = lib(pot.green(z.into(), dir, &Default::default()))?;
        write_out(out, g, "out")
    })
}

/// Periodic orbits of exact period `period` from `seeds` Newton seeds.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_periodic_orbits(
    map: *const HlMap,
    period: usize,
    seeds: usize,
    seed: u64,
    out: *mut *mut HlOrbits,
) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let mut search = lib(OrbitSearch::new(&m.0, seeds))?;
        search.seed = seed;
        let orbits = lib(find_periodic_orbits(&m.0, period, &search))?;
        write_out(out, Box::into_raw(Box::new(HlOrbits(orbits))), "out")
    })
}

/// # Safety
/// `orbits` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_orbits_len(orbits: *const HlOrbits) -> usize {
    orbits.as_ref().map_or(0, |o| o.0.len())
}

/// Period, type and multipliers of orbit `i`.
///
/// # Safety
/// `orbits` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_orbits_info(orbits: *const HlOrbits, i: usize, out: *mut HlOrbitInfo) -> HlStatus {
    guard(|| {
        let o = deref(orbits, "orbits")?;
        let orbit = o.0.get(i).ok_or_else(|| {
            (HlStatus::InvalidArgument, format!("orbit index {i} out of range ({})", o.0.len()))
        })?;
        let kind = match orbit.kind {
            OrbitType::Attracting => HL_ORBIT_ATTRACTING,
            OrbitType::Saddle => HL_ORBIT_SADDLE,
            OrbitType::SemiParabolic => HL_ORBIT_SEMI_PARABOLIC,
            OrbitType::SemiNeutral => HL_ORBIT_SEMI_NEUTRAL,
        };
        let info = HlOrbitInfo {
            period: orbit.period,
            kind,
            lambda1_re: orbit.lambda1.re,
            lambda1_im: orbit.lambda1.im,
            lambda2_re: orbit.lambda2.re,
            lambda2_im: orbit.lambda2.im,
        };
        write_out(out, info, "out")
    })
}

/// Point `k` of orbit `i`.
///
/// # Safety
/// `orbits` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_orbits_point(orbits: *const HlOrbits, i: usize, k: usize, out: *mut HlPoint) -> HlStatus {
    guard(|| {
        let o = deref(orbits, "orbits")?;
        let p = o
            .0
            .get(i)
            .and_then(|orbit| orbit.points.get(k))
            .ok_or_else(|| (HlStatus::InvalidArgument, format!("point ({i}, {k}) out of range")))?;
        write_out(out, (*p).into(), "out")
    })
}

/// # Safety
/// `orbits` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_orbits_free(orbits: *mut HlOrbits) {
    if !orbits.is_null() {
        drop(Box::from_raw(orbits));
    }
}

unsafe fn certify(
    map: *const HlMap,
    depth: usize,
    alpha: f64,
    lambda_u: Option<f64>,
    out: *mut *mut HlCertificate,
) -> HlStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let radius = lib(m.0.filtration_radius())?.radius;
        let cover = lib(build_julia_cover(&m.0, radius, &CoverOptions::new(depth)))?;
        let cone = lib(ConeParams::for_cover(&m.0, &cover, alpha, DEFAULT_R))?;
        let cert = match lambda_u {
            None => lib(verify_dominated_splitting(&m.0, &cover, &cone))?,
            Some(l) => lib(verify_hyperbolicity(&m.0, &cover, &cone, l))?,
        };
        write_out(out, Box::into_raw(Box::new(HlCertificate(cert))), "out")
    })
}

/// Dominated-splitting certificate on the level-`depth` cover with cone
/// aperture `alpha`.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_verify_splitting(
    map: *const HlMap,
    depth: usize,
    alpha: f64,
    out: *mut *mut HlCertificate,
) -> HlStatus {
    certify(map, depth, alpha, None, out)
}

/// Hyperbolicity certificate with expansion rate `lambda_u` > 1.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_verify_hyperbolicity(
    map: *const HlMap,
    depth: usize,
    alpha: f64,
    lambda_u: f64,
    out: *mut *mut HlCertificate,
) -> HlStatus {
    certify(map, depth, alpha, Some(lambda_u), out)
}

/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate_summary(cert: *const HlCertificate, out: *mut HlCertificateSummary) -> HlStatus {
    guard(|| {
        let c = &deref(cert, "cert")?.0;
        let s = HlCertificateSummary {
            boxes: c.boxes.len(),
            verified: c.verified_count(),
            n: c.n,
            c: c.c,
            lambda_u: c.lambda_u.unwrap_or(f64::NAN),
        };
        write_out(out, s, "out")
    })
}

/// Certificate as JSON; release with [`hl_string_free`].
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate_to_json(cert: *const HlCertificate, out: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let c = &deref(cert, "cert")?.0;
        let text = lib(c.to_json())?;
        let s = CString::new(text).map_err(|e| (HlStatus::Internal, e.to_string()))?;
        write_out(out, s.into_raw(), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate_from_json(json: *const c_char, out: *mut *mut HlCertificate) -> HlStatus {
    guard(|| {
        let text = string_arg(json, "json")?;
        let cert = lib(SplittingCertificate::from_json(text))?;
        write_out(out, Box::into_raw(Box::new(HlCertificate(cert))), "out")
    })
}

/// Re-verifies every Verified box; writes the number of boxes that did not
/// re-verify to `mismatches` (0 means the certificate stands).
///
/// # Safety
/// `cert` must be a live handle; `mismatches` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate_recheck(cert: *const HlCertificate, mismatches: *mut usize) -> HlStatus {
    guard(|| {
        let c = &deref(cert, "cert")?.0;
        let rep = lib(recheck(c))?;
        write_out(mismatches, rep.mismatches.len(), "mismatches")
    })
}

/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_certificate_free(cert: *mut HlCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(HlStatus::Ok as i32, 0);
        assert_eq!(HlStatus::Panic as i32, 10);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, HlStatus::Panic);
        let msg = unsafe { CStr::from_ptr(hl_last_error()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }

    #[test]
    fn point_conversion_round_trips() {
        let p = HlPoint {
            x_re: 1.0,
            x_im: -2.0,
            y_re: 0.5,
            y_im: 3.0,
        };
        assert_eq!(HlPoint::from(Point2C::from(p)), p);
    }
}
