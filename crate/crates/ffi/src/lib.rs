//! C ABI over the kinground toolkit.
//!
//! Every fallible call returns a `KgStatus`; on failure the message is
//! available from `kg_last_error_message` on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kinground::eval::{score_clock, score_interval, score_scalar};
use kinground::geometry::Vec3;
use kinground::interchange::{read_manifest, ObjectClass, SceneManifest};
use kinground::trajectory::{
    clock_direction, direction_angle, speed, total_distance, traveled_distance, DirectionLabel, DirectionSample,
    KinematicsConfig, Trajectory, GRID_STEP,
};
use kinground::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Input failed validation or an argument was out of range.
    Invalid = 3,
    Io = 4,
    NotFound = 5,
    Panic = 6,
}

/// A parsed, validated scene manifest.
pub struct KgManifest(SceneManifest);

/// An object trajectory on the 0.5 s grid.
pub struct KgTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KgStatus, msg: impl Into<String>) -> KgStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> KgStatus {
    let status = if e.is_io() { KgStatus::Io } else { KgStatus::Invalid };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> KgStatus) -> KgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(KgStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, KgStatus> {
    if p.is_null() {
        return Err(fail(KgStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KgStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

macro_rules! out_ptr {
    ($p:expr, $name:literal) => {
        if $p.is_null() {
            return fail(KgStatus::NullPointer, concat!($name, " is null"));
        }
    };
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_read(path: *const c_char, out: *mut *mut KgManifest) -> KgStatus {
    guard(|| {
        out_ptr!(out, "out");
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match read_manifest(path) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(KgManifest(m)));
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_parse(json: *const c_char, out: *mut *mut KgManifest) -> KgStatus {
    guard(|| {
        out_ptr!(out, "out");
        let text = match str_arg(json, "json") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match SceneManifest::from_json_str(text, "manifest") {
            Ok(m) => {
                *out = Box::into_raw(Box::new(KgManifest(m)));
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `m` must come from `kg_manifest_read`/`kg_manifest_parse` or be null.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_free(m: *mut KgManifest) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live manifest handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_object_count(m: *const KgManifest, out: *mut usize) -> KgStatus {
    guard(|| {
        out_ptr!(m, "manifest");
        out_ptr!(out, "out");
        *out = (&*m).0.objects.len();
        KgStatus::Ok
    })
}

/// Copies the id of object `index` into `buf` (nul-terminated, truncated to
/// `len` bytes) and stores the full length, without the nul, in `needed`.
///
/// # Safety
/// `m` must be a live handle; `buf` must hold `len` bytes or be null with
/// `len` 0; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_object_id(
    m: *const KgManifest,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> KgStatus {
    guard(|| {
        out_ptr!(m, "manifest");
        let Some(o) = (&*m).0.objects.get(index) else {
            return fail(KgStatus::NotFound, format!("object index {index} out of range"));
        };
        let id = o.object_id.as_bytes();
        if !needed.is_null() {
            *needed = id.len();
        }
        if len > 0 {
            if buf.is_null() {
                return fail(KgStatus::NullPointer, "buf is null");
            }
            let n = id.len().min(len - 1);
            ptr::copy_nonoverlapping(id.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        KgStatus::Ok
    })
}

/// Resamples one object of a manifest onto the grid with default settings.
///
/// # Safety
/// `m` must be a live handle, `object_id` a nul-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kg_manifest_trajectory(
    m: *const KgManifest,
    object_id: *const c_char,
    out: *mut *mut KgTrajectory,
) -> KgStatus {
    guard(|| {
        out_ptr!(m, "manifest");
        out_ptr!(out, "out");
        let id = match str_arg(object_id, "object_id") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let Some(o) = (&*m).0.object(id) else {
            return fail(KgStatus::NotFound, format!("no object {id}"));
        };
        match Trajectory::resample(&o.object_id, o.class, &o.raw_samples(), &KinematicsConfig::default()) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(KgTrajectory(t)));
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds a trajectory from `n` positions laid out as x, y, z triples, the
/// first at grid time `first_index * 0.5` s.
///
/// # Safety
/// `xyz` must point to `3 * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_trajectory_new(
    xyz: *const f64,
    n: usize,
    first_index: i64,
    out: *mut *mut KgTrajectory,
) -> KgStatus {
    guard(|| {
        out_ptr!(xyz, "xyz");
        out_ptr!(out, "out");
        let flat = std::slice::from_raw_parts(xyz, 3 * n);
        let positions = flat.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        match Trajectory::new("object", ObjectClass::Other, GRID_STEP, first_index, positions) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(KgTrajectory(t)));
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `t` must come from a trajectory constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn kg_trajectory_free(t: *mut KgTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_trajectory_span(t: *const KgTrajectory, start: *mut f64, end: *mut f64) -> KgStatus {
    guard(|| {
        out_ptr!(t, "trajectory");
        out_ptr!(start, "start");
        out_ptr!(end, "end");
        *start = (&*t).0.start();
        *end = (&*t).0.end();
        KgStatus::Ok
    })
}

/// Sum of chord lengths between grid times `s` and `e`, meters. Both must
/// lie on the trajectory's grid.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_traveled_distance(t: *const KgTrajectory, s: f64, e: f64, out: *mut f64) -> KgStatus {
    guard(|| {
        out_ptr!(t, "trajectory");
        out_ptr!(out, "out");
        match traveled_distance(&(&*t).0, s, e) {
            Ok(d) => {
                *out = d;
                KgStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_total_distance(t: *const KgTrajectory, out: *mut f64) -> KgStatus {
    guard(|| {
        out_ptr!(t, "trajectory");
        out_ptr!(out, "out");
        *out = total_distance(&(&*t).0);
        KgStatus::Ok
    })
}

/// Average speed between grid times `s` and `e`, km/h.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_speed_kmh(t: *const KgTrajectory, s: f64, e: f64, out: *mut f64) -> KgStatus {
    guard(|| {
        out_ptr!(t, "trajectory");
        out_ptr!(out, "out");
        match speed(&(&*t).0, s, e) {
            Ok(v) => {
                *out = v;
                KgStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// Clock hour (1 to 12) of the step starting at grid time `time`, relative
/// to the first displacement; 0 when the step is stationary.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_direction_hour(t: *const KgTrajectory, time: f64, out: *mut u8) -> KgStatus {
    guard(|| {
        out_ptr!(t, "trajectory");
        out_ptr!(out, "out");
        match direction_angle(&(&*t).0, time, &KinematicsConfig::default()) {
            Ok(DirectionSample::Angle(a)) => {
                *out = match clock_direction(a) {
                    DirectionLabel::Hour(h) => h,
                    DirectionLabel::Stationary => 0,
                };
                KgStatus::Ok
            }
            Ok(DirectionSample::Stationary) => {
                *out = 0;
                KgStatus::Ok
            }
            Err(err) => from_error(err),
        }
    })
}

/// Clock hour of a clockwise angle in degrees.
#[no_mangle]
pub extern "C" fn kg_clock_from_angle(angle_deg: f64) -> u8 {
    match clock_direction(angle_deg) {
        DirectionLabel::Hour(h) => h,
        DirectionLabel::Stationary => 0,
    }
}

/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_score_scalar(y: f64, yhat: f64, correct: *mut bool, abs_err: *mut f64) -> KgStatus {
    guard(|| {
        out_ptr!(correct, "correct");
        out_ptr!(abs_err, "abs_err");
        match score_scalar(y, yhat) {
            Ok(s) => {
                *correct = s.correct;
                *abs_err = s.abs_err;
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_score_clock(y: u8, yhat: u8, correct: *mut bool, err: *mut u8) -> KgStatus {
    guard(|| {
        out_ptr!(correct, "correct");
        out_ptr!(err, "err");
        match score_clock(y, yhat) {
            Ok(s) => {
                *correct = s.correct;
                *err = s.err;
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_score_interval(
    y_start: f64,
    y_end: f64,
    yhat_start: f64,
    yhat_end: f64,
    correct: *mut bool,
    iou: *mut f64,
) -> KgStatus {
    guard(|| {
        out_ptr!(correct, "correct");
        out_ptr!(iou, "iou");
        match score_interval([y_start, y_end], [yhat_start, yhat_end]) {
            Ok(s) => {
                *correct = s.correct;
                *iou = s.iou;
                KgStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
