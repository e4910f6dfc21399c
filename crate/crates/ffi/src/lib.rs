//! C ABI for the rfct tracker.
//!
//! Every fallible call returns an `RfctStatus`. On failure a description is
//! kept per thread and can be read with `rfct_last_error_message`. Objects
//! are opaque and owned by the caller once created; release them with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rfct::evaluation::{evaluate, SequenceResult, PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS};
use rfct::features::Frame;
use rfct::{BoundingBox, Error, Tracker, TrackerConfig};

/// Number of entries in `RfctMetrics.precision`.
pub const RFCT_PRECISION_POINTS: usize = 51;
/// Number of entries in `RfctMetrics.success`.
pub const RFCT_SUCCESS_POINTS: usize = 21;

const _: () = assert!(RFCT_PRECISION_POINTS == PRECISION_THRESHOLDS && RFCT_SUCCESS_POINTS == SUCCESS_THRESHOLDS);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfctStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    TrackingState = 4,
    Init = 5,
    Io = 6,
    /// A string argument was not valid UTF-8.
    Utf8 = 7,
    /// A Rust panic was caught at the boundary. The handle involved should
    /// be freed and not used again.
    Panic = 8,
}

/// Axis-aligned box, 0-indexed pixel coordinates of the top-left corner.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RfctBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RfctMetrics {
    /// Precision at 20 px.
    pub dp20: f64,
    /// Success at overlap 0.5.
    pub op50: f64,
    /// Area under the success curve.
    pub auc: f64,
    /// Frames that had valid ground truth.
    pub frames: usize,
    /// Precision at thresholds 0, 1, .., 50 px.
    pub precision: [f64; RFCT_PRECISION_POINTS],
    /// Success at thresholds 0, 0.05, .., 1.
    pub success: [f64; RFCT_SUCCESS_POINTS],
}

/// Opaque tracker configuration.
pub struct RfctConfig(TrackerConfig);

/// Opaque tracker instance.
pub struct RfctTracker(Tracker);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RfctStatus {
    match e {
        Error::InvalidInput(_) | Error::TestScale(_) => RfctStatus::InvalidInput,
        Error::Config(_) => RfctStatus::Config,
        Error::TrackingState(_) => RfctStatus::TrackingState,
        Error::Init(_) => RfctStatus::Init,
        Error::Io(_) => RfctStatus::Io,
    }
}

struct Failure(RfctStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RfctStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RfctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RfctStatus::Ok
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
            RfctStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(RfctStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn frame_arg(pixels: *const u8, width: usize, height: usize, channels: usize) -> Result<Frame, Failure> {
    if pixels.is_null() {
        return Err(null("pixels"));
    }
    if channels != 1 && channels != 3 {
        return Err(Failure(RfctStatus::InvalidInput, format!("channels must be 1 or 3, got {channels}")));
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Failure(RfctStatus::InvalidInput, "image dimensions overflow".into()))?;
    let data = std::slice::from_raw_parts(pixels, len);
    Ok(if channels == 3 { Frame::from_rgb(width, height, data)? } else { Frame::from_gray(width, height, data)? })
}

fn to_c(b: &BoundingBox) -> RfctBox {
    RfctBox { x: b.x, y: b.y, w: b.w, h: b.h }
}

/// Box for evaluation; NaN or non-positive sizes mean "no box".
fn from_c(b: &RfctBox) -> Option<BoundingBox> {
    BoundingBox::new(b.x, b.y, b.w, b.h).ok()
}

/// Message for the last failed call on this thread, or null if the last
/// call succeeded. Valid until the next rfct call on the same thread.
#[no_mangle]
pub extern "C" fn rfct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rfct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a configuration holding the default parameters.
#[no_mangle]
pub extern "C" fn rfct_config_new() -> *mut RfctConfig {
    Box::into_raw(Box::new(RfctConfig(TrackerConfig::default())))
}

/// Reads a `key = value` configuration file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rfct_config_load(path: *const c_char, out: *mut *mut RfctConfig) -> RfctStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = TrackerConfig::load(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(RfctConfig(cfg)));
        Ok(())
    })
}

/// Sets one parameter by its configuration-file key, e.g. `"lambda"` or
/// `"map.kind"`. The value is parsed and validated immediately; on error the
/// configuration is unchanged.
///
/// # Safety
/// `config` must come from this library; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rfct_config_set(
    config: *mut RfctConfig,
    key: *const c_char,
    value: *const c_char,
) -> RfctStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let (key, value) = (str_arg(key, "key")?, str_arg(value, "value")?);
        let mut next = cfg.0.clone();
        next.set(key, value)?;
        next.validate()?;
        cfg.0 = next;
        Ok(())
    })
}

/// The configuration in file form, one `key = value` line per parameter.
/// Returns null if `config` is null. Release with `rfct_string_free`.
///
/// # Safety
/// `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rfct_config_to_text(config: *const RfctConfig) -> *mut c_char {
    match config.as_ref() {
        Some(c) => CString::new(c.0.to_text()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rfct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rfct_config_free(config: *mut RfctConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Starts tracking `init` in the first frame. `pixels` is row-major,
/// `channels` is 1 (gray) or 3 (RGB) bytes per pixel with no row padding.
/// A null `config` uses the defaults.
///
/// # Safety
/// `pixels` must point to `width * height * channels` bytes; `out` must be a
/// valid pointer; `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rfct_tracker_new(
    config: *const RfctConfig,
    pixels: *const u8,
    width: usize,
    height: usize,
    channels: usize,
    init: RfctBox,
    out: *mut *mut RfctTracker,
) -> RfctStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let default;
        let cfg = match config.as_ref() {
            Some(c) => &c.0,
            None => {
                default = TrackerConfig::default();
                &default
            }
        };
        let frame = frame_arg(pixels, width, height, channels)?;
        let b =
            BoundingBox::new(init.x, init.y, init.w, init.h).map_err(|e| Failure(RfctStatus::Init, e.to_string()))?;
        *out = Box::into_raw(Box::new(RfctTracker(Tracker::init(&frame, b, cfg)?)));
        Ok(())
    })
}

/// Tracks into the next frame and writes the new box to `out`.
///
/// # Safety
/// As for `rfct_tracker_new`; `tracker` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn rfct_tracker_step(
    tracker: *mut RfctTracker,
    pixels: *const u8,
    width: usize,
    height: usize,
    channels: usize,
    out: *mut RfctBox,
) -> RfctStatus {
    guard(|| {
        let t = tracker.as_mut().ok_or_else(|| null("tracker"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let frame = frame_arg(pixels, width, height, channels)?;
        *out = to_c(&t.0.step(&frame)?);
        Ok(())
    })
}

/// Current box, scale factor and number of frames processed. Any output
/// pointer may be null.
///
/// # Safety
/// `tracker` must come from this library; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfct_tracker_state(
    tracker: *const RfctTracker,
    bbox: *mut RfctBox,
    kappa: *mut f64,
    frame_index: *mut u64,
) -> RfctStatus {
    guard(|| {
        let t = tracker.as_ref().ok_or_else(|| null("tracker"))?;
        if let Some(b) = bbox.as_mut() {
            *b = to_c(&t.0.bbox());
        }
        if let Some(k) = kappa.as_mut() {
            *k = t.0.kappa();
        }
        if let Some(k) = frame_index.as_mut() {
            *k = t.0.frame_index();
        }
        Ok(())
    })
}

/// # Safety
/// `tracker` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rfct_tracker_free(tracker: *mut RfctTracker) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}

/// Scores `n` predicted boxes against ground truth. A ground-truth box with
/// NaN or non-positive size is skipped; such a prediction counts as a miss.
///
/// # Safety
/// `predictions` and `ground_truth` must each point to `n` boxes and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rfct_evaluate(
    predictions: *const RfctBox,
    ground_truth: *const RfctBox,
    n: usize,
    out: *mut RfctMetrics,
) -> RfctStatus {
    guard(|| {
        if predictions.is_null() || ground_truth.is_null() {
            return Err(null("box array"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let pred = std::slice::from_raw_parts(predictions, n).iter().map(from_c).collect();
        let gt = std::slice::from_raw_parts(ground_truth, n).iter().map(from_c).collect();
        let m = evaluate(&[SequenceResult::new("ffi", pred, gt)?])?;
        let mut r = RfctMetrics {
            dp20: m.dp20,
            op50: m.op50,
            auc: m.auc,
            frames: m.frames,
            precision: [0.0; RFCT_PRECISION_POINTS],
            success: [0.0; RFCT_SUCCESS_POINTS],
        };
        r.precision.copy_from_slice(&m.precision);
        r.success.copy_from_slice(&m.success);
        *out = r;
        Ok(())
    })
}
