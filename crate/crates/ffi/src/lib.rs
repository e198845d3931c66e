//! C ABI for the oral-billiards simulator.
//!
//! Tables and trajectories are opaque handles, each released with its own
//! `*_free` function. Every call returns an [`ObStatus`];
//! on failure `ob_last_error_message` describes the error for the calling
//! thread. Strings handed out by the library are freed with `ob_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oral_billiards::data;
use oral_billiards::dynamics::{simulate, to_jsonl, BallSpec, BallState, SimOptions, Termination, Trajectory};
use oral_billiards::geometry::{build_default_polygon, OralPolygon, PolygonConfig, Table, Vec2};
use oral_billiards::grammar::GrammarError;
use oral_billiards::phonetics::parse_phones;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Geometry = 3,
    Simulation = 4,
    GrammarRejected = 5,
    Panic = 6,
}

/// A billiard table.
pub struct ObTable {
    table: Table,
}

/// A finished trajectory.
pub struct ObTrajectory {
    trajectory: Trajectory,
}

/// One collision.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObEvent {
    pub side: usize,
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub dx_out: f64,
    pub dy_out: f64,
    pub speed_out: f64,
    pub flight_length: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObTermination {
    MaxEvents = 0,
    CornerHit = 1,
    EnergyFloor = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Run `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (ObStatus, String)>) -> ObStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ObStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ObStatus::Panic
        }
    }
}

fn null(what: &str) -> (ObStatus, String) {
    (ObStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ObStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ObStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), (ObStatus, String)> {
    let c = CString::new(s).map_err(|_| (ObStatus::InvalidArgument, "interior NUL".to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn give_table(table: Table, out: *mut *mut ObTable) {
    unsafe { *out = Box::into_raw(Box::new(ObTable { table })) };
}

fn from_oral(p: Result<OralPolygon, oral_billiards::geometry::GeometryError>) -> Result<Table, (ObStatus, String)> {
    p.map(|p| p.table().clone())
        .map_err(|e| (ObStatus::Geometry, e.to_string()))
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ob_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reference oral polygon with a jaw line of `scale` cm (6 to 10).
///
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ob_polygon_default(scale: f64, out: *mut *mut ObTable) -> ObStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        give_table(from_oral(build_default_polygon(scale))?, out);
        Ok(())
    })
}

/// Oral polygon from a JSON configuration.
///
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ob_polygon_from_json(json: *const c_char, out: *mut *mut ObTable) -> ObStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = PolygonConfig::from_json(text).map_err(|e| (ObStatus::Geometry, e.to_string()))?;
        give_table(from_oral(OralPolygon::from_config(&cfg))?, out);
        Ok(())
    })
}

/// Convex table from `n` counterclockwise vertices given as `xy[2i], xy[2i+1]`;
/// sides are labelled a, b, c, ...
///
/// `xy` must point to `2 * n` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ob_table_new(xy: *const f64, n: usize, out: *mut *mut ObTable) -> ObStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let coords = std::slice::from_raw_parts(xy, 2 * n);
        let verts = coords.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
        let table = Table::lettered(verts).map_err(|e| (ObStatus::Geometry, e.to_string()))?;
        give_table(table, out);
        Ok(())
    })
}

/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ob_polygon_free(t: *mut ObTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// `t` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_polygon_side_count(t: *const ObTable, out: *mut usize) -> ObStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = t.table.sides();
        Ok(())
    })
}

/// Label of side `side`, as a new string.
///
/// `t` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_polygon_side_label(t: *const ObTable, side: usize, out: *mut *mut c_char) -> ObStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if side >= t.table.sides() {
            return Err((ObStatus::InvalidArgument, format!("side {side} out of range")));
        }
        give_string(t.table.label(side).to_string(), out)
    })
}

/// Conservative point-ball run launched from arc length `s` on `side` at
/// `angle` radians from the side's tangent. `eps_corner <= 0` selects the
/// default corner tolerance.
///
/// `t` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_simulate(
    t: *const ObTable,
    side: usize,
    s: f64,
    angle: f64,
    max_events: usize,
    eps_corner: f64,
    out: *mut *mut ObTrajectory,
) -> ObStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("table"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if side >= t.table.sides() {
            return Err((ObStatus::InvalidArgument, format!("side {side} out of range")));
        }
        let len = t.table.polygon().side_length(side);
        if !(s >= 0.0 && s <= len && angle > 0.0 && angle < std::f64::consts::PI) {
            return Err((ObStatus::InvalidArgument, format!("launch (s={s}, angle={angle}) is not inward from side {side}")));
        }
        let opts = SimOptions {
            max_events,
            eps_corner: (eps_corner > 0.0).then_some(eps_corner),
            ..SimOptions::default()
        };
        let init = BallState::on_side(&t.table, side, s, angle, 1.0);
        let trajectory =
            simulate(&t.table, init, &BallSpec::point(), &opts).map_err(|e| (ObStatus::Simulation, e.to_string()))?;
        *out = Box::into_raw(Box::new(ObTrajectory { trajectory }));
        Ok(())
    })
}

/// `tr` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_free(tr: *mut ObTrajectory) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}

/// `tr` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_event_count(tr: *const ObTrajectory, out: *mut usize) -> ObStatus {
    guard(|| {
        let tr = tr.as_ref().ok_or_else(|| null("trajectory"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = tr.trajectory.events.len();
        Ok(())
    })
}

/// `tr` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_event(tr: *const ObTrajectory, index: usize, out: *mut ObEvent) -> ObStatus {
    guard(|| {
        let tr = tr.as_ref().ok_or_else(|| null("trajectory"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let e = tr
            .trajectory
            .events
            .get(index)
            .ok_or_else(|| (ObStatus::InvalidArgument, format!("event {index} out of range")))?;
        *out = ObEvent {
            side: e.side,
            s: e.s,
            x: e.point.x,
            y: e.point.y,
            dx_out: e.outgoing.x,
            dy_out: e.outgoing.y,
            speed_out: e.speed_out,
            flight_length: e.flight_length,
        };
        Ok(())
    })
}

/// `tr` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_termination(tr: *const ObTrajectory, out: *mut ObTermination) -> ObStatus {
    guard(|| {
        let tr = tr.as_ref().ok_or_else(|| null("trajectory"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match tr.trajectory.termination {
            Termination::MaxEvents => ObTermination::MaxEvents,
            Termination::CornerHit(_) => ObTermination::CornerHit,
            Termination::EnergyFloor { .. } => ObTermination::EnergyFloor,
        };
        Ok(())
    })
}

/// Side labels hit, separated by single spaces.
///
/// `tr` and `out` must be valid pointers; free the result with `ob_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_word(tr: *const ObTrajectory, out: *mut *mut c_char) -> ObStatus {
    guard(|| {
        let tr = tr.as_ref().ok_or_else(|| null("trajectory"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        give_string(tr.trajectory.word().join(" "), out)
    })
}

/// The JSONL event log.
///
/// `tr` and `out` must be valid pointers; free the result with `ob_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ob_trajectory_jsonl(tr: *const ObTrajectory, out: *mut *mut c_char) -> ObStatus {
    guard(|| {
        let tr = tr.as_ref().ok_or_else(|| null("trajectory"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        give_string(to_jsonl(&tr.trajectory), out)
    })
}

/// Validate whitespace-separated `symbol/M` phones. On success writes the
/// syllable count; on `GrammarRejected` writes the offending token index
/// (or `SIZE_MAX` when the error has none).
///
/// `phones` must be a NUL-terminated string; the out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn ob_grammar_validate(
    phones: *const c_char,
    syllables: *mut usize,
    error_index: *mut usize,
) -> ObStatus {
    guard(|| {
        let text = read_str(phones, "phones")?;
        let inventory = data::load_inventory().map_err(|e| (ObStatus::InvalidArgument, e.to_string()))?;
        let grammar = data::load_grammar().map_err(|e| (ObStatus::InvalidArgument, e.to_string()))?;
        let tokens = parse_phones(text, &inventory).map_err(|e| (ObStatus::InvalidArgument, e.to_string()))?;
        match grammar.validate(&tokens) {
            Ok(p) => {
                if !syllables.is_null() {
                    *syllables = p.syllables.len();
                }
                Ok(())
            }
            Err(e) => {
                if !error_index.is_null() {
                    *error_index = e.index().unwrap_or(usize::MAX);
                }
                let status = match e {
                    GrammarError::Phonetics(_) => ObStatus::InvalidArgument,
                    _ => ObStatus::GrammarRejected,
                };
                Err((status, e.to_string()))
            }
        }
    })
}
