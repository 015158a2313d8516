//! C ABI over the per-second emission session.
//!
//! Handles are opaque and owned by the caller: every `*_load*`/`*_create`
//! has a matching `*_free`/`*_destroy`. Functions return a [`MovestarStatus`]
//! and write results through out-pointers; out-pointers are left untouched on
//! failure. A session keeps its own reference to the tables, so the tables
//! handle may be freed while sessions created from it are still alive.
//! Sessions are not thread-safe; distinct sessions may be used from distinct
//! threads.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use movestar::model::{CycleResult, EmissionVector, SourceType};
use movestar::session::{EmissionSession, SessionError, StepOutput};
use movestar::tables::{load_table_set, TableError, TableSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovestarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownVehicle = 3,
    NegativeSpeed = 4,
    InvalidSpeed = 5,
    EmptySession = 6,
    TableIo = 7,
    TableInvalid = 8,
    Model = 9,
    Panic = 10,
}

/// Loaded parameter and rate tables.
pub struct MovestarTables {
    inner: Arc<TableSet>,
}

/// One vehicle's emission state.
pub struct MovestarSession {
    inner: EmissionSession,
}

/// Energy in kJ, pollutants in g, unless the tables declare otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MovestarEmissions {
    pub energy: f64,
    pub co: f64,
    pub hc: f64,
    pub nox: f64,
    pub co2: f64,
}

impl From<EmissionVector> for MovestarEmissions {
    fn from(v: EmissionVector) -> Self {
        MovestarEmissions { energy: v.energy, co: v.co, hc: v.hc, nox: v.nox, co2: v.co2 }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MovestarStep {
    pub opmode: u8,
    /// kW/t
    pub vsp: f64,
    /// m/s^2
    pub accel: f64,
    /// Emitted during this second.
    pub emissions: MovestarEmissions,
}

impl From<StepOutput> for MovestarStep {
    fn from(s: StepOutput) -> Self {
        MovestarStep { opmode: s.opmode.id(), vsp: s.vsp, accel: s.accel, emissions: s.emissions.into() }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MovestarSummary {
    pub seconds: usize,
    /// Metres.
    pub distance: f64,
    pub totals: MovestarEmissions,
    /// False when the session covered no distance; `factors` is then zeroed.
    pub factors_defined: bool,
    /// Totals per km.
    pub factors: MovestarEmissions,
}

impl From<&CycleResult> for MovestarSummary {
    fn from(r: &CycleResult) -> Self {
        let factors = r.factors.per_km().copied();
        MovestarSummary {
            seconds: r.per_second.len(),
            distance: r.distance,
            totals: r.totals.into(),
            factors_defined: factors.is_some(),
            factors: factors.map(Into::into).unwrap_or_default(),
        }
    }
}

fn table_status(e: &TableError) -> MovestarStatus {
    match e {
        TableError::Io { .. } => MovestarStatus::TableIo,
        _ => MovestarStatus::TableInvalid,
    }
}

fn session_status(e: &SessionError) -> MovestarStatus {
    match e {
        SessionError::NegativeSpeed(_) => MovestarStatus::NegativeSpeed,
        SessionError::InvalidSpeed(_) => MovestarStatus::InvalidSpeed,
        SessionError::EmptySession => MovestarStatus::EmptySession,
        SessionError::UnknownSourceType(_) => MovestarStatus::UnknownVehicle,
        SessionError::Model(_) => MovestarStatus::Model,
    }
}

fn guard(f: impl FnOnce() -> MovestarStatus) -> MovestarStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(MovestarStatus::Panic)
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, MovestarStatus> {
    if p.is_null() {
        return Err(MovestarStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map(Path::new).map_err(|_| MovestarStatus::InvalidArgument)
}

fn tables_handle(t: TableSet) -> *mut MovestarTables {
    Box::into_raw(Box::new(MovestarTables { inner: Arc::new(t) }))
}

/// Loads the built-in tables.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn movestar_tables_load_default(out: *mut *mut MovestarTables) -> MovestarStatus {
    guard(|| {
        if out.is_null() {
            return MovestarStatus::NullPointer;
        }
        *out = tables_handle(TableSet::shipped());
        MovestarStatus::Ok
    })
}

/// Loads and validates `params.csv`/`rates.csv` style files.
///
/// # Safety
/// Paths must be null or NUL-terminated UTF-8; `out` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn movestar_tables_load(
    params_path: *const c_char,
    rates_path: *const c_char,
    out: *mut *mut MovestarTables,
) -> MovestarStatus {
    guard(|| {
        if out.is_null() {
            return MovestarStatus::NullPointer;
        }
        let (params, rates) = match (path_arg(params_path), path_arg(rates_path)) {
            (Ok(p), Ok(r)) => (p, r),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        match load_table_set(params, rates) {
            Ok(t) => {
                *out = tables_handle(t);
                MovestarStatus::Ok
            }
            Err(e) => table_status(&e),
        }
    })
}

/// # Safety
/// `tables` must be null or a handle from a `movestar_tables_load*` call that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn movestar_tables_free(tables: *mut MovestarTables) {
    if !tables.is_null() {
        drop(Box::from_raw(tables));
    }
}

/// Starts a session for `veh_type` 1 (light-duty vehicle) or 2 (light-duty
/// truck).
///
/// # Safety
/// `tables` must be null or a live tables handle; `out` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn movestar_session_create(
    tables: *const MovestarTables,
    veh_type: i32,
    out: *mut *mut MovestarSession,
) -> MovestarStatus {
    guard(|| {
        if tables.is_null() || out.is_null() {
            return MovestarStatus::NullPointer;
        }
        let Some(st) = SourceType::from_veh_type(i64::from(veh_type)) else {
            return MovestarStatus::UnknownVehicle;
        };
        let inner = EmissionSession::new(st, Arc::clone(&(*tables).inner));
        *out = Box::into_raw(Box::new(MovestarSession { inner }));
        MovestarStatus::Ok
    })
}

/// Advances one second at `speed` m/s. On error the session is unchanged.
///
/// # Safety
/// `session` must be null or a live session handle; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn movestar_session_step(
    session: *mut MovestarSession,
    speed: f64,
    out: *mut MovestarStep,
) -> MovestarStatus {
    guard(|| {
        if session.is_null() || out.is_null() {
            return MovestarStatus::NullPointer;
        }
        match (*session).inner.step(speed) {
            Ok(s) => {
                *out = s.into();
                MovestarStatus::Ok
            }
            Err(e) => session_status(&e),
        }
    })
}

/// Totals and per-km factors over all steps so far. The session remains usable.
///
/// # Safety
/// `session` must be null or a live session handle; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn movestar_session_finalize(
    session: *const MovestarSession,
    out: *mut MovestarSummary,
) -> MovestarStatus {
    guard(|| {
        if session.is_null() || out.is_null() {
            return MovestarStatus::NullPointer;
        }
        match (*session).inner.finalize() {
            Ok(r) => {
                *out = (&r).into();
                MovestarStatus::Ok
            }
            Err(e) => session_status(&e),
        }
    })
}

/// # Safety
/// `session` must be null or a live session handle.
#[no_mangle]
pub unsafe extern "C" fn movestar_session_destroy(session: *mut MovestarSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn movestar_status_message(status: MovestarStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        MovestarStatus::Ok => c"ok",
        MovestarStatus::NullPointer => c"null pointer argument",
        MovestarStatus::InvalidArgument => c"invalid argument",
        MovestarStatus::UnknownVehicle => c"unknown vehicle type (expected 1 or 2)",
        MovestarStatus::NegativeSpeed => c"negative speed",
        MovestarStatus::InvalidSpeed => c"speed is not finite",
        MovestarStatus::EmptySession => c"session has not been stepped",
        MovestarStatus::TableIo => c"cannot read table file",
        MovestarStatus::TableInvalid => c"table file failed parsing or validation",
        MovestarStatus::Model => c"model error",
        MovestarStatus::Panic => c"internal error",
    };
    msg.as_ptr()
}
