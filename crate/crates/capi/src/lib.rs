//! C ABI for the qubitizer library.
//!
//! Specs travel as JSON strings and come back as opaque handles;
//! circuits and reports come back as heap-allocated C strings that the
//! caller releases with [`qbz_string_free`]. Every fallible call
//! returns a status code; the latest failure message is available per
//! thread through [`qbz_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use qubitizer::circuit::export_text;
use qubitizer::cli::{bounds_spec, synthesize_spec, verify_spec, JobConfig, Query};
use qubitizer::structured::{summand_count, Representation, StructuredSpec};

/// Status codes mirroring the CLI exit codes.
pub const QBZ_OK: i32 = 0;
pub const QBZ_ERR_VERIFICATION: i32 = 1;
pub const QBZ_ERR_SPEC: i32 = 2;
pub const QBZ_ERR_ARGUMENT: i32 = 3;

/// Queries a spec can be lowered into.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum QbzQuery {
    Hs = 0,
    Be = 1,
    Measure = 2,
    Walk = 3,
}

/// Opaque parsed spec handle.
pub struct QbzSpec {
    inner: StructuredSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let sanitized = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// # Safety
/// `text` must be a valid NUL-terminated string or NULL.
unsafe fn read_str<'a>(text: *const c_char) -> Option<&'a str> {
    if text.is_null() {
        return None;
    }
    CStr::from_ptr(text).to_str().ok()
}

fn job_config(query: QbzQuery, t: f64, steps: u32, order: u32, seed: u64) -> JobConfig {
    let query = match query {
        QbzQuery::Hs => Query::Hs,
        QbzQuery::Be => Query::Be,
        QbzQuery::Measure => Query::Measure,
        QbzQuery::Walk => Query::Walk,
    };
    let mut config = JobConfig::new("<memory>", query);
    config.t = t;
    config.steps = steps.max(1) as usize;
    config.order = if order == 2 { 2 } else { 1 };
    config.seed = seed;
    config
}

/// Crate version as a static string; do not free.
#[no_mangle]
pub extern "C" fn qbz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread; valid until the
/// next failing call. Do not free.
#[no_mangle]
pub extern "C" fn qbz_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a JSON matrix spec. Returns NULL on error (see
/// [`qbz_last_error`]). Free with [`qbz_spec_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn qbz_spec_parse(json: *const c_char) -> *mut QbzSpec {
    let Some(text) = read_str(json) else {
        set_error("spec JSON is NULL or not UTF-8");
        return std::ptr::null_mut();
    };
    match serde_json::from_str::<StructuredSpec>(text) {
        Ok(inner) => Box::into_raw(Box::new(QbzSpec { inner })),
        Err(e) => {
            set_error(format!("cannot parse spec: {e}"));
            std::ptr::null_mut()
        }
    }
}

/// Releases a spec handle. NULL is a no-op.
///
/// # Safety
/// `spec` must have come from [`qbz_spec_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qbz_spec_free(spec: *mut QbzSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Dimension of the matrix a spec describes; 0 for NULL.
///
/// # Safety
/// `spec` must be a live handle from [`qbz_spec_parse`] or NULL.
#[no_mangle]
pub unsafe extern "C" fn qbz_spec_dimension(spec: *const QbzSpec) -> u64 {
    match spec.as_ref() {
        Some(s) => s.inner.dimension() as u64,
        None => 0,
    }
}

/// Builds a query circuit. On success writes the circuit text (macro
/// free, `.qbc` format) to `circuit_out` and the JSON report to
/// `report_out`; both are optional and freed with [`qbz_string_free`].
///
/// # Safety
/// `spec` must be a live handle; output pointers must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn qbz_build(
    spec: *const QbzSpec,
    query: QbzQuery,
    t: f64,
    steps: u32,
    order: u32,
    circuit_out: *mut *mut c_char,
    report_out: *mut *mut c_char,
) -> i32 {
    let Some(handle) = spec.as_ref() else {
        set_error("spec handle is NULL");
        return QBZ_ERR_ARGUMENT;
    };
    let config = job_config(query, t, steps, order, qubitizer::cli::DEFAULT_SEED);
    match synthesize_spec(&config, &handle.inner) {
        Ok(built) => {
            if !circuit_out.is_null() {
                *circuit_out = match &built.circuit {
                    Some(c) => into_c_string(export_text(&c.expand_macros(), false)),
                    None => std::ptr::null_mut(),
                };
            }
            if !report_out.is_null() {
                *report_out = into_c_string(built.report.to_string());
            }
            QBZ_OK
        }
        Err(e) => {
            set_error(e.to_string());
            QBZ_ERR_SPEC
        }
    }
}

/// Verifies a query against the dense reference. Returns `QBZ_OK` when
/// the deviation is within tolerance, `QBZ_ERR_VERIFICATION` when not,
/// `QBZ_ERR_SPEC` when the spec cannot be built. A negative tolerance
/// selects the default, zero demands exactness (the forced-failure
/// path); the JSON report lands in `report_out` when non-NULL.
///
/// # Safety
/// `spec` must be a live handle; `report_out` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn qbz_verify(
    spec: *const QbzSpec,
    query: QbzQuery,
    t: f64,
    steps: u32,
    order: u32,
    tolerance: f64,
    seed: u64,
    report_out: *mut *mut c_char,
) -> i32 {
    let Some(handle) = spec.as_ref() else {
        set_error("spec handle is NULL");
        return QBZ_ERR_ARGUMENT;
    };
    let mut config = job_config(query, t, steps, order, seed);
    if tolerance >= 0.0 {
        config.tolerance = tolerance;
    }
    match verify_spec(&config, &handle.inner) {
        Ok((pass, report)) => {
            if !report_out.is_null() {
                *report_out = into_c_string(report.to_string());
            }
            if pass {
                QBZ_OK
            } else {
                set_error(format!(
                    "max deviation {} exceeds {}",
                    report["max_deviation"], report["tolerance"]
                ));
                QBZ_ERR_VERIFICATION
            }
        }
        Err(e) => {
            set_error(e.to_string());
            QBZ_ERR_SPEC
        }
    }
}

/// Number of summands the builder produces for a spec; `as_unitaries`
/// selects the unitary decomposition.
///
/// # Safety
/// `spec` must be a live handle; `count_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbz_summand_count(
    spec: *const QbzSpec,
    as_unitaries: bool,
    count_out: *mut u64,
) -> i32 {
    let Some(handle) = spec.as_ref() else {
        set_error("spec handle is NULL");
        return QBZ_ERR_ARGUMENT;
    };
    if count_out.is_null() {
        set_error("count_out is NULL");
        return QBZ_ERR_ARGUMENT;
    }
    let representation = if as_unitaries {
        Representation::Lcu
    } else {
        Representation::Lch
    };
    match summand_count(&handle.inner, representation) {
        Ok(count) => {
            *count_out = count as u64;
            QBZ_OK
        }
        Err(e) => {
            set_error(e.to_string());
            QBZ_ERR_SPEC
        }
    }
}

/// Sampling and Trotter bounds report (JSON) for a Hermitian spec;
/// `shots > 0` adds a seeded Monte-Carlo section.
///
/// # Safety
/// `spec` must be a live handle; `report_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbz_bounds(
    spec: *const QbzSpec,
    shots: u64,
    seed: u64,
    report_out: *mut *mut c_char,
) -> i32 {
    let Some(handle) = spec.as_ref() else {
        set_error("spec handle is NULL");
        return QBZ_ERR_ARGUMENT;
    };
    if report_out.is_null() {
        set_error("report_out is NULL");
        return QBZ_ERR_ARGUMENT;
    }
    let mut config = job_config(QbzQuery::Measure, 1.0, 1, 1, seed);
    if shots > 0 {
        config.shots = Some(shots);
    }
    match bounds_spec(&config, &handle.inner) {
        Ok(report) => {
            *report_out = into_c_string(report.to_string());
            QBZ_OK
        }
        Err(e) => {
            set_error(e.to_string());
            QBZ_ERR_SPEC
        }
    }
}

/// Frees a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `text` must have been returned by this library and not freed twice.
#[no_mangle]
pub unsafe extern "C" fn qbz_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
