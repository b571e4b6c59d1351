//! C interface over the schema-contract toolkit: opaque handles, integer
//! status codes, and heap-allocated UTF-8 strings.
//!
//! Ownership is explicit. Every `*mut c_char` returned by this library must
//! be released with [`dg_string_free`], and every handle with its matching
//! `dg_*_free` function. Handles are plain data and may move between
//! threads, but the error message slot is thread-local: inspect
//! [`dg_last_error_message`] on the thread that observed the failure.
//!
//! Policies are passed as `uint32_t` codes so that an out-of-range value is
//! a reported error instead of undefined behavior; the [`DgPolicy`] enum in
//! the generated header provides the named constants.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::Cursor;
use std::ptr;

use driftgate::dataset::read_jsonl;
use driftgate::runtime::{parse_schema, serialize_schema, validate, RuntimeSchema};
use driftgate::{DriftReport, SchemaPolicy};

/// Outcome of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgStatus {
    /// The call succeeded; for `dg_validate`, the schemas conform.
    Ok = 0,
    /// The schemas do not conform; a drift report is available.
    Drift = 1,
    /// The call failed; `dg_last_error_message` explains why.
    Error = 2,
}

/// Named constants for the `uint32_t` policy codes.
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgPolicy {
    Exact = 0,
    ExactUnorderedCi = 1,
    ExactOrdered = 2,
    ExactOrderedCi = 3,
    ExactByPosition = 4,
    Backward = 5,
    Forward = 6,
    Full = 7,
}

/// Parsed schema. Opaque; created by `dg_schema_parse` or
/// `dg_schema_infer_jsonl`, released with `dg_schema_free`.
pub struct DgSchema(RuntimeSchema);

/// Drift report. Opaque; produced by `dg_validate` on disagreement,
/// released with `dg_report_free`.
pub struct DgReport(DriftReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn null_argument(function: &str, argument: &str) -> DgStatus {
    set_last_error(format!("{function}: {argument} must not be null"));
    DgStatus::Error
}

fn into_c_string(text: String) -> *mut c_char {
    match CString::new(text) {
        Ok(owned) => owned.into_raw(),
        Err(_) => {
            set_last_error("string contains an interior NUL byte".to_string());
            ptr::null_mut()
        }
    }
}

/// Reads a NUL-terminated UTF-8 argument, reporting failures through the
/// thread-local error slot.
unsafe fn utf8_argument<'a>(
    text: *const c_char,
    function: &str,
    argument: &str,
) -> Result<&'a str, DgStatus> {
    if text.is_null() {
        return Err(null_argument(function, argument));
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_last_error(format!("{function}: {argument} is not valid UTF-8"));
        DgStatus::Error
    })
}

fn policy_from_code(code: u32, function: &str) -> Result<SchemaPolicy, DgStatus> {
    match SchemaPolicy::ALL.get(code as usize) {
        Some(policy) => Ok(*policy),
        None => {
            set_last_error(format!(
                "{function}: unknown policy code {code}; valid codes are 0 through {}",
                SchemaPolicy::ALL.len() - 1
            ));
            Err(DgStatus::Error)
        }
    }
}

/// Parses the canonical JSON schema document in `text` into a new handle
/// stored at `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dg_schema_parse(text: *const c_char, out: *mut *mut DgSchema) -> DgStatus {
    if out.is_null() {
        return null_argument("dg_schema_parse", "out");
    }
    let text = match utf8_argument(text, "dg_schema_parse", "text") {
        Ok(text) => text,
        Err(status) => return status,
    };
    match parse_schema(text) {
        Ok(schema) => {
            *out = Box::into_raw(Box::new(DgSchema(schema)));
            clear_last_error();
            DgStatus::Ok
        }
        Err(error) => {
            set_last_error(error.to_string());
            DgStatus::Error
        }
    }
}

/// Infers a schema from the JSON Lines text in `text` (one record per line)
/// into a new handle stored at `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dg_schema_infer_jsonl(
    text: *const c_char,
    out: *mut *mut DgSchema,
) -> DgStatus {
    if out.is_null() {
        return null_argument("dg_schema_infer_jsonl", "out");
    }
    let text = match utf8_argument(text, "dg_schema_infer_jsonl", "text") {
        Ok(text) => text,
        Err(status) => return status,
    };
    match read_jsonl(Cursor::new(text)) {
        Ok(dataset) => {
            *out = Box::into_raw(Box::new(DgSchema(dataset.schema().clone())));
            clear_last_error();
            DgStatus::Ok
        }
        Err(error) => {
            set_last_error(error.to_string());
            DgStatus::Error
        }
    }
}

/// Renders a schema as its canonical JSON document. Returns NULL on error.
///
/// # Safety
/// `schema` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_schema_serialize(schema: *const DgSchema) -> *mut c_char {
    if schema.is_null() {
        null_argument("dg_schema_serialize", "schema");
        return ptr::null_mut();
    }
    into_c_string(serialize_schema(&(*schema).0))
}

/// Releases a schema handle. NULL is accepted and ignored.
///
/// # Safety
/// `schema` must be a live handle from this library or NULL; it must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dg_schema_free(schema: *mut DgSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Checks `producer` against `contract` under the policy named by `policy`.
///
/// Returns `Ok` when the schemas conform. Returns `Drift` when they do not;
/// if `out_report` is non-NULL it then receives a report handle, otherwise
/// the report is discarded. On `Ok` a non-NULL `out_report` is set to NULL.
///
/// # Safety
/// `producer` and `contract` must be live handles from this library;
/// `out_report` must be NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dg_validate(
    producer: *const DgSchema,
    contract: *const DgSchema,
    policy: u32,
    out_report: *mut *mut DgReport,
) -> DgStatus {
    if producer.is_null() {
        return null_argument("dg_validate", "producer");
    }
    if contract.is_null() {
        return null_argument("dg_validate", "contract");
    }
    let policy = match policy_from_code(policy, "dg_validate") {
        Ok(policy) => policy,
        Err(status) => return status,
    };
    match validate(&(*producer).0, &(*contract).0, policy) {
        Ok(_witness) => {
            if !out_report.is_null() {
                *out_report = ptr::null_mut();
            }
            clear_last_error();
            DgStatus::Ok
        }
        Err(report) => {
            if !out_report.is_null() {
                *out_report = Box::into_raw(Box::new(DgReport(report)));
            }
            clear_last_error();
            DgStatus::Drift
        }
    }
}

/// Returns the policy token a report was produced under, for example
/// "exact" or "backward". Returns NULL on error.
///
/// # Safety
/// `report` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_report_policy_name(report: *const DgReport) -> *mut c_char {
    if report.is_null() {
        null_argument("dg_report_policy_name", "report");
        return ptr::null_mut();
    }
    let report = &(*report).0;
    into_c_string(report.policy.cli_name().to_string())
}

/// Number of drift items in a report; 0 for NULL.
///
/// # Safety
/// `report` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_report_item_count(report: *const DgReport) -> usize {
    if report.is_null() {
        return 0;
    }
    let report = &(*report).0;
    report.items.len()
}

/// Diagnostic line of one drift item. Returns NULL when `index` is out of
/// range.
///
/// # Safety
/// `report` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_report_item_message(
    report: *const DgReport,
    index: usize,
) -> *mut c_char {
    if report.is_null() {
        null_argument("dg_report_item_message", "report");
        return ptr::null_mut();
    }
    let report = &(*report).0;
    match report.items.get(index) {
        Some(item) => into_c_string(item.message.clone()),
        None => {
            set_last_error(format!(
                "dg_report_item_message: index {index} is out of range for {} items",
                report.items.len()
            ));
            ptr::null_mut()
        }
    }
}

/// Full report text, one diagnostic line per drift item. Returns NULL on
/// error.
///
/// # Safety
/// `report` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dg_report_render_text(report: *const DgReport) -> *mut c_char {
    if report.is_null() {
        null_argument("dg_report_render_text", "report");
        return ptr::null_mut();
    }
    let report = &(*report).0;
    into_c_string(report.render_text())
}

/// Releases a report handle. NULL is accepted and ignored.
///
/// # Safety
/// `report` must be a live handle from this library or NULL; it must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dg_report_free(report: *mut DgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Stable token of a policy code, for example "exact-ordered" for
/// `DG_POLICY_EXACT_ORDERED`. Returns NULL for an unknown code.
#[no_mangle]
pub extern "C" fn dg_policy_name(policy: u32) -> *mut c_char {
    match policy_from_code(policy, "dg_policy_name") {
        Ok(policy) => into_c_string(policy.cli_name().to_string()),
        Err(_) => ptr::null_mut(),
    }
}

/// Copy of the most recent error message on this thread, or NULL when the
/// last fallible call succeeded.
#[no_mangle]
pub extern "C" fn dg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is accepted and
/// ignored.
///
/// # Safety
/// `text` must have been returned by this library or be NULL; it must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dg_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Library version as a string, for example "0.1.0".
#[no_mangle]
pub extern "C" fn dg_version() -> *mut c_char {
    into_c_string(env!("CARGO_PKG_VERSION").to_string())
}
