//! C interface for the qpmut library.
//!
//! A problem (species, arrows, potential, truncation degree) is parsed from
//! JSON into an opaque handle; operations take a JSON request describing
//! the command and return a JSON report.
//!
//! Conventions:
//! - All strings are NUL-terminated UTF-8.
//! - Strings returned through out-parameters are owned by the caller and
//!   must be released with [`qp_string_free`].
//! - Status codes: 0 = success, 1 = invalid input, 2 = mathematical
//!   precondition failure (for example, mutation undefined at a vertex),
//!   3 = internal panic.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qpmut::io::{parse_problem, Problem};
use qpmut::reports::{run_request, Request};

/// Opaque handle to a parsed problem.
pub struct QpProblem {
    inner: Problem,
}

/// Status code: success.
pub const QP_OK: c_int = 0;
/// Status code: invalid input (malformed JSON, unknown names, bad indices).
pub const QP_ERR_INVALID: c_int = 1;
/// Status code: a mathematical precondition failed.
pub const QP_ERR_PRECONDITION: c_int = 2;
/// Status code: internal panic.
pub const QP_ERR_PANIC: c_int = 3;

fn set_out(out: *mut *mut c_char, text: &str) {
    if out.is_null() {
        return;
    }
    // NUL bytes inside the message would truncate it; replace them.
    let cleaned;
    let text = if text.contains('\0') {
        cleaned = text.replace('\0', "?");
        cleaned.as_str()
    } else {
        text
    };
    let c = CString::new(text).expect("no interior NUL after cleaning");
    unsafe { *out = c.into_raw() };
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, String> {
    if ptr.is_null() {
        return Err("null string argument".into());
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| format!("string argument is not valid UTF-8: {e}"))
}

/// Parse a problem from JSON.
///
/// On success returns a handle that must be released with
/// [`qp_problem_free`]. On failure returns null and, if `error_out` is
/// non-null, stores an error message there (release with
/// [`qp_string_free`]).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `error_out`, if non-null,
/// must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_problem_new_from_json(
    json: *const c_char,
    error_out: *mut *mut c_char,
) -> *mut QpProblem {
    if !error_out.is_null() {
        *error_out = ptr::null_mut();
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(e) => {
                set_out(error_out, &e);
                return ptr::null_mut();
            }
        };
        match parse_problem(text) {
            Ok(problem) => Box::into_raw(Box::new(QpProblem { inner: problem })),
            Err(e) => {
                set_out(error_out, &e.to_string());
                ptr::null_mut()
            }
        }
    }));
    match result {
        Ok(p) => p,
        Err(_) => {
            set_out(error_out, "internal panic");
            ptr::null_mut()
        }
    }
}

/// Release a problem handle. Passing null is a no-op.
///
/// # Safety
/// `problem` must be null or a pointer previously returned by
/// [`qp_problem_new_from_json`] that has not yet been freed.
#[no_mangle]
pub unsafe extern "C" fn qp_problem_free(problem: *mut QpProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of vertices of the problem's species, or 0 if `problem` is null.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qp_problem_vertices(problem: *const QpProblem) -> usize {
    match problem.as_ref() {
        Some(p) => p.inner.bimodule.species.n(),
        None => 0,
    }
}

/// Run one command against a problem.
///
/// `request_json` is an object with a `"command"` field naming the
/// operation (`validate`, `delta`, `xgen`, `xmap`, `ideal-dim`, `def-dim`,
/// `reduce`, `mutate`, `involution-check`, `matrix`, `seed-potential`,
/// `search`) plus that command's parameters, e.g.
/// `{"command": "mutate", "k": 2}`. Vertices are 1-based.
///
/// On success (return value 0) `*out` holds the JSON report; on failure it
/// holds an error message. Either way the string must be released with
/// [`qp_string_free`].
///
/// # Safety
/// `problem` must be a live handle, `request_json` a valid NUL-terminated
/// string, and `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_run(
    problem: *const QpProblem,
    request_json: *const c_char,
    out: *mut *mut c_char,
) -> c_int {
    if !out.is_null() {
        *out = ptr::null_mut();
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let Some(problem) = problem.as_ref() else {
            set_out(out, "null problem handle");
            return QP_ERR_INVALID;
        };
        let text = match read_str(request_json) {
            Ok(t) => t,
            Err(e) => {
                set_out(out, &e);
                return QP_ERR_INVALID;
            }
        };
        let request: Request = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => {
                set_out(out, &format!("malformed request: {e}"));
                return QP_ERR_INVALID;
            }
        };
        match run_request(&problem.inner, &request) {
            Ok(report) => {
                set_out(out, &report);
                QP_OK
            }
            Err(e) => {
                set_out(out, &e.to_string());
                e.exit_code() as c_int
            }
        }
    }));
    match result {
        Ok(code) => code,
        Err(_) => {
            set_out(out, "internal panic");
            QP_ERR_PANIC
        }
    }
}

/// Release a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not yet
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn qp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const PROBLEM: &str = r#"{
        "species": [{"preset": "rational"}, {"preset": "rational"}, {"preset": "rational"}],
        "arrows": [
            {"name": "a", "from": 1, "to": 2},
            {"name": "b", "from": 2, "to": 3},
            {"name": "c", "from": 3, "to": 1}
        ],
        "potential": {"terms": [
            {"coeff": "1", "word": [["1", "a"], ["1", "b"], ["1", "c"]], "tail": "1"}
        ]},
        "degree": 8
    }"#;

    fn run(problem: *mut QpProblem, request: &str) -> (c_int, String) {
        let req = CString::new(request).unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { qp_run(problem, req.as_ptr(), &mut out) };
        assert!(!out.is_null());
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
        unsafe { qp_string_free(out) };
        (code, text)
    }

    #[test]
    fn round_trip_through_c_interface() {
        let json = CString::new(PROBLEM).unwrap();
        let mut err: *mut c_char = ptr::null_mut();
        let problem = unsafe { qp_problem_new_from_json(json.as_ptr(), &mut err) };
        assert!(!problem.is_null());
        assert!(err.is_null());
        assert_eq!(unsafe { qp_problem_vertices(problem) }, 3);

        let (code, report) = run(problem, r#"{"command": "validate"}"#);
        assert_eq!(code, QP_OK);
        assert!(report.contains("\"status\": \"ok\""));

        let (code, report) = run(problem, r#"{"command": "mutate", "k": 2}"#);
        assert_eq!(code, QP_OK);
        assert!(report.contains("*a"));

        // Mutation at a vertex on a 2-cycle is a precondition failure once
        // we premutate twice without reducing; here test a bad vertex.
        let (code, _) = run(problem, r#"{"command": "mutate", "k": 9}"#);
        assert_eq!(code, QP_ERR_INVALID);

        let (code, msg) = run(problem, r#"{"command": "no-such"}"#);
        assert_eq!(code, QP_ERR_INVALID);
        assert!(msg.contains("malformed request"));

        unsafe { qp_problem_free(problem) };
    }

    #[test]
    fn rejects_bad_problem_json() {
        let json = CString::new("{").unwrap();
        let mut err: *mut c_char = ptr::null_mut();
        let problem = unsafe { qp_problem_new_from_json(json.as_ptr(), &mut err) };
        assert!(problem.is_null());
        assert!(!err.is_null());
        unsafe { qp_string_free(err) };
    }
}
