//! C ABI over the solver pipeline: opaque run handles, error codes, and
//! scalar field getters so other languages can drive the built-in
//! experiments and read every estimator. The shipped header lives in
//! `include/tfdiff.h` and mirrors these signatures one to one.

use libc::{c_char, c_double, c_int, c_uint, size_t};
use std::cell::RefCell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use tfdiff::config::{ExampleId, GradingMode};
use tfdiff::driver::{run_example, TableRow};

pub const TFDIFF_OK: c_int = 0;
pub const TFDIFF_ERR_INVALID_ARGUMENT: c_int = 1;
pub const TFDIFF_ERR_SOLVER: c_int = 2;
pub const TFDIFF_ERR_NULL_POINTER: c_int = 3;
pub const TFDIFF_ERR_UNAVAILABLE: c_int = 4;
pub const TFDIFF_ERR_PANIC: c_int = 5;

/// Field selectors for `tfdiff_run_get`. Kept in sync with the header.
pub const TFDIFF_FIELD_E_U: c_uint = 0;
pub const TFDIFF_FIELD_E_T_ALPHA: c_uint = 1;
pub const TFDIFF_FIELD_E_U_GAP: c_uint = 2;
pub const TFDIFF_FIELD_E_F: c_uint = 3;
pub const TFDIFF_FIELD_E_U_HAT: c_uint = 4;
pub const TFDIFF_FIELD_E_W: c_uint = 5;
pub const TFDIFF_FIELD_THM1: c_uint = 6;
pub const TFDIFF_FIELD_THM3: c_uint = 7;
pub const TFDIFF_FIELD_THM5: c_uint = 8;
pub const TFDIFF_FIELD_THM7: c_uint = 9;
pub const TFDIFF_FIELD_ALPHA: c_uint = 10;
pub const TFDIFF_FIELD_GRADING: c_uint = 11;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

/// Opaque run handle owning one completed table row.
pub struct TfdiffRun {
    row: TableRow,
}

/// Run one built-in experiment cell.
///
/// `example`: 1 = smooth manufactured problem, 2 = nonsmooth.
/// `grading`: 0 for the uniform mesh, a value >= 1 for an explicit exponent,
/// any negative value selects the automatic exponent max{(2-alpha)/alpha, 1}.
///
/// On success writes a heap-allocated handle to `out` (release it with
/// `tfdiff_run_free`) and returns `TFDIFF_OK`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_run_example(
    example: c_uint,
    alpha: c_double,
    n_steps: c_uint,
    m_elems: c_uint,
    grading: c_double,
    theta: c_double,
    out: *mut *mut TfdiffRun,
) -> c_int {
    if out.is_null() {
        set_error("out pointer is null");
        return TFDIFF_ERR_NULL_POINTER;
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let id = match example {
            1 => ExampleId::Smooth,
            2 => ExampleId::Nonsmooth,
            _ => {
                set_error(format!("unknown example id {example}"));
                return Err(TFDIFF_ERR_INVALID_ARGUMENT);
            }
        };
        let mode = if grading < 0.0 {
            GradingMode::Auto
        } else if grading == 0.0 {
            GradingMode::Uniform
        } else {
            GradingMode::Explicit(grading)
        };
        match run_example(id, alpha, n_steps as usize, m_elems as usize, mode, theta) {
            Ok(row) => Ok(Box::into_raw(Box::new(TfdiffRun { row }))),
            Err(e) => {
                set_error(e.to_string());
                Err(match e {
                    tfdiff::Error::InvalidConfig(_)
                    | tfdiff::Error::Violation(..)
                    | tfdiff::Error::Domain(_) => TFDIFF_ERR_INVALID_ARGUMENT,
                    _ => TFDIFF_ERR_SOLVER,
                })
            }
        }
    }));
    match result {
        Ok(Ok(ptr)) => {
            *out = ptr;
            TFDIFF_OK
        }
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic");
            TFDIFF_ERR_PANIC
        }
    }
}

/// Read one scalar field from a run handle.
///
/// # Safety
/// `run` must be a handle returned by `tfdiff_run_example` that has not been
/// freed; `out` must point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_run_get(
    run: *const TfdiffRun,
    field: c_uint,
    out: *mut c_double,
) -> c_int {
    if run.is_null() || out.is_null() {
        set_error("null pointer");
        return TFDIFF_ERR_NULL_POINTER;
    }
    let row = &(*run).row;
    let value = match field {
        TFDIFF_FIELD_E_U => match row.e_u {
            Some(v) => v,
            None => {
                set_error("true error unavailable: no exact solution configured");
                return TFDIFF_ERR_UNAVAILABLE;
            }
        },
        TFDIFF_FIELD_E_T_ALPHA => match row.e_t_alpha {
            Some(v) => v,
            None => {
                set_error("Caputo mismatch unavailable: no exact derivative configured");
                return TFDIFF_ERR_UNAVAILABLE;
            }
        },
        TFDIFF_FIELD_E_U_GAP => row.e_u_big,
        TFDIFF_FIELD_E_F => row.e_f,
        TFDIFF_FIELD_E_U_HAT => row.e_u_hat,
        TFDIFF_FIELD_E_W => row.e_w,
        TFDIFF_FIELD_THM1 => row.thm1,
        TFDIFF_FIELD_THM3 => row.thm3,
        TFDIFF_FIELD_THM5 => row.thm5,
        TFDIFF_FIELD_THM7 => row.thm7,
        TFDIFF_FIELD_ALPHA => row.alpha,
        TFDIFF_FIELD_GRADING => row.r,
        _ => {
            set_error(format!("unknown field selector {field}"));
            return TFDIFF_ERR_INVALID_ARGUMENT;
        }
    };
    *out = value;
    TFDIFF_OK
}

/// Release a run handle. Passing null is a no-op.
///
/// # Safety
/// `run` must be null or a handle returned by `tfdiff_run_example`, freed at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_run_free(run: *mut TfdiffRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Copy the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn tfdiff_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static library version string.
#[no_mangle]
pub extern "C" fn tfdiff_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
