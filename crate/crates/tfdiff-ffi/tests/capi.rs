//! Exercises the C surface exactly as a foreign caller would: through the
//! exported extern "C" functions, raw pointers and error codes.

use std::ptr;
use tfdiff_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { tfdiff_last_error_message(buf.as_mut_ptr() as *mut _, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8_lossy(&buf).into_owned()
}

#[test]
fn run_and_read_fields() {
    let mut run: *mut TfdiffRun = ptr::null_mut();
    let code = unsafe { tfdiff_run_example(1, 0.5, 8, 32, 0.0, std::f64::consts::FRAC_PI_4, &mut run) };
    assert_eq!(code, TFDIFF_OK, "{}", last_error());
    assert!(!run.is_null());

    let get = |field: u32| -> f64 {
        let mut v = f64::NAN;
        let code = unsafe { tfdiff_run_get(run, field, &mut v) };
        assert_eq!(code, TFDIFF_OK, "field {field}: {}", last_error());
        v
    };
    let e_u = get(TFDIFF_FIELD_E_U);
    let e_w = get(TFDIFF_FIELD_E_W);
    let thm1 = get(TFDIFF_FIELD_THM1);
    let alpha = get(TFDIFF_FIELD_ALPHA);
    assert!(e_u > 0.0 && e_u < 1.0);
    assert!(e_w > 0.0);
    assert!(thm1 >= e_u, "assembled bound must dominate the true error");
    assert_eq!(alpha, 0.5);

    // agreement with the in-process API on the same cell
    let row = tfdiff::driver::run_example(
        tfdiff::ExampleId::Smooth,
        0.5,
        8,
        32,
        tfdiff::GradingMode::Uniform,
        std::f64::consts::FRAC_PI_4,
    )
    .unwrap();
    assert_eq!(row.e_u.unwrap(), e_u);
    assert_eq!(row.e_w, e_w);

    unsafe { tfdiff_run_free(run) };
}

#[test]
fn graded_mode_encoding() {
    let mut run: *mut TfdiffRun = ptr::null_mut();
    let code = unsafe { tfdiff_run_example(2, 0.25, 8, 16, -1.0, std::f64::consts::FRAC_PI_4, &mut run) };
    assert_eq!(code, TFDIFF_OK, "{}", last_error());
    let mut r = 0.0;
    unsafe { tfdiff_run_get(run, TFDIFF_FIELD_GRADING, &mut r) };
    assert!((r - 7.0).abs() < 1e-12, "auto grading at alpha=0.25 is r=7, got {r}");
    unsafe { tfdiff_run_free(run) };
}

#[test]
fn error_paths() {
    let mut run: *mut TfdiffRun = ptr::null_mut();
    // invalid alpha
    let code = unsafe { tfdiff_run_example(1, 1.5, 8, 16, 0.0, 0.7, &mut run) };
    assert_eq!(code, TFDIFF_ERR_INVALID_ARGUMENT);
    assert!(last_error().contains("alpha"), "message: {}", last_error());
    // unknown example id
    let code = unsafe { tfdiff_run_example(9, 0.5, 8, 16, 0.0, 0.7, &mut run) };
    assert_eq!(code, TFDIFF_ERR_INVALID_ARGUMENT);
    // null out pointer
    let code = unsafe { tfdiff_run_example(1, 0.5, 8, 16, 0.0, 0.7, ptr::null_mut()) };
    assert_eq!(code, TFDIFF_ERR_NULL_POINTER);
    // bad field selector and null handle
    let mut v = 0.0;
    let code = unsafe { tfdiff_run_get(ptr::null(), TFDIFF_FIELD_E_U, &mut v) };
    assert_eq!(code, TFDIFF_ERR_NULL_POINTER);
    let code = unsafe { tfdiff_run_example(1, 0.5, 4, 8, 0.0, 0.7, &mut run) };
    assert_eq!(code, TFDIFF_OK);
    let code = unsafe { tfdiff_run_get(run, 999, &mut v) };
    assert_eq!(code, TFDIFF_ERR_INVALID_ARGUMENT);
    unsafe { tfdiff_run_free(run) };
    // double-free safety is the caller's contract; freeing null is a no-op
    unsafe { tfdiff_run_free(ptr::null_mut()) };
}

#[test]
fn version_string_is_static() {
    let v = tfdiff_version();
    let s = unsafe { std::ffi::CStr::from_ptr(v) };
    assert!(!s.to_str().unwrap().is_empty());
}
