//! Exercises the C ABI from Rust: handle lifecycles, error codes, the
//! thread-local error message, and the JSON entry points.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use khessian_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn last_error() -> String {
    CStr::from_ptr(kh_last_error_message())
        .to_string_lossy()
        .into_owned()
}

/// Reads and frees a string returned through a `char **out` parameter.
unsafe fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_owned();
    kh_string_free(ptr);
    s
}

#[test]
fn solve_round_trip_matches_the_laplacian_oracle() {
    unsafe {
        let json = cstr(r#"{"weight_p": "1", "nonlinearity_h": "u"}"#);
        let mut problem: *mut KhProblem = ptr::null_mut();
        assert_eq!(kh_problem_from_json(json.as_ptr(), &mut problem), KH_OK);
        assert!(!problem.is_null());

        let mut report: *mut KhSolveReport = ptr::null_mut();
        assert_eq!(kh_solve(problem, &mut report), KH_OK);
        assert_eq!(last_error(), "");

        assert_eq!(kh_solve_report_status(report), 0);
        assert!(kh_solve_report_iterations(report) > 0);
        assert!(kh_solve_report_gamma_certified(report));
        let residual = kh_solve_report_residual(report);
        assert!(residual.is_finite() && residual < 1e-3, "residual {residual}");

        let len = kh_solve_report_len(report);
        assert_eq!(len, 800);
        let mut nodes = vec![0.0f64; len];
        let mut values = vec![0.0f64; len];
        let mut derivatives = vec![0.0f64; len];
        assert_eq!(
            kh_solve_report_copy(
                report,
                nodes.as_mut_ptr(),
                values.as_mut_ptr(),
                derivatives.as_mut_ptr(),
                len,
            ),
            KH_OK
        );
        assert_eq!(nodes[0], 0.0);
        assert_eq!(values[0], 1.0);
        let oracle = 5.0f64.sinh() / 5.0;
        assert!((values[len - 1] - oracle).abs() < 1e-3);
        assert!((kh_solve_report_sup_value(report) - oracle).abs() < 1e-3);
        assert!(derivatives.iter().all(|d| *d >= 0.0));

        // Wrong buffer length is an invalid-argument error, not a write.
        assert_eq!(
            kh_solve_report_copy(report, nodes.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), 7),
            KH_INVALID
        );
        assert!(last_error().contains("length 7"));

        let mut json_out: *mut c_char = ptr::null_mut();
        assert_eq!(kh_solve_report_to_json(report, &mut json_out), KH_OK);
        let text = take_string(json_out);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["status"], "Converged");
        assert_eq!(value["solution"]["nodes"].as_array().unwrap().len(), len);

        kh_solve_report_free(report);
        kh_problem_free(problem);
    }
}

#[test]
fn null_and_utf8_arguments_are_rejected() {
    unsafe {
        let mut problem: *mut KhProblem = ptr::null_mut();
        assert_eq!(kh_problem_from_json(ptr::null(), &mut problem), KH_NULL_ARG);
        assert!(last_error().contains("must not be null"));
        assert_eq!(kh_problem_from_json(cstr("{}").as_ptr(), ptr::null_mut()), KH_NULL_ARG);

        let invalid = CString::new(vec![0xFFu8]).unwrap();
        assert_eq!(kh_problem_from_json(invalid.as_ptr(), &mut problem), KH_UTF8);
        assert!(last_error().contains("UTF-8"));

        let mut report: *mut KhSolveReport = ptr::null_mut();
        assert_eq!(kh_solve(ptr::null(), &mut report), KH_NULL_ARG);

        // Null-handle accessors degrade to sentinels instead of crashing.
        assert_eq!(kh_solve_report_len(ptr::null()), 0);
        assert_eq!(kh_solve_report_status(ptr::null()), -1);
        assert_eq!(kh_solve_report_iterations(ptr::null()), 0);
        assert!(kh_solve_report_sup_value(ptr::null()).is_nan());
        assert!(kh_solve_report_residual(ptr::null()).is_nan());
        assert!(!kh_solve_report_gamma_certified(ptr::null()));

        // Free functions accept null.
        kh_problem_free(ptr::null_mut());
        kh_solve_report_free(ptr::null_mut());
        kh_string_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_distinguish_json_parse_and_invalid() {
    unsafe {
        let mut problem: *mut KhProblem = ptr::null_mut();

        let unknown_key = cstr(r#"{"weight": "1"}"#);
        assert_eq!(kh_problem_from_json(unknown_key.as_ptr(), &mut problem), KH_JSON);
        assert!(last_error().contains("weight"), "{}", last_error());

        let bad_expression = cstr(r#"{"weight_p": "1 + * t"}"#);
        assert_eq!(kh_problem_from_json(bad_expression.as_ptr(), &mut problem), KH_PARSE);
        assert!(last_error().contains("offset"), "{}", last_error());

        let bad_dimension = cstr(r#"{"dimension": 2}"#);
        assert_eq!(kh_problem_from_json(bad_dimension.as_ptr(), &mut problem), KH_INVALID);
        assert!(last_error().contains("dimension"), "{}", last_error());
    }
}

#[test]
fn run_json_returns_the_cli_artifact_deterministically() {
    unsafe {
        let config = cstr(r#"{"mode": "solve", "grid_points": 200, "weight_p": "exp(-t)"}"#);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(kh_run_json(config.as_ptr(), &mut out), KH_OK);
        let first = take_string(out);
        assert!(first.starts_with("r,u,du,S_k,residual\n"));
        assert_eq!(first.lines().count(), 201);

        let mut out2: *mut c_char = ptr::null_mut();
        assert_eq!(kh_run_json(config.as_ptr(), &mut out2), KH_OK);
        assert_eq!(first, take_string(out2));
    }
}

#[test]
fn run_json_rejects_the_out_key() {
    unsafe {
        let config = cstr(r#"{"mode": "solve", "out": "profile.csv"}"#);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(kh_run_json(config.as_ptr(), &mut out), KH_INVALID);
        assert!(last_error().contains("not supported"), "{}", last_error());
    }
}

#[test]
fn classify_json_defaults_the_mode_and_rejects_others() {
    unsafe {
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(kh_classify_json(cstr("{}").as_ptr(), &mut out), KH_OK);
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        let verdicts = report["verdicts"].as_array().unwrap();
        assert_eq!(verdicts.len(), 4);
        assert_eq!(verdicts[0]["theorem"], "T1");
        assert_eq!(report["config"]["mode"], "classify");

        let mut out2: *mut c_char = ptr::null_mut();
        assert_eq!(
            kh_classify_json(cstr(r#"{"mode": "solve"}"#).as_ptr(), &mut out2),
            KH_INVALID
        );
        assert!(last_error().contains("classify"), "{}", last_error());
    }
}

#[test]
fn check_condition_reports_verdicts_and_numeric_failures() {
    unsafe {
        // Defaults (N = 3, k = 1) pass the dimension gate.
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            kh_check_condition_json(cstr("GATE").as_ptr(), ptr::null(), &mut out),
            KH_OK
        );
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(report["condition"]["condition"], "GATE");
        assert_eq!(report["condition"]["verdict"], "Holds");

        // N = 4, k = 2 fails the gate but is still a successful check.
        let mut out2: *mut c_char = ptr::null_mut();
        let config = cstr(r#"{"dimension": 4, "k": 2}"#);
        assert_eq!(
            kh_check_condition_json(cstr("GATE").as_ptr(), config.as_ptr(), &mut out2),
            KH_OK
        );
        let report: serde_json::Value = serde_json::from_str(&take_string(out2)).unwrap();
        assert_eq!(report["condition"]["verdict"], "Fails");

        // Unknown condition names are invalid.
        let mut out3: *mut c_char = ptr::null_mut();
        assert_eq!(
            kh_check_condition_json(cstr("C9").as_ptr(), ptr::null(), &mut out3),
            KH_INVALID
        );

        // A vanishing nonlinearity makes the Keller-Osserman integrand
        // degenerate: a numeric failure, not a validation one.
        let mut out4: *mut c_char = ptr::null_mut();
        let degenerate = cstr(r#"{"nonlinearity_h": "0"}"#);
        assert_eq!(
            kh_check_condition_json(cstr("C3").as_ptr(), degenerate.as_ptr(), &mut out4),
            KH_NUMERIC
        );
    }
}

#[test]
fn version_is_the_package_version() {
    unsafe {
        let version = CStr::from_ptr(kh_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}
