//! C ABI for the khessian solver.
//!
//! The surface follows the usual conventions for embedding Rust behind C:
//!
//! * Opaque handles ([`KhProblem`], [`KhSolveReport`]) own all Rust state;
//!   callers only ever hold pointers and release them through the matching
//!   `*_free` function.
//! * Every fallible entry point returns an error code (`KH_OK` on success)
//!   and stores a human-readable message retrievable — on the same thread —
//!   through [`kh_last_error_message`].
//! * Strings returned through `char **out` parameters are heap-allocated
//!   and must be released with [`kh_string_free`].
//! * Panics never unwind across the boundary: they are caught and reported
//!   as `KH_PANIC`.
//!
//! Inputs and outputs are JSON with the same keys and defaults as the
//! `khessian` CLI, so configs are portable between the binary and the C API.
//! The generated header lives at `include/khessian.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::Deserialize;

use khessian::cli::{self, Mode, PartialConfig};
use khessian::expr::FunctionSpec;
use khessian::picard::{self, ProblemSpec, SolveReport, SolveStatus};
use khessian::Error;

/// Success.
pub const KH_OK: i32 = 0;
/// A required pointer argument was null.
pub const KH_NULL_ARG: i32 = 1;
/// A string argument was not valid UTF-8.
pub const KH_UTF8: i32 = 2;
/// A JSON document could not be parsed or used an unknown key.
pub const KH_JSON: i32 = 3;
/// An expression source failed to parse; the message names the offset.
pub const KH_PARSE: i32 = 4;
/// The configuration is structurally invalid (bad dimension, bad k, ...).
pub const KH_INVALID: i32 = 5;
/// Evaluation or iteration failed numerically (overflow, tolerance not
/// reached, degenerate input).
pub const KH_NUMERIC: i32 = 6;
/// An internal panic was caught at the boundary; please report this.
pub const KH_PANIC: i32 = 7;

/// Opaque handle owning a validated scalar problem description.
pub struct KhProblem(ProblemSpec);

/// Opaque handle owning a finished solve: the profile and its diagnostics.
pub struct KhSolveReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs removed");
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::default();
    });
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => KH_PARSE,
        Error::Invalid(_) => KH_INVALID,
        _ => KH_NUMERIC,
    }
}

fn fail(e: &Error) -> i32 {
    set_error(&e.to_string());
    error_code(e)
}

/// Runs a fallible entry point with panic containment. On success the
/// thread-local error slot is cleared so `kh_last_error_message` never
/// reports a stale message after an `KH_OK` return.
fn guard(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => {
            if code == KH_OK {
                clear_error();
            }
            code
        }
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {text}"));
            KH_PANIC
        }
    }
}

/// # Safety
/// `ptr` must be null or a NUL-terminated string valid for reads.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error(&format!("{name} must not be null"));
        return Err(KH_NULL_ARG);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid UTF-8"));
        KH_UTF8
    })
}

fn out_string(text: String, out: *mut *mut c_char) -> i32 {
    let c = CString::new(text.replace('\0', " ")).expect("NULs removed");
    unsafe { *out = c.into_raw() };
    KH_OK
}

fn parse_partial(json: &str) -> Result<PartialConfig, i32> {
    serde_json::from_str::<PartialConfig>(json).map_err(|e| {
        set_error(&format!("config JSON: {e}"));
        KH_JSON
    })
}

fn execute_partial(partial: PartialConfig, out: *mut *mut c_char) -> i32 {
    if let Some(path) = &partial.out {
        set_error(&format!(
            "out = {path} is not supported through the C API; the artifact \
             is returned directly"
        ));
        return KH_INVALID;
    }
    let config = match cli::resolve_partial(partial) {
        Ok(config) => config,
        Err(e) => return fail(&e),
    };
    match cli::execute(&config) {
        Ok(artifact) => out_string(artifact, out),
        Err(e) => fail(&e),
    }
}

/// JSON description of a scalar problem: every key optional, unknown keys
/// rejected. Keys and defaults mirror the CLI (`dimension` 3, `k` 1,
/// `weight_p` "1", `nonlinearity_h` "u", `initial_value` 1.0, `r_max` 5.0,
/// `grid_points` 800, `tol` 1e-8, `max_iter` 200, `growth_ceiling` 1e8).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemInput {
    dimension: Option<u32>,
    k: Option<u32>,
    initial_value: Option<f64>,
    weight_p: Option<String>,
    nonlinearity_h: Option<String>,
    r_max: Option<f64>,
    grid_points: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    growth_ceiling: Option<f64>,
}

impl ProblemInput {
    fn build(self) -> Result<ProblemSpec, Error> {
        let spec = ProblemSpec {
            dimension: self.dimension.unwrap_or(3),
            k: self.k.unwrap_or(1),
            initial_value: self.initial_value.unwrap_or(1.0),
            p: FunctionSpec::parse(self.weight_p.as_deref().unwrap_or("1"), 1)?,
            h: FunctionSpec::parse(self.nonlinearity_h.as_deref().unwrap_or("u"), 1)?,
            r_max: self.r_max.unwrap_or(5.0),
            grid_points: self.grid_points.unwrap_or(800),
            tol: self.tol.unwrap_or(1e-8),
            max_iter: self.max_iter.unwrap_or(200),
            growth_ceiling: self.growth_ceiling.unwrap_or(1e8),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds a problem handle from a JSON description (see the crate docs for
/// the accepted keys). On success writes a handle that must be released
/// with `kh_problem_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_problem_from_json(
    json: *const c_char,
    out: *mut *mut KhProblem,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out must not be null");
            return KH_NULL_ARG;
        }
        let json = match str_arg(json, "json") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let input: ProblemInput = match serde_json::from_str(json) {
            Ok(input) => input,
            Err(e) => {
                set_error(&format!("problem JSON: {e}"));
                return KH_JSON;
            }
        };
        match input.build() {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(KhProblem(spec)));
                KH_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a problem handle. Null is a no-op.
///
/// # Safety
/// `problem` must be null or a handle obtained from `kh_problem_from_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn kh_problem_free(problem: *mut KhProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs the successive-approximation solver on a problem handle. On
/// success writes a report handle that must be released with
/// `kh_solve_report_free`.
///
/// # Safety
/// `problem` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_solve(
    problem: *const KhProblem,
    out: *mut *mut KhSolveReport,
) -> i32 {
    guard(|| {
        if problem.is_null() || out.is_null() {
            set_error("problem and out must not be null");
            return KH_NULL_ARG;
        }
        match picard::solve_scalar(&(*problem).0) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(KhSolveReport(report)));
                KH_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be null or a handle obtained from `kh_solve` that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_free(report: *mut KhSolveReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of grid nodes in the solution profile; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_len(report: *const KhSolveReport) -> usize {
    if report.is_null() {
        return 0;
    }
    (*report).0.solution.nodes.len()
}

/// Solve status: 0 converged, 1 growth detected, 2 iteration budget
/// exhausted; -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_status(report: *const KhSolveReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    match (*report).0.status {
        SolveStatus::Converged => 0,
        SolveStatus::GrowthDetected => 1,
        SolveStatus::MaxIterations => 2,
    }
}

/// Number of operator applications performed; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_iterations(report: *const KhSolveReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    (*report).0.iterations as u64
}

/// Largest solution value on the grid; NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_sup_value(report: *const KhSolveReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).0.sup_value
}

/// Sup-norm fixed-point defect of a converged run; NaN for a null handle
/// or a run that did not converge.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_residual(report: *const KhSolveReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).0.residual.unwrap_or(f64::NAN)
}

/// Whether the converged profile was certified to lie in the Gamma_k cone.
/// False for a null handle or a non-converged run.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_gamma_certified(
    report: *const KhSolveReport,
) -> bool {
    if report.is_null() {
        return false;
    }
    (*report).0.gamma_k_certified
}

/// Copies the solution profile into caller-provided buffers. Each of
/// `nodes`, `values`, and `derivatives` may independently be null to skip
/// that column; non-null buffers must hold exactly `len` doubles, where
/// `len` is the value reported by `kh_solve_report_len`.
///
/// # Safety
/// `report` must be a live report handle and every non-null buffer valid
/// for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_copy(
    report: *const KhSolveReport,
    nodes: *mut f64,
    values: *mut f64,
    derivatives: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        if report.is_null() {
            set_error("report must not be null");
            return KH_NULL_ARG;
        }
        let solution = &(*report).0.solution;
        if len != solution.nodes.len() {
            set_error(&format!(
                "buffer length {len} does not match the profile length {}",
                solution.nodes.len()
            ));
            return KH_INVALID;
        }
        if !nodes.is_null() {
            std::ptr::copy_nonoverlapping(solution.nodes.as_ptr(), nodes, len);
        }
        if !values.is_null() {
            std::ptr::copy_nonoverlapping(solution.values.as_ptr(), values, len);
        }
        if !derivatives.is_null() {
            std::ptr::copy_nonoverlapping(solution.derivatives.as_ptr(), derivatives, len);
        }
        KH_OK
    })
}

/// Serializes the full report (profile, status, deltas, diagnostics) to
/// pretty-printed JSON. The string must be released with `kh_string_free`.
///
/// # Safety
/// `report` must be a live report handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_solve_report_to_json(
    report: *const KhSolveReport,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("report and out must not be null");
            return KH_NULL_ARG;
        }
        match serde_json::to_string_pretty(&(*report).0) {
            Ok(text) => out_string(text, out),
            Err(e) => {
                set_error(&format!("serializing report: {e}"));
                KH_JSON
            }
        }
    })
}

/// Runs a full CLI-equivalent configuration: the JSON takes the same keys
/// as a `--config` file (including `mode`) and the artifact returned is
/// exactly what the binary would print (CSV for the solve modes by
/// default, a JSON report otherwise). The `out` key is rejected; the
/// artifact is always returned to the caller. The string must be released
/// with `kh_string_free`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_run_json(
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out must not be null");
            return KH_NULL_ARG;
        }
        let json = match str_arg(config_json, "config_json") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let partial = match parse_partial(json) {
            Ok(partial) => partial,
            Err(code) => return code,
        };
        execute_partial(partial, out)
    })
}

/// Classifies a problem against every theorem branch and returns the JSON
/// report. The config uses the same keys as `kh_run_json`; `mode` may be
/// omitted (defaults to `classify`), or set to `classify` /
/// `classify-system` explicitly. Any other mode is rejected. The string
/// must be released with `kh_string_free`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_classify_json(
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out must not be null");
            return KH_NULL_ARG;
        }
        let json = match str_arg(config_json, "config_json") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let mut partial = match parse_partial(json) {
            Ok(partial) => partial,
            Err(code) => return code,
        };
        match partial.mode {
            None => partial.mode = Some(Mode::Classify),
            Some(Mode::Classify | Mode::ClassifySystem) => {}
            Some(other) => {
                set_error(&format!(
                    "kh_classify_json requires mode classify or classify-system, got {other:?}"
                ));
                return KH_INVALID;
            }
        }
        execute_partial(partial, out)
    })
}

/// Evaluates one named structural condition (P2, P3, C1, C2, C3, C4, EQ5,
/// EQ5S, EQ12, EQ12S, GATE, EQ13, EQ13S) against the inputs in the config
/// and returns the JSON report. `config_json` may be null when the
/// defaults suffice. The string must be released with `kh_string_free`.
///
/// # Safety
/// `condition` must be a NUL-terminated string; `config_json` must be null
/// or NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kh_check_condition_json(
    condition: *const c_char,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("out must not be null");
            return KH_NULL_ARG;
        }
        let condition = match str_arg(condition, "condition") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let mut partial = if config_json.is_null() {
            PartialConfig::default()
        } else {
            let json = match str_arg(config_json, "config_json") {
                Ok(s) => s,
                Err(code) => return code,
            };
            match parse_partial(json) {
                Ok(partial) => partial,
                Err(code) => return code,
            }
        };
        partial.mode = Some(Mode::Check);
        partial.condition = Some(condition.to_string());
        execute_partial(partial, out)
    })
}

/// Message for the most recent failure on this thread, or an empty string
/// after a success. The pointer stays valid until the next call into this
/// library on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn kh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned through a `char **out` parameter. Null is a
/// no-op.
///
/// # Safety
/// `s` must be null or a string obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn kh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn kh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
