//! C interface to the `typea` verification suites.
//!
//! Every entry point returns a [`TypeaStatus`]. Results come back through
//! out-parameters as opaque handles ([`TypeaReport`], [`TypeaAinf`]) that the
//! caller releases with the matching `_free` function. On failure the message
//! of the last error on the calling thread is available from
//! [`typea_last_error`].
//!
//! Strings returned by this library are owned by the caller and must be
//! released with [`typea_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use typea::ainfinity::AInfAlgebra;
use typea::cli::{self, Report};
use typea::clifford::SignConvention;
use typea::Error;

/// Status code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeaStatus {
    /// The call succeeded. For calls producing a report this says nothing
    /// about whether its checks passed; see [`typea_report_passed`].
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text could not be parsed.
    Parse = 3,
    /// Parameters outside the supported range.
    InvalidArgument = 4,
    /// The computation failed.
    Computation = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// A verification report: named checks with anchors and exact witnesses.
pub struct TypeaReport(Report);

/// A finite A-infinity algebra given by structure tables.
pub struct TypeaAinf(AInfAlgebra);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> TypeaStatus {
    match e {
        Error::Parse(_) => TypeaStatus::Parse,
        Error::Invalid(_) | Error::Shape(_) | Error::Unsupported(_) => TypeaStatus::InvalidArgument,
        Error::Verification(_) => TypeaStatus::Computation,
    }
}

/// Runs `f` behind a panic guard and records the error message on failure.
fn guard(f: impl FnOnce() -> Result<(), TypeaStatus>) -> TypeaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TypeaStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            TypeaStatus::Panic
        }
    }
}

fn lift<T>(r: typea::Result<T>) -> Result<T, TypeaStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, TypeaStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(TypeaStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        TypeaStatus::InvalidUtf8
    })
}

fn out_ptr<T>(out: *mut *mut T) -> Result<(), TypeaStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(TypeaStatus::NullPointer);
    }
    Ok(())
}

unsafe fn emit_report(out: *mut *mut TypeaReport, r: typea::Result<Report>) -> Result<(), TypeaStatus> {
    let r = lift(r)?;
    *out = Box::into_raw(Box::new(TypeaReport(r)));
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn typea_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn typea_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Explicit Gröbner family, β-relations and (optionally) the invariant-ring
/// checks for type (n, a).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_jacobian(n: usize, a: u32, specialize_r: bool, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, cli::jacobian(n, a, specialize_r))
    })
}

/// Critical points, values and the dual group action of the superpotential.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_superpotential(n: usize, a: u32, hessians: bool, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, cli::superpotential(n, a, hessians))
    })
}

/// Frobenius checks and spectrum matching for the hyperplane algebra.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_quantum_hyperplane(n: usize, a: u32, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, cli::quantum_hyperplane(n, a))
    })
}

/// The cubic surface suite.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_quantum_cubic(out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        emit_report(out, cli::quantum_cubic())
    })
}

/// Reduced Gröbner basis of newline- or `;`-separated polynomials.
/// `order` is `lex:x>y>...`, `deglex:...` or `block:a>b|c>d`.
///
/// # Safety
/// `text` and `order` must be null-terminated strings; `out` must be a valid
/// pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_groebner(text: *const c_char, order: *const c_char, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let (text, order) = (str_arg(text)?, str_arg(order)?);
        emit_report(out, cli::groebner(text, order))
    })
}

/// Hochschild cohomology of `Cl(form)` up to `s_max` from the bar complex.
/// `form` is `diag:q1,...,qn`.
///
/// # Safety
/// `form` must be a null-terminated string; `out` must be a valid pointer to
/// writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn typea_clifford_hh(form: *const c_char, s_max: usize, koszul_signs: bool, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let form = str_arg(form)?;
        let conv = if koszul_signs { SignConvention::Koszul } else { SignConvention::Plain };
        emit_report(out, cli::clifford_hh(form, s_max, conv))
    })
}

/// Minimal model of the Koszul matrix factorization with the type checks.
/// When `tables` is not null it receives the transferred A-infinity algebra
/// (null if the computation stopped before producing it).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle; `tables`
/// must be null or such a pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_minimal_model(
    n: usize,
    a: u32,
    rdeg: u32,
    arity: usize,
    stability_check: bool,
    out: *mut *mut TypeaReport,
    tables: *mut *mut TypeaAinf,
) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let (report, alg) = lift(cli::minimal_model(n, a, rdeg, arity, stability_check))?;
        *out = Box::into_raw(Box::new(TypeaReport(report)));
        if !tables.is_null() {
            *tables = alg.map_or(ptr::null_mut(), |t| Box::into_raw(Box::new(TypeaAinf(t))));
        }
        Ok(())
    })
}

/// Whether every check in the report passed. False for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn typea_report_passed(report: *const TypeaReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.passed())
}

/// Number of checks in the report. Zero for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn typea_report_check_count(report: *const TypeaReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.checks.len())
}

/// The report as deterministic JSON. Free with [`typea_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_report_json(report: *const TypeaReport, out: *mut *mut c_char) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let r = report.as_ref().ok_or_else(|| {
            set_error("null report");
            TypeaStatus::NullPointer
        })?;
        *out = to_c_string(r.0.to_json());
        Ok(())
    })
}

/// The human-readable rendering of the report. Free with [`typea_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_report_text(report: *const TypeaReport, out: *mut *mut c_char) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let r = report.as_ref().ok_or_else(|| {
            set_error("null report");
            TypeaStatus::NullPointer
        })?;
        *out = to_c_string(r.0.render_text());
        Ok(())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn typea_report_free(report: *mut TypeaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses A-infinity tables in the text format written by the command line.
///
/// # Safety
/// `text` must be a null-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_ainf_from_text(text: *const c_char, out: *mut *mut TypeaAinf) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let alg = lift(AInfAlgebra::from_text(str_arg(text)?))?;
        *out = Box::into_raw(Box::new(TypeaAinf(alg)));
        Ok(())
    })
}

/// The tables in text format. Free with [`typea_string_free`].
///
/// # Safety
/// `alg` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_ainf_to_text(alg: *const TypeaAinf, out: *mut *mut c_char) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let alg = alg.as_ref().ok_or_else(|| {
            set_error("null algebra");
            TypeaStatus::NullPointer
        })?;
        *out = to_c_string(alg.0.to_text());
        Ok(())
    })
}

/// Dimension of the underlying module. Zero for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn typea_ainf_dim(alg: *const TypeaAinf) -> usize {
    alg.as_ref().map_or(0, |a| a.0.labels.len())
}

/// Checks the A-infinity relations up to `max_arity` (0 means all arities in
/// the tables).
///
/// # Safety
/// `alg` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn typea_ainf_verify(alg: *const TypeaAinf, max_arity: usize, out: *mut *mut TypeaReport) -> TypeaStatus {
    guard(|| {
        out_ptr(out)?;
        let alg = alg.as_ref().ok_or_else(|| {
            set_error("null algebra");
            TypeaStatus::NullPointer
        })?;
        let max = (max_arity > 0).then_some(max_arity);
        emit_report(out, Ok(cli::ainf_verify_report(&alg.0, max)))
    })
}

/// Releases an algebra. Null is ignored.
///
/// # Safety
/// `alg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn typea_ainf_free(alg: *mut TypeaAinf) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}
