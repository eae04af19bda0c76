//! C ABI over the folhp checks.
//!
//! Every entry point returns a `FolhpStatus`. Results come back through
//! out-parameters; strings are NUL-terminated UTF-8 owned by the caller and
//! released with `folhp_string_free`. After a non-`Ok` status,
//! `folhp_last_error_message` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use folhp::charclass::{bott_example_pipeline, haefliger_corollary_check, CohomologyData, HaefligerReason, HaefligerVerdict};
use folhp::expr::{parse_document, Document};
use folhp::homotopy::{run_homotopy, HomotopyError, RunOptions, Scenario};
use folhp::poisson::{regular_poisson_check, CheckConfig, RegularPoissonVerdict, VerdictRecord};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolhpStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidUtf8 = -2,
    ParseError = -3,
    NotFound = -4,
    InvalidArgument = -5,
    ScenarioInvalid = -6,
    Internal = -7,
}

/// Outcome of a check, mirroring the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolhpVerdict {
    Pass = 0,
    Fail = 1,
    Undecided = 2,
}

/// A parsed input file.
pub struct FolhpDocument {
    doc: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("no interior NUL"));
}

fn fail(status: FolhpStatus, msg: impl Into<String>) -> FolhpStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> FolhpStatus) -> FolhpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == FolhpStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(FolhpStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, FolhpStatus> {
    if p.is_null() {
        return Err(fail(FolhpStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FolhpStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FolhpStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FolhpStatus::Ok
        }
        Err(_) => fail(FolhpStatus::Internal, "output contains a NUL byte"),
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

/// Parses DSL text into a new document.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folhp_document_parse(text: *const c_char, out: *mut *mut FolhpDocument) -> FolhpStatus {
    guard(|| {
        if out.is_null() {
            return fail(FolhpStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_document(text) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(FolhpDocument { doc }));
                FolhpStatus::Ok
            }
            Err(e) => fail(FolhpStatus::ParseError, e.to_string()),
        }
    })
}

/// Releases a document; null is ignored.
///
/// # Safety
/// `doc` must come from `folhp_document_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn folhp_document_free(doc: *mut FolhpDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Canonical text of a document.
///
/// # Safety
/// `doc` must be a live document and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folhp_document_to_string(doc: *const FolhpDocument, out: *mut *mut c_char) -> FolhpStatus {
    guard(|| {
        if doc.is_null() || out.is_null() {
            return fail(FolhpStatus::NullPointer, "null argument");
        }
        write_string(out, (*doc).doc.to_string())
    })
}

/// Regular-Poisson check of the named bivector (or the first one when
/// `name` is null). Writes a JSON record and the verdict.
///
/// # Safety
/// Pointers must be valid; `name` may be null.
#[no_mangle]
pub unsafe extern "C" fn folhp_check_poisson(
    doc: *const FolhpDocument,
    name: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
    out_verdict: *mut FolhpVerdict,
) -> FolhpStatus {
    guard(|| {
        if doc.is_null() || out_json.is_null() || out_verdict.is_null() {
            return fail(FolhpStatus::NullPointer, "null argument");
        }
        let name = if name.is_null() {
            None
        } else {
            match read_str(name) {
                Ok(n) => Some(n),
                Err(s) => return s,
            }
        };
        let Some((_, pi)) = (*doc).doc.bivector(name) else {
            return fail(FolhpStatus::NotFound, "no such bivector");
        };
        let report = match regular_poisson_check(pi, &CheckConfig::with_seed(seed)) {
            Ok(r) => r,
            Err(e) => return fail(FolhpStatus::InvalidArgument, e.to_string()),
        };
        *out_verdict = match report.verdict {
            RegularPoissonVerdict::RegularPoisson => FolhpVerdict::Pass,
            RegularPoissonVerdict::NotPoisson | RegularPoissonVerdict::NotRegular => FolhpVerdict::Fail,
            _ => FolhpVerdict::Undecided,
        };
        write_string(out_json, to_json(&VerdictRecord::from_report(&report)))
    })
}

/// Characteristic-class report of the codimension-2 example on
/// `CP^{2n-1}`, checked in real codimension `q`.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn folhp_bott_report(n: usize, q: usize, out_json: *mut *mut c_char) -> FolhpStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(FolhpStatus::NullPointer, "null output pointer");
        }
        match bott_example_pipeline(n, q) {
            Ok(r) => write_string(out_json, to_json(&r)),
            Err(e) => fail(FolhpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Validates the scenario in `doc`, runs the homotopy and writes the JSON
/// report. `grid` 0 picks the default grid. A rejected scenario returns
/// `ScenarioInvalid` with the violated invariant as the error message.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn folhp_homotopy_run(
    doc: *const FolhpDocument,
    seed: u64,
    grid: usize,
    tolerance: f64,
    out_json: *mut *mut c_char,
    out_verdict: *mut FolhpVerdict,
) -> FolhpStatus {
    guard(|| {
        if doc.is_null() || out_json.is_null() || out_verdict.is_null() {
            return fail(FolhpStatus::NullPointer, "null argument");
        }
        if !(tolerance > 0.0) {
            return fail(FolhpStatus::InvalidArgument, "tolerance must be positive");
        }
        let opts = RunOptions {
            cfg: CheckConfig::with_seed(seed),
            grid: (grid > 0).then_some(grid),
            tolerance,
        };
        let invalid = |e: HomotopyError| match e {
            HomotopyError::Invalid { .. } | HomotopyError::EmptyRegion(_) => fail(FolhpStatus::ScenarioInvalid, e.to_string()),
            other => fail(FolhpStatus::InvalidArgument, other.to_string()),
        };
        let sc = match Scenario::from_document(&(*doc).doc, &opts.cfg) {
            Ok(s) => s,
            Err(e) => return invalid(e),
        };
        let k = opts.grid_per_axis(sc.dim());
        let v = match sc.validate(&opts.cfg, k) {
            Ok(v) => v,
            Err(e) => return invalid(e),
        };
        match run_homotopy(&v, &opts) {
            Ok(r) => {
                *out_verdict = if r.passed() { FolhpVerdict::Pass } else { FolhpVerdict::Fail };
                write_string(out_json, to_json(&r))
            }
            Err(e) => fail(FolhpStatus::Internal, e.to_string()),
        }
    })
}

/// Whether `H^i(V; Z) = 0` for all `i > q + 1`. Negative `zero_above` or
/// `dim` means unknown. `out_degree` receives the offending degree when the
/// verdict is not `Pass` (`Fail`: nonzero group, `Undecided`: unknown).
///
/// # Safety
/// `zero`/`nonzero` must point to `n_zero`/`n_nonzero` entries (or be null
/// with a zero count); out pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn folhp_haefliger(
    q: usize,
    zero_above: i64,
    dim: i64,
    zero: *const usize,
    n_zero: usize,
    nonzero: *const usize,
    n_nonzero: usize,
    out_verdict: *mut FolhpVerdict,
    out_degree: *mut usize,
) -> FolhpStatus {
    guard(|| {
        if out_verdict.is_null() || out_degree.is_null() {
            return fail(FolhpStatus::NullPointer, "null output pointer");
        }
        if (zero.is_null() && n_zero > 0) || (nonzero.is_null() && n_nonzero > 0) {
            return fail(FolhpStatus::NullPointer, "null degree list");
        }
        let mut data = CohomologyData {
            zero_above: usize::try_from(zero_above).ok(),
            dim: usize::try_from(dim).ok(),
            ..Default::default()
        };
        let slice = |p: *const usize, n: usize| if n == 0 { &[][..] } else { std::slice::from_raw_parts(p, n) };
        for &i in slice(zero, n_zero) {
            data.flags.insert(i, true);
        }
        for &i in slice(nonzero, n_nonzero) {
            data.flags.insert(i, false);
        }
        let (v, d) = match haefliger_corollary_check(&data, q) {
            HaefligerVerdict::Applies => (FolhpVerdict::Pass, 0),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(i)) => (FolhpVerdict::Fail, i),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(i)) => (FolhpVerdict::Undecided, i),
        };
        *out_verdict = v;
        *out_degree = d;
        FolhpStatus::Ok
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn folhp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn folhp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> *mut FolhpDocument {
        let c = CString::new(text).unwrap();
        let mut doc = ptr::null_mut();
        assert_eq!(unsafe { folhp_document_parse(c.as_ptr(), &mut doc) }, FolhpStatus::Ok);
        doc
    }

    fn take(s: *mut c_char) -> String {
        let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        unsafe { folhp_string_free(s) };
        out
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(folhp_last_error_message()) }.to_str().unwrap().to_string()
    }

    #[test]
    fn poisson_round_trip() {
        let doc = parse(folhp::catalog::HEISENBERG_R3);
        let mut json = ptr::null_mut();
        let mut verdict = FolhpVerdict::Undecided;
        let st = unsafe { folhp_check_poisson(doc, ptr::null(), 1, &mut json, &mut verdict) };
        assert_eq!((st, verdict), (FolhpStatus::Ok, FolhpVerdict::Pass));
        assert!(take(json).contains("RegularPoisson"));

        let missing = CString::new("nope").unwrap();
        let st = unsafe { folhp_check_poisson(doc, missing.as_ptr(), 1, &mut json, &mut verdict) };
        assert_eq!(st, FolhpStatus::NotFound);
        assert!(!last_error().is_empty());
        unsafe { folhp_document_free(doc) };
    }

    #[test]
    fn parse_errors_and_nulls() {
        let bad = CString::new("chart R2 (x1 x2)\nmultivector m: e1^^e2").unwrap();
        let mut doc = ptr::null_mut();
        assert_eq!(unsafe { folhp_document_parse(bad.as_ptr(), &mut doc) }, FolhpStatus::ParseError);
        assert!(doc.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());
        assert_eq!(unsafe { folhp_document_parse(ptr::null(), &mut doc) }, FolhpStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(
            unsafe { folhp_document_parse(invalid.as_ptr() as *const c_char, &mut doc) },
            FolhpStatus::InvalidUtf8
        );
    }

    #[test]
    fn bott_and_haefliger() {
        let mut json = ptr::null_mut();
        assert_eq!(unsafe { folhp_bott_report(3, 2, &mut json) }, FolhpStatus::Ok);
        assert!(take(json).contains("ObstructionNonzero"));
        assert_eq!(unsafe { folhp_bott_report(1, 2, &mut json) }, FolhpStatus::InvalidArgument);

        let mut v = FolhpVerdict::Pass;
        let mut d = 0;
        let nz = [4usize];
        let st = unsafe { folhp_haefliger(2, 3, -1, ptr::null(), 0, nz.as_ptr(), 1, &mut v, &mut d) };
        assert_eq!((st, v, d), (FolhpStatus::Ok, FolhpVerdict::Fail, 4));
        let st = unsafe { folhp_haefliger(1, 1, -1, ptr::null(), 0, ptr::null(), 0, &mut v, &mut d) };
        assert_eq!((st, v), (FolhpStatus::Ok, FolhpVerdict::Pass));
    }

    #[test]
    fn homotopy_and_rejection() {
        let doc = parse(folhp::catalog::S2XR);
        let mut json = ptr::null_mut();
        let mut v = FolhpVerdict::Fail;
        let st = unsafe { folhp_homotopy_run(doc, 7, 5, 1e-6, &mut json, &mut v) };
        assert_eq!((st, v), (FolhpStatus::Ok, FolhpVerdict::Pass));
        assert!(take(json).contains("\"verdict\": \"pass\""));
        unsafe { folhp_document_free(doc) };

        let text = folhp::catalog::R5_FLAT.replace("form phi: dx1^dx2 + dx3^dx4", "form phi: dx1^dx2 + (x5)*dx3^dx4");
        let doc = parse(&text);
        let st = unsafe { folhp_homotopy_run(doc, 7, 3, 1e-6, &mut json, &mut v) };
        assert_eq!(st, FolhpStatus::ScenarioInvalid);
        assert!(last_error().starts_with("phi not closed"));
        unsafe { folhp_document_free(doc) };
    }
}
