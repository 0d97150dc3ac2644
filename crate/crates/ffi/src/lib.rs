//! C ABI over the `ittm` crate.
//!
//! Programs and runs are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns an
//! [`IttmStatus`]; the message of the last failure on the calling thread is
//! available through [`ittm_last_error`].
//!
//! Text results are copied into caller buffers as NUL-terminated UTF-8. The
//! required length (without the NUL) is always stored in `len_out`, so a
//! call with `cap == 0` sizes the buffer.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ittm::machine::{parse_program, reference, Program};
use ittm::real::Real;
use ittm::runner::{run_transfinite, BudgetPolicy, Outcome, RunResult};

pub const ITTM_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IttmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The run could not start: bad budget, bad input, oracle mismatch.
    InvalidRun = 4,
    BufferTooSmall = 5,
    UnknownName = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IttmOutcome {
    Halted = 0,
    Loops = 1,
    Exceeded = 2,
}

/// A parsed, validated program.
pub struct IttmProgram(Program);

/// A finished run.
pub struct IttmRun(RunResult);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: IttmStatus, msg: impl Into<String>) -> IttmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn guard(f: impl FnOnce() -> IttmStatus) -> IttmStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(IttmStatus::Panic, "panic inside ittm"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, IttmStatus> {
    if s.is_null() {
        return Err(fail(IttmStatus::NullArgument, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(IttmStatus::InvalidUtf8, e.to_string()))
}

unsafe fn write_str(text: &str, buf: *mut c_char, cap: usize, len_out: *mut usize) -> IttmStatus {
    if len_out.is_null() {
        return fail(IttmStatus::NullArgument, "null len_out");
    }
    *len_out = text.len();
    // no error message here, so sizing a buffer for the last error keeps it
    if buf.is_null() || cap < text.len() + 1 {
        return IttmStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    IttmStatus::Ok
}

#[no_mangle]
pub extern "C" fn ittm_abi_version() -> u32 {
    ITTM_ABI_VERSION
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must be valid for `cap` bytes and `len_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ittm_last_error(buf: *mut c_char, cap: usize, len_out: *mut usize) -> IttmStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, cap, len_out)
}

/// Parses program text in the `.itm` format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ittm_program_parse(text: *const c_char, out: *mut *mut IttmProgram) -> IttmStatus {
    guard(|| {
        if out.is_null() {
            return fail(IttmStatus::NullArgument, "null out");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_program(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(IttmProgram(p)));
                IttmStatus::Ok
            }
            Err(e) => fail(IttmStatus::Parse, e.to_string()),
        }
    })
}

/// One of the built-in programs: `P_halt`, `P_flip`, `P_flip_lh`, `P_sweep`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ittm_program_reference(name: *const c_char, out: *mut *mut IttmProgram) -> IttmStatus {
    guard(|| {
        if out.is_null() {
            return fail(IttmStatus::NullArgument, "null out");
        }
        let p = match read_str(name) {
            Ok("P_halt") => reference::p_halt(),
            Ok("P_flip") => reference::p_flip(),
            Ok("P_flip_lh") => reference::p_flip_lh(),
            Ok("P_sweep") => reference::p_sweep(),
            Ok(other) => return fail(IttmStatus::UnknownName, format!("no program named {other}")),
            Err(s) => return s,
        };
        *out = Box::into_raw(Box::new(IttmProgram(p)));
        IttmStatus::Ok
    })
}

/// Canonical text of a program.
///
/// # Safety
/// `p` must come from this library; `buf` must be valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ittm_program_render(
    p: *const IttmProgram,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> IttmStatus {
    guard(|| match p.as_ref() {
        Some(p) => write_str(&p.0.render(), buf, cap, len_out),
        None => fail(IttmStatus::NullArgument, "null program"),
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ittm_program_free(p: *mut IttmProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs `p` on `input` (a real such as `1(0)*`, or null for all zeros) with
/// stages below w^depth and `budget` steps per block.
///
/// # Safety
/// `p` must come from this library, `input` must be null or a
/// NUL-terminated string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ittm_run(
    p: *const IttmProgram,
    input: *const c_char,
    depth: u32,
    budget: u64,
    out: *mut *mut IttmRun,
) -> IttmStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(IttmStatus::NullArgument, "null program or out");
        };
        let input = if input.is_null() {
            Real::zero()
        } else {
            match read_str(input).map(str::parse::<Real>) {
                Ok(Ok(r)) => r,
                Ok(Err(e)) => return fail(IttmStatus::Parse, e.to_string()),
                Err(s) => return s,
            }
        };
        let b = match BudgetPolicy::new(depth, budget) {
            Ok(b) => b,
            Err(e) => return fail(IttmStatus::InvalidRun, e.to_string()),
        };
        match run_transfinite(&p.0, &input, &b, None) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(IttmRun(r)));
                IttmStatus::Ok
            }
            Err(e) => fail(IttmStatus::InvalidRun, e.to_string()),
        }
    })
}

/// # Safety
/// `r` must come from this library and `kind` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ittm_run_outcome(r: *const IttmRun, kind: *mut IttmOutcome) -> IttmStatus {
    let (Some(r), false) = (r.as_ref(), kind.is_null()) else {
        return fail(IttmStatus::NullArgument, "null run or kind");
    };
    *kind = match r.0.outcome {
        Outcome::Halted { .. } => IttmOutcome::Halted,
        Outcome::Loops(_) => IttmOutcome::Loops,
        Outcome::Exceeded { .. } => IttmOutcome::Exceeded,
    };
    IttmStatus::Ok
}

/// One-line summary such as `HALTED time=1 output=1(0)*`.
///
/// # Safety
/// `r` must come from this library; `buf` must be valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ittm_run_describe(
    r: *const IttmRun,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> IttmStatus {
    guard(|| match r.as_ref() {
        Some(r) => write_str(&r.0.outcome.to_string(), buf, cap, len_out),
        None => fail(IttmStatus::NullArgument, "null run"),
    })
}

/// The block trace as JSON lines.
///
/// # Safety
/// `r` must come from this library; `buf` must be valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ittm_run_trace(
    r: *const IttmRun,
    full_snapshots: bool,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> IttmStatus {
    guard(|| match r.as_ref() {
        Some(r) => write_str(&r.0.trace_jsonl(full_snapshots), buf, cap, len_out),
        None => fail(IttmStatus::NullArgument, "null run"),
    })
}

/// # Safety
/// `r` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ittm_run_free(r: *mut IttmRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
