//! C interface to `sdreal`.
//!
//! Streams cross the boundary as opaque `SdStream` handles owned by the
//! caller and released with [`sd_stream_free`]. Every fallible function
//! returns an [`SdStatus`]; on failure a message is available from
//! [`sd_last_error_message`] on the same thread. Strings returned through
//! out-parameters are released with [`sd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use sdreal::apps::{mult_via_cauchy, mult_via_limit, sqrt_stream};
use sdreal::convert::stream_of_rational;
use sdreal::expr::{build, enclosure, parse_expr};
use sdreal::limit::LimitKind;
use sdreal::ops::{average, divide};
use sdreal::{DigitStream, Error, Rational};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Precondition = 4,
    Panic = 5,
}

/// Multiplication algorithms accepted by [`sd_stream_multiply`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdMultiplier {
    LimitDirect = 0,
    LimitIndirect = 1,
    Cauchy = 2,
}

/// A lazily evaluated real in `[-1, 1]`.
pub struct SdStream {
    inner: DigitStream,
}

type Failure = (SdStatus, String);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(e: &Error) -> SdStatus {
    match e {
        Error::Syntax { .. } => SdStatus::Parse,
        Error::Precondition { .. } => SdStatus::Precondition,
        Error::Invariant(_) => SdStatus::Panic,
        _ => SdStatus::InvalidArgument,
    }
}

fn lib_error(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic in sdreal".into())
}

fn finish(r: Result<(), Failure>) -> SdStatus {
    match r {
        Ok(()) => SdStatus::Ok,
        Err((status, msg)) => {
            set_last_error(&msg);
            status
        }
    }
}

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> SdStatus {
    let r = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|p| Err((SdStatus::Panic, panic_message(p.as_ref()))));
    finish(r)
}

/// Runs a digit-forcing computation on a worker with a large stack; nested
/// lazy cells are forced recursively.
fn forcing<T: Send>(f: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure> {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(1 << 28)
            .spawn_scoped(scope, f)
            .map_err(|e| (SdStatus::Panic, format!("cannot start worker: {e}")))?
            .join()
            .unwrap_or_else(|p| Err((SdStatus::Panic, panic_message(p.as_ref()))))
    })
}

unsafe fn stream_ref<'a>(s: *const SdStream) -> Result<&'a DigitStream, Failure> {
    s.as_ref()
        .map(|h| &h.inner)
        .ok_or((SdStatus::NullPointer, "null stream handle".into()))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err((SdStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (SdStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn emit_stream(out: *mut *mut SdStream, inner: DigitStream) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(SdStream { inner }));
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err((SdStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn precondition(msg: &str) -> Failure {
    (SdStatus::Precondition, msg.into())
}

fn rational(num: BigInt, den: BigInt) -> Result<DigitStream, Failure> {
    if den.is_zero() {
        return Err((SdStatus::InvalidArgument, "zero denominator".into()));
    }
    stream_of_rational(Rational::new(num, den)).map_err(lib_error)
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// The rational `num / den` given as decimal strings; must lie in `[-1, 1]`.
///
/// # Safety
/// `num` and `den` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_from_rational(
    num: *const c_char,
    den: *const c_char,
    out: *mut *mut SdStream,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let parse = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| (SdStatus::InvalidArgument, format!("not an integer: {s:?}")))
        };
        let (n, d) = (parse(c_str(num)?)?, parse(c_str(den)?)?);
        emit_stream(out, rational(n, d)?)
    })
}

/// The rational `num / den`; must lie in `[-1, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_from_i64(
    num: i64,
    den: i64,
    out: *mut *mut SdStream,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        emit_stream(out, rational(num.into(), den.into())?)
    })
}

/// The stream of an expression such as `"avg(1/3, sqrt(1/4))"`, after its
/// preconditions are checked.
///
/// # Safety
/// `expr` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_eval(expr: *const c_char, out: *mut *mut SdStream) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let e = parse_expr(c_str(expr)?).map_err(lib_error)?;
        enclosure(&e).map_err(lib_error)?;
        emit_stream(out, build(&e).map_err(lib_error)?)
    })
}

/// A second handle to the same stream.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_clone(s: *const SdStream, out: *mut *mut SdStream) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        emit_stream(out, stream_ref(s)?.clone())
    })
}

/// Square root. Fails with `PRECONDITION` when `x` is a known negative
/// rational.
///
/// # Safety
/// `x` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_sqrt(x: *const SdStream, out: *mut *mut SdStream) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let x = stream_ref(x)?;
        if x.exact_value().is_some_and(|v| v.is_negative()) {
            return Err(precondition("square root of a negative number"));
        }
        emit_stream(out, sqrt_stream(x))
    })
}

/// `(a + b) / 2`.
///
/// # Safety
/// `a` and `b` must be null or live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_average(
    a: *const SdStream,
    b: *const SdStream,
    out: *mut *mut SdStream,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        emit_stream(out, average(stream_ref(a)?, stream_ref(b)?))
    })
}

/// `a * b` with one of the [`SdMultiplier`] algorithms.
///
/// # Safety
/// `a` and `b` must be null or live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_multiply(
    a: *const SdStream,
    b: *const SdStream,
    algorithm: u32,
    out: *mut *mut SdStream,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let (a, b) = (stream_ref(a)?, stream_ref(b)?);
        let product = match algorithm {
            x if x == SdMultiplier::LimitDirect as u32 => mult_via_limit(a, b, LimitKind::Direct),
            x if x == SdMultiplier::LimitIndirect as u32 => {
                mult_via_limit(a, b, LimitKind::Indirect)
            }
            x if x == SdMultiplier::Cauchy as u32 => mult_via_cauchy(a, b),
            other => {
                return Err((
                    SdStatus::InvalidArgument,
                    format!("unknown multiplication algorithm {other}"),
                ))
            }
        };
        emit_stream(out, product)
    })
}

/// `a / b`. Requires `1/4 <= b` and `|a| <= b`; known rationals violating
/// this fail with `PRECONDITION`.
///
/// # Safety
/// `a` and `b` must be null or live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_divide(
    a: *const SdStream,
    b: *const SdStream,
    out: *mut *mut SdStream,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let (a, b) = (stream_ref(a)?, stream_ref(b)?);
        if let Some(y) = b.exact_value() {
            if *y < Rational::new(1.into(), 4.into()) {
                return Err(precondition("divisor below 1/4"));
            }
            if a.exact_value().is_some_and(|x| x.abs() > *y) {
                return Err(precondition("|numerator| exceeds the divisor"));
            }
        }
        emit_stream(out, divide(a, b))
    })
}

/// Writes the first `n` digits (each -1, 0 or 1) into `buf`.
///
/// # Safety
/// `s` must be null or a live handle; `buf` must hold `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_prefix(s: *const SdStream, n: usize, buf: *mut i8) -> SdStatus {
    guarded(|| {
        check_out(buf)?;
        let u = stream_ref(s)?.clone();
        let digits = forcing(move || Ok(u.prefix(n)))?;
        let dst = std::slice::from_raw_parts_mut(buf, n);
        for (slot, d) in dst.iter_mut().zip(&digits) {
            *slot = d.to_i8();
        }
        Ok(())
    })
}

/// The first `n` digits as a string over `+`, `0` and `-`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_render(
    s: *const SdStream,
    n: usize,
    out: *mut *mut c_char,
) -> SdStatus {
    guarded(|| {
        check_out(out)?;
        let u = stream_ref(s)?.clone();
        let text = forcing(move || Ok(u.render(n)))?;
        *out = CString::new(text).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// The value of the first `n` digits as a reduced fraction of decimal
/// strings.
///
/// # Safety
/// `s` must be null or a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_approx(
    s: *const SdStream,
    n: usize,
    num: *mut *mut c_char,
    den: *mut *mut c_char,
) -> SdStatus {
    guarded(|| {
        check_out(num)?;
        check_out(den)?;
        let u = stream_ref(s)?.clone();
        let v = forcing(move || Ok(u.approx(n)))?;
        *num = CString::new(v.numer().to_string())
            .unwrap_or_default()
            .into_raw();
        *den = CString::new(v.denom().to_string())
            .unwrap_or_default()
            .into_raw();
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sd_stream_free(s: *mut SdStream) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(
            status_of(&Error::Syntax {
                pos: 0,
                msg: "x".into()
            }),
            SdStatus::Parse
        );
        assert_eq!(status_of(&Error::NotPositive(0)), SdStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Invariant("x".into())), SdStatus::Panic);
    }

    #[test]
    fn panics_become_status() {
        let status = guarded(|| panic!("boom"));
        assert_eq!(status, SdStatus::Panic);
        let msg = unsafe { CStr::from_ptr(sd_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "boom");
    }

    #[test]
    fn worker_panics_are_caught() {
        let r: Result<(), Failure> = forcing(|| panic!("deep"));
        assert_eq!(r.unwrap_err().0, SdStatus::Panic);
    }
}
