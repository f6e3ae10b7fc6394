//! C interface to `ssg-core`.
//!
//! Groups and elements are opaque heap handles released with their `_free`
//! function. Every call returns an [`SsgStatus`]; on failure a message is kept
//! per thread and can be read with [`ssg_last_error`]. Strings are returned by
//! copying into a caller buffer: `needed` receives the size including the
//! terminating NUL, and `SSG_STATUS_BUFFER_TOO_SMALL` is returned when the
//! buffer is missing or short.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use ssg_core::automata::{parse_group, AutomatonGroup};
use ssg_core::builtin;
use ssg_core::germs::{germ_signature, periodic_nucleus};
use ssg_core::rn::parse_element;
use ssg_core::{Error, RationalPoint, RnElement};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    BoundExceeded = 5,
    ContractViolation = 6,
    MismatchedGroups = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Opaque handle to an automaton group.
pub struct SsgGroup {
    inner: Arc<AutomatonGroup>,
}

/// Opaque handle to an element of the group's Röver–Nekrashevych group.
pub struct SsgElement {
    inner: RnElement,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> SsgStatus {
    match e {
        Error::Parse { .. } => SsgStatus::ParseError,
        Error::BoundExceeded(_)
        | Error::NotContractingWithinBounds(_)
        | Error::NotStabilized(_) => SsgStatus::BoundExceeded,
        Error::MismatchedGroups(..) => SsgStatus::MismatchedGroups,
        Error::ContractViolation(_) | Error::FixedPointViolation(_) => SsgStatus::ContractViolation,
        _ => SsgStatus::InvalidInput,
    }
}

struct Fail(SsgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `body`, recording the message of any failure or panic.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> SsgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SsgStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            SsgStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, Fail> {
    if ptr.is_null() {
        return Err(Fail(SsgStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        Fail(
            SsgStatus::InvalidUtf8,
            "string argument is not UTF-8".into(),
        )
    })
}

unsafe fn deref<'a, T>(ptr: *const T) -> Result<&'a T, Fail> {
    ptr.as_ref()
        .ok_or_else(|| Fail(SsgStatus::NullPointer, "null handle".into()))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SsgStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_scalar<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SsgStatus::NullPointer, "null output pointer".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn write_string(
    text: &str,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> Result<(), Fail> {
    let size = text.len() + 1;
    if !needed.is_null() {
        *needed = size;
    }
    if buf.is_null() || len < size {
        return Err(Fail(
            SsgStatus::BufferTooSmall,
            format!("buffer of {len} bytes, {size} needed"),
        ));
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

fn parse_point(group: &AutomatonGroup, text: &str) -> Result<RationalPoint, Fail> {
    let p: RationalPoint = text.parse()?;
    p.check_alphabet(group.degree())?;
    Ok(p)
}

/// Copies the message of the last failed call on this thread.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes; `needed` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_last_error(
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SsgStatus {
    let message = LAST_ERROR.with(|e| e.borrow().clone());
    match write_string(&message, buf, len, needed) {
        Ok(()) => SsgStatus::Ok,
        Err(Fail(status, _)) => status,
    }
}

/// Looks up a compiled-in group by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_group_builtin(
    name: *const c_char,
    out: *mut *mut SsgGroup,
) -> SsgStatus {
    guard(|| {
        let name = read_str(name)?;
        let g = builtin::by_name(name).ok_or_else(|| {
            Fail(
                SsgStatus::InvalidInput,
                format!("no built-in group named `{name}`"),
            )
        })?;
        store(out, SsgGroup { inner: Arc::new(g) })
    })
}

/// Parses a group from the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_group_parse(
    text: *const c_char,
    out: *mut *mut SsgGroup,
) -> SsgStatus {
    guard(|| {
        let g = parse_group(read_str(text)?)?;
        store(out, SsgGroup { inner: Arc::new(g) })
    })
}

/// # Safety
/// `group` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssg_group_free(group: *mut SsgGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// # Safety
/// `group` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_group_degree(group: *const SsgGroup, out: *mut usize) -> SsgStatus {
    guard(|| write_scalar(out, deref(group)?.inner.degree()))
}

/// Decides whether a word such as `b.c.d` is the identity.
///
/// # Safety
/// `group` must be a live handle, `word` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_word_is_trivial(
    group: *const SsgGroup,
    word: *const c_char,
    out: *mut bool,
) -> SsgStatus {
    guard(|| {
        let g = &deref(group)?.inner;
        let w = g.parse_word(read_str(word)?)?;
        write_scalar(out, g.is_trivial(&w))
    })
}

/// Number of elements of the nucleus.
///
/// # Safety
/// `group` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_nucleus_size(
    group: *const SsgGroup,
    max_size: usize,
    max_depth: usize,
    out: *mut usize,
) -> SsgStatus {
    guard(|| {
        let n = deref(group)?.inner.nucleus(max_size, max_depth)?;
        write_scalar(out, n.len())
    })
}

/// The tree automorphism given by `word`, acting on the whole space.
///
/// # Safety
/// `group` must be a live handle, `word` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_from_word(
    group: *const SsgGroup,
    word: *const c_char,
    out: *mut *mut SsgElement,
) -> SsgStatus {
    guard(|| {
        let g = &deref(group)?.inner;
        let w = g.parse_word(read_str(word)?)?;
        store(
            out,
            SsgElement {
                inner: RnElement::from_word(g.clone(), w),
            },
        )
    })
}

/// Parses an element table (`rn <name> over <group>` followed by `row` lines).
///
/// # Safety
/// `group` must be a live handle, `text` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_parse(
    group: *const SsgGroup,
    text: *const c_char,
    out: *mut *mut SsgElement,
) -> SsgStatus {
    guard(|| {
        let g = &deref(group)?.inner;
        let (_, h) = parse_element(read_str(text)?, g.clone())?;
        store(out, SsgElement { inner: h })
    })
}

/// # Safety
/// `element` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_free(element: *mut SsgElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// `out = a ∘ b` (apply `b` first).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_compose(
    a: *const SsgElement,
    b: *const SsgElement,
    out: *mut *mut SsgElement,
) -> SsgStatus {
    guard(|| {
        let h = deref(a)?.inner.compose(&deref(b)?.inner)?;
        store(out, SsgElement { inner: h })
    })
}

/// # Safety
/// `a` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_invert(
    a: *const SsgElement,
    out: *mut *mut SsgElement,
) -> SsgStatus {
    guard(|| {
        store(
            out,
            SsgElement {
                inner: deref(a)?.inner.invert(),
            },
        )
    })
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ssg_element_equal(
    a: *const SsgElement,
    b: *const SsgElement,
    out: *mut bool,
) -> SsgStatus {
    guard(|| {
        let eq = deref(a)?.inner.equal(&deref(b)?.inner)?;
        write_scalar(out, eq)
    })
}

/// Image of a rational point such as `0(01)`, written in the same syntax.
///
/// # Safety
/// `element` must be a live handle, `point` a NUL-terminated string, and
/// `buf`/`needed` as for [`ssg_last_error`].
#[no_mangle]
pub unsafe extern "C" fn ssg_element_evaluate(
    element: *const SsgElement,
    point: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SsgStatus {
    guard(|| {
        let h = &deref(element)?.inner;
        let p = parse_point(h.group(), read_str(point)?)?;
        write_string(&h.evaluate(&p)?.to_string(), buf, len, needed)
    })
}

/// The element in the text format accepted by [`ssg_element_parse`].
///
/// # Safety
/// `element` must be a live handle, `name` a NUL-terminated string, and
/// `buf`/`needed` as for [`ssg_last_error`].
#[no_mangle]
pub unsafe extern "C" fn ssg_element_to_text(
    element: *const SsgElement,
    name: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SsgStatus {
    guard(|| {
        let h = &deref(element)?.inner;
        write_string(&h.to_text(read_str(name)?), buf, len, needed)
    })
}

/// Germ signature at a fixed point, rendered as
/// `germ(point=..., n=..., delta=..., depth=...)`.
///
/// # Safety
/// `element` must be a live handle, `point` a NUL-terminated string, and
/// `buf`/`needed` as for [`ssg_last_error`].
#[no_mangle]
pub unsafe extern "C" fn ssg_germ_signature(
    element: *const SsgElement,
    point: *const c_char,
    cap: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SsgStatus {
    guard(|| {
        let h = &deref(element)?.inner;
        let g = h.group();
        let p = parse_point(g, read_str(point)?)?;
        let nucleus = g.nucleus(64, 64)?;
        let data = periodic_nucleus(g, &nucleus, p.period())?;
        let sig = germ_signature(h, &p, &data, cap)?;
        write_string(&sig.render(g), buf, len, needed)
    })
}
