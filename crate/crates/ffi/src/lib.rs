//! C interface to `lattower`.
//!
//! Every function returns a [`LattowerStatus`] and writes results through
//! out-pointers. On failure a description is available from
//! [`lattower_last_error`] on the same thread. Lattices are opaque handles
//! released with [`lattower_lattice_free`]; strings returned by the library
//! are released with [`lattower_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lattower::autgroup::{brute_force_automorphisms, AutError};
use lattower::group_spec::TowerGroupSpec;
use lattower::lattice::{Family, Lattice, LatticeError};
use lattower::tower::{run_tower, TowerNode};
use thiserror::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LattowerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TooLarge = 4,
    OutOfRange = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LattowerFamily {
    SubProduct = 0,
    SignParity = 1,
    Mixed = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LattowerCensus {
    pub sub_products: usize,
    pub sign_parity: usize,
    pub mixed: usize,
    pub total: usize,
}

/// An enumerated normal subgroup lattice.
pub struct LattowerLattice {
    inner: Lattice,
}

#[derive(Debug, Error)]
enum FfiError {
    #[error("null pointer argument")]
    Null,
    #[error("argument is not valid UTF-8")]
    Utf8,
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("{0}")]
    Internal(String),
}

impl FfiError {
    fn status(&self) -> LattowerStatus {
        match self {
            FfiError::Null => LattowerStatus::NullPointer,
            FfiError::Utf8 => LattowerStatus::InvalidUtf8,
            FfiError::Parse(_) => LattowerStatus::ParseError,
            FfiError::TooLarge(_) => LattowerStatus::TooLarge,
            FfiError::OutOfRange(_) => LattowerStatus::OutOfRange,
            FfiError::Internal(_) => LattowerStatus::Internal,
        }
    }
}

impl From<LatticeError> for FfiError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Spec(_) => FfiError::Parse(e.to_string()),
            LatticeError::TooLarge { .. } => FfiError::TooLarge(e.to_string()),
            LatticeError::UnknownElement(_) => FfiError::OutOfRange(e.to_string()),
            _ => FfiError::Internal(e.to_string()),
        }
    }
}

impl From<AutError> for FfiError {
    fn from(e: AutError) -> Self {
        match e {
            AutError::Lattice(inner) => inner.into(),
            AutError::TooLarge { .. } => FfiError::TooLarge(e.to_string()),
            _ => FfiError::Internal(e.to_string()),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> LattowerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LattowerStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            e.status()
        }
        Err(_) => {
            set_last_error("internal panic");
            LattowerStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FfiError> {
    if s.is_null() {
        return Err(FfiError::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| FfiError::Utf8)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), FfiError> {
    if out.is_null() {
        return Err(FfiError::Null);
    }
    out.write(value);
    Ok(())
}

unsafe fn lattice<'a>(handle: *const LattowerLattice) -> Result<&'a Lattice, FfiError> {
    handle.as_ref().map(|h| &h.inner).ok_or(FfiError::Null)
}

fn parse_spec(literal: &str) -> Result<TowerGroupSpec, FfiError> {
    TowerGroupSpec::parse(literal).map_err(|e| FfiError::Parse(e.to_string()))
}

fn into_c_string(s: String) -> Result<*mut c_char, FfiError> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| FfiError::Internal("string contains a NUL byte".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lattower_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or an empty string.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lattower_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Enumerates the lattice of `spec`, refusing specs with more than
/// `max_slots` factors.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_new(
    spec: *const c_char,
    max_slots: usize,
    out: *mut *mut LattowerLattice,
) -> LattowerStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null);
        }
        let spec = parse_spec(read_str(spec)?)?;
        let inner = Lattice::enumerate_bounded(&spec, max_slots)?;
        write(out, Box::into_raw(Box::new(LattowerLattice { inner })))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `handle` must come from [`lattower_lattice_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_free(handle: *mut LattowerLattice) {
    if !handle.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(handle))));
    }
}

/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_len(
    handle: *const LattowerLattice,
    out: *mut usize,
) -> LattowerStatus {
    guard(|| write(out, lattice(handle)?.len()))
}

/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_census(
    handle: *const LattowerLattice,
    out: *mut LattowerCensus,
) -> LattowerStatus {
    guard(|| {
        let c = lattice(handle)?.census();
        write(
            out,
            LattowerCensus {
                sub_products: c.sub_products,
                sign_parity: c.sign_parity,
                mixed: c.mixed,
                total: c.total,
            },
        )
    })
}

/// Order of element `index`; `OUT_OF_RANGE` if it does not fit in 64 bits.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_order(
    handle: *const LattowerLattice,
    index: usize,
    out: *mut u64,
) -> LattowerStatus {
    guard(|| {
        let order = lattice(handle)?.get(index)?.order;
        let order = u64::try_from(order)
            .map_err(|_| FfiError::OutOfRange(format!("order {order} exceeds 64 bits")))?;
        write(out, order)
    })
}

/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_family(
    handle: *const LattowerLattice,
    index: usize,
    out: *mut LattowerFamily,
) -> LattowerStatus {
    guard(|| {
        let family = match lattice(handle)?.get(index)?.family {
            Family::SubProduct => LattowerFamily::SubProduct,
            Family::SignParity { .. } => LattowerFamily::SignParity,
            Family::Mixed => LattowerFamily::Mixed,
        };
        write(out, family)
    })
}

/// Whether element `i` is contained in element `j`.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_leq(
    handle: *const LattowerLattice,
    i: usize,
    j: usize,
    out: *mut bool,
) -> LattowerStatus {
    guard(|| write(out, lattice(handle)?.leq(i, j)?))
}

/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_meet(
    handle: *const LattowerLattice,
    i: usize,
    j: usize,
    out: *mut usize,
) -> LattowerStatus {
    guard(|| write(out, lattice(handle)?.meet(i, j)?))
}

/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_join(
    handle: *const LattowerLattice,
    i: usize,
    j: usize,
    out: *mut usize,
) -> LattowerStatus {
    guard(|| write(out, lattice(handle)?.join(i, j)?))
}

/// JSON export of the lattice including its covering pairs. Release the
/// string with [`lattower_string_free`].
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lattower_lattice_to_json(
    handle: *const LattowerLattice,
    out: *mut *mut c_char,
) -> LattowerStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null);
        }
        let l = lattice(handle)?;
        let export = l.export(&l.to_abstract().hasse_edges());
        let json = serde_json::to_string(&export).map_err(|e| FfiError::Internal(e.to_string()))?;
        write(out, into_c_string(json)?)
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn lattower_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of lattice automorphisms of `N(spec)`, found by exhaustive search
/// on lattices of at most `max_lattice` elements.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lattower_latauto_order(
    spec: *const c_char,
    max_lattice: usize,
    out: *mut u64,
) -> LattowerStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null);
        }
        let spec = parse_spec(read_str(spec)?)?;
        let l = Lattice::enumerate(&spec)?;
        if l.len() > max_lattice {
            return Err(AutError::TooLarge {
                elements: l.len(),
                max: max_lattice,
            }
            .into());
        }
        let autos = brute_force_automorphisms(&l.to_abstract(), max_lattice)?;
        write(out, autos.len() as u64)
    })
}

/// Runs the tower from `spec`. Writes the number of steps and, when
/// `out_line` is not null, the formatted run (release with
/// [`lattower_string_free`]).
///
/// # Safety
/// `spec` must be a NUL-terminated string, `out_steps` a valid pointer and
/// `out_line` either null or valid.
#[no_mangle]
pub unsafe extern "C" fn lattower_tower_run(
    spec: *const c_char,
    out_steps: *mut u32,
    out_line: *mut *mut c_char,
) -> LattowerStatus {
    guard(|| {
        if out_steps.is_null() {
            return Err(FfiError::Null);
        }
        let spec = parse_spec(read_str(spec)?)?;
        let run =
            run_tower(TowerNode::Start(spec)).map_err(|e| FfiError::Internal(e.to_string()))?;
        write(out_steps, run.steps() as u32)?;
        if !out_line.is_null() {
            write(out_line, into_c_string(run.format_line())?)?;
        }
        Ok(())
    })
}
