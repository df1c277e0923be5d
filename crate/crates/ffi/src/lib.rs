//! C ABI over `triplesys`.
//!
//! Systems cross the boundary as opaque `TsSystem` handles created by
//! `ts_system_new` or `ts_system_parse` and released with `ts_system_free`.
//! Every fallible call returns a `TsStatus`; on failure a message is kept per
//! thread and can be read with `ts_last_error` until the next call on that
//! thread. Strings returned through `char **` out-parameters are owned by the
//! caller and must be released with `ts_string_free`. Vertices are 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use triplesys::canon::{canonical_form, is_isomorphic, labeled_count};
use triplesys::enumerate::{brute_force_count, extremal_number, generate_isofree, labeled_total, Predicate};
use triplesys::partition::{is_tripartite, optimal_partition};
use triplesys::patterns::{contains_f5, contains_k4minus, is_cancellative};
use triplesys::{Error, TripleSystem};

/// Opaque handle to a triple system.
pub struct TsSystem(TripleSystem);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnsupportedSize = 4,
    Domain = 5,
    Precondition = 6,
    NotHereditary = 7,
    BudgetExceeded = 8,
    Cache = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsPredicate {
    All = 0,
    F5Free = 1,
    K4MinusFree = 2,
    Cancellative = 3,
    Tripartite = 4,
}

impl From<TsPredicate> for Predicate {
    fn from(p: TsPredicate) -> Predicate {
        match p {
            TsPredicate::All => Predicate::All,
            TsPredicate::F5Free => Predicate::F5Free,
            TsPredicate::K4MinusFree => Predicate::K4MinusFree,
            TsPredicate::Cancellative => Predicate::Cancellative,
            TsPredicate::Tripartite => Predicate::Tripartite,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(TsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match &e {
            Error::Parse { .. } => TsStatus::Parse,
            Error::UnsupportedSize { .. } => TsStatus::UnsupportedSize,
            Error::Domain(_) => TsStatus::Domain,
            Error::Precondition(_) => TsStatus::Precondition,
            Error::NotHereditary(_) => TsStatus::NotHereditary,
            Error::BudgetExceeded { .. } => TsStatus::BudgetExceeded,
            Error::Cache(_) => TsStatus::Cache,
            Error::Io(_) => TsStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> TsStatus {
    let result = catch_unwind(AssertUnwindSafe(f));
    let (status, msg) = match result {
        Ok(Ok(())) => (TsStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            (TsStatus::Panic, msg)
        }
    };
    set_error(&msg);
    status
}

unsafe fn system<'a>(h: *const TsSystem) -> Result<&'a TripleSystem, Failure> {
    h.as_ref().map(|s| &s.0).ok_or_else(|| null("system"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next `ts_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Empty system on `n` vertices.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ts_system_new(n: usize, out: *mut *mut TsSystem) -> TsStatus {
    guard(|| {
        let h = TripleSystem::from_edges(n, std::iter::empty())?;
        write(out, Box::into_raw(Box::new(TsSystem(h))))
    })
}

/// Parses the text format (`n m` header, then one `a b c` line per edge).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_parse(text: *const c_char, out: *mut *mut TsSystem) -> TsStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(TsStatus::InvalidUtf8, e.to_string()))?;
        let h = TripleSystem::parse(text)?;
        write(out, Box::into_raw(Box::new(TsSystem(h))))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ts_system_free(h: *mut TsSystem) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Adds edge `{a, b, c}` (1-based). `added` receives false if it was present.
///
/// # Safety
/// `h` must be a live handle; `added` may be null.
#[no_mangle]
pub unsafe extern "C" fn ts_system_add_edge(
    h: *mut TsSystem,
    a: usize,
    b: usize,
    c: usize,
    added: *mut bool,
) -> TsStatus {
    guard(|| {
        let sys = &mut h.as_mut().ok_or_else(|| null("system"))?.0;
        let n = sys.n();
        let t = [a, b, c]
            .iter()
            .all(|&v| (1..=n).contains(&v))
            .then(|| triplesys::Triple::new(a - 1, b - 1, c - 1))
            .flatten()
            .ok_or_else(|| {
                Failure(
                    TsStatus::Domain,
                    format!("{{{a}, {b}, {c}}} is not a triple of [1, {n}]"),
                )
            })?;
        let inserted = sys.insert(t);
        if !added.is_null() {
            added.write(inserted);
        }
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_vertex_count(h: *const TsSystem, out: *mut usize) -> TsStatus {
    guard(|| write(out, system(h)?.n()))
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_edge_count(h: *const TsSystem, out: *mut usize) -> TsStatus {
    guard(|| write(out, system(h)?.edge_count()))
}

/// Text format, edges in colex order. Free the result with `ts_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_serialize(h: *const TsSystem, out: *mut *mut c_char) -> TsStatus {
    guard(|| write(out, into_c_string(system(h)?.serialize())))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether the system satisfies `predicate`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_satisfies(
    h: *const TsSystem,
    predicate: TsPredicate,
    out: *mut bool,
) -> TsStatus {
    guard(|| {
        let h = system(h)?;
        let ok = match predicate {
            TsPredicate::All => true,
            TsPredicate::F5Free => contains_f5(h).is_none(),
            TsPredicate::K4MinusFree => contains_k4minus(h).is_none(),
            TsPredicate::Cancellative => is_cancellative(h),
            TsPredicate::Tripartite => is_tripartite(h),
        };
        write(out, ok)
    })
}

/// Order of the automorphism group (n <= 10).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_aut_order(h: *const TsSystem, out: *mut u64) -> TsStatus {
    guard(|| write(out, canonical_form(system(h)?)?.aut_order))
}

/// Number of distinct labelings, `n! / |Aut|` (n <= 10).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_labeled_count(h: *const TsSystem, out: *mut u64) -> TsStatus {
    guard(|| write(out, labeled_count(system(h)?)?))
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_is_isomorphic(
    a: *const TsSystem,
    b: *const TsSystem,
    out: *mut bool,
) -> TsStatus {
    guard(|| write(out, is_isomorphic(system(a)?, system(b)?)))
}

/// Optimal 3-partition (n <= 24). `labels` receives one part index in
/// `0..=2` per vertex and must hold at least `n` bytes.
///
/// # Safety
/// `h` must be a live handle; `labels` must point to `len` writable bytes;
/// `bad_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_system_optimal_partition(
    h: *const TsSystem,
    labels: *mut u8,
    len: usize,
    bad_count: *mut usize,
) -> TsStatus {
    guard(|| {
        let h = system(h)?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        if len < h.n() {
            return Err(Failure(
                TsStatus::BufferTooSmall,
                format!("need {} label slots, got {len}", h.n()),
            ));
        }
        let res = optimal_partition(h)?;
        std::slice::from_raw_parts_mut(labels, h.n()).copy_from_slice(res.partition.labels());
        write(bad_count, res.bad_count)
    })
}

/// `s(n) = ⌊n/3⌋ ⌊(n+1)/3⌋ ⌊(n+2)/3⌋`.
#[no_mangle]
pub extern "C" fn ts_s(n: u64) -> u64 {
    triplesys::formulas::s(n)
}

/// Number of labeled systems on `n` vertices satisfying `predicate`, as a
/// decimal string. `oracle` selects brute force (n <= 6) over isomorph-free
/// generation (n <= 8).
///
/// # Safety
/// `out` must be writable; free the string with `ts_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ts_count_labeled(
    n: usize,
    predicate: TsPredicate,
    oracle: bool,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        let p = Predicate::from(predicate);
        let total = if oracle {
            brute_force_count(n, &p)?.labeled_total
        } else {
            labeled_total(&generate_isofree(n, &p)?)
        };
        write(out, into_c_string(total.to_string()))
    })
}

/// Maximum edge count under `predicate` (n <= 7).
///
/// # Safety
/// `max_edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_extremal_number(
    n: usize,
    predicate: TsPredicate,
    max_edges: *mut usize,
) -> TsStatus {
    guard(|| write(max_edges, extremal_number(n, predicate.into())?.max_edges))
}
