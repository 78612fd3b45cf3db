//! C interface. Every fallible call returns a [`PslStatus`]; on failure the
//! message is available from [`psl_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use psl_polytopes::cli::{sweep_one, SweepLine};
use psl_polytopes::group::{GroupCtx, GroupKind};
use psl_polytopes::presentation::{amalgam, parse, MapSymbol, Presentation};
use psl_polytopes::todd_coxeter::{group_order, Outcome};
use psl_polytopes::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    /// Coset enumeration hit its limit before closing.
    OverLimit = 4,
    OutOfRange = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

pub struct PslGroup {
    ctx: GroupCtx,
}

pub struct PslClassList {
    lines: Vec<SweepLine>,
}

pub struct PslPresentation {
    pres: Presentation,
}

/// One equivalence class of string C-groups. Arrays are filled up to the
/// rank-dependent lengths and zero elsewhere.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PslClassInfo {
    pub q: u32,
    pub rank: u32,
    /// `rank - 1` entries.
    pub schlafli: [u32; 4],
    /// `rank - 2` entries.
    pub petrie: [u32; 3],
    /// `rank` entries.
    pub f_vector: [u64; 5],
    pub self_dual: bool,
    /// Conjugacy classes merged into this class.
    pub classes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(PslStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::GeneratorOutOfRange { .. } => PslStatus::ParseError,
            _ => PslStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PslStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PslStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PslStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn psl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn psl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds PSL(2,q), or PGL(2,q) when `projective` is set.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_group_new(q: u32, projective: bool, out: *mut *mut PslGroup) -> PslStatus {
    guard(|| {
        let kind = if projective { GroupKind::Pgl } else { GroupKind::Psl };
        let ctx = GroupCtx::new(q, kind)?;
        store(out, Box::into_raw(Box::new(PslGroup { ctx })))
    })
}

/// # Safety
/// `group` must come from [`psl_group_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psl_group_free(group: *mut PslGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Group order, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_group_order(group: *const PslGroup) -> u64 {
    group.as_ref().map_or(0, |g| g.ctx.order() as u64)
}

/// Product `a` then `b` of two element ids.
///
/// # Safety
/// `group` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_group_mul(group: *const PslGroup, a: u32, b: u32, out: *mut u32) -> PslStatus {
    guard(|| {
        let g = deref(group, "group")?;
        let n = g.ctx.order() as u32;
        if a >= n || b >= n {
            return Err(Failure(
                PslStatus::OutOfRange,
                format!("element id out of range 0..{n}"),
            ));
        }
        store(out, g.ctx.mul(a, b))
    })
}

/// # Safety
/// `group` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_group_element_order(group: *const PslGroup, a: u32, out: *mut u32) -> PslStatus {
    guard(|| {
        let g = deref(group, "group")?;
        if a as usize >= g.ctx.order() {
            return Err(Failure(PslStatus::OutOfRange, format!("element id {a} out of range")));
        }
        store(out, g.ctx.elem_order(a))
    })
}

/// Searches PSL(2,q) for string C-groups of rank 3, 4 or 5, one entry per
/// class up to automorphisms and duality.
///
/// # Safety
/// `group` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_search(group: *const PslGroup, rank: u32, out: *mut *mut PslClassList) -> PslStatus {
    guard(|| {
        let g = deref(group, "group")?;
        if g.ctx.kind() != GroupKind::Psl {
            return Err(Failure(
                PslStatus::InvalidArgument,
                "search needs a PSL(2,q) handle".into(),
            ));
        }
        let (lines, _) = sweep_one(&g.ctx, rank)?;
        store(out, Box::into_raw(Box::new(PslClassList { lines })))
    })
}

/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_class_list_len(list: *const PslClassList) -> usize {
    list.as_ref().map_or(0, |l| l.lines.len())
}

/// # Safety
/// `list` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_class_list_get(
    list: *const PslClassList,
    index: usize,
    out: *mut PslClassInfo,
) -> PslStatus {
    guard(|| {
        let l = deref(list, "class list")?;
        let line = l
            .lines
            .get(index)
            .ok_or_else(|| Failure(PslStatus::OutOfRange, format!("class {index} of {}", l.lines.len())))?;
        let mut info = PslClassInfo {
            q: line.q,
            rank: line.rank,
            self_dual: line.self_dual,
            classes: line.classes as u64,
            ..Default::default()
        };
        for (dst, &src) in info.schlafli.iter_mut().zip(&line.schlafli) {
            *dst = src;
        }
        for (dst, &src) in info.petrie.iter_mut().zip(line.petrie.iter().flatten()) {
            *dst = src;
        }
        for (dst, &src) in info.f_vector.iter_mut().zip(&line.f_vector) {
            *dst = src as u64;
        }
        store(out, info)
    })
}

/// # Safety
/// `list` must come from [`psl_search`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psl_class_list_free(list: *mut PslClassList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Parses the text format, e.g. `gens 2; r0^2, r1^2, (r0 r1)^3`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_presentation_parse(text: *const c_char, out: *mut *mut PslPresentation) -> PslStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(PslStatus::InvalidArgument, e.to_string()))?;
        let pres = parse(text)?;
        store(out, Box::into_raw(Box::new(PslPresentation { pres })))
    })
}

/// Presentation of the universal polytope with facets `{m1,n1}_k1` and
/// vertex-figures `{m2,n2}_k2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_presentation_amalgam(
    m1: u32,
    n1: u32,
    k1: u32,
    m2: u32,
    n2: u32,
    k2: u32,
    out: *mut *mut PslPresentation,
) -> PslStatus {
    guard(|| {
        let pres = amalgam(MapSymbol::new(m1, n1, k1), MapSymbol::new(m2, n2, k2))?;
        store(out, Box::into_raw(Box::new(PslPresentation { pres })))
    })
}

/// # Safety
/// `pres` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psl_presentation_free(pres: *mut PslPresentation) {
    if !pres.is_null() {
        drop(Box::from_raw(pres));
    }
}

/// Order of the presented group by coset enumeration over the trivial
/// subgroup. Returns `OverLimit` when more than `max_cosets` cosets are live.
///
/// # Safety
/// `pres` must be a live handle and `out_order` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_group_order_of_presentation(
    pres: *const PslPresentation,
    max_cosets: usize,
    out_order: *mut u64,
) -> PslStatus {
    guard(|| {
        let p = deref(pres, "presentation")?;
        match group_order(&p.pres, max_cosets)?.outcome {
            Outcome::Closed { index } => store(out_order, index as u64),
            Outcome::OverLimit {
                max_cosets,
                live_at_stop,
            } => Err(Failure(
                PslStatus::OverLimit,
                format!("{live_at_stop} live cosets at the cap of {max_cosets}"),
            )),
        }
    })
}

/// Subgroup census of PSL(2,q) as CSV. `all_match` reports whether every
/// row agrees with its formula. Free the string with [`psl_string_free`].
///
/// # Safety
/// `out_csv` and `all_match` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_census_csv(q: u32, out_csv: *mut *mut c_char, all_match: *mut bool) -> PslStatus {
    guard(|| {
        if out_csv.is_null() || all_match.is_null() {
            return Err(null("output pointer"));
        }
        let reports = psl_polytopes::cli::census_reports(q, &[])?;
        let csv = psl_polytopes::census::to_csv(&reports);
        store(all_match, reports.iter().all(|r| r.matches()))?;
        let s = CString::new(csv).map_err(|e| Failure(PslStatus::Internal, e.to_string()))?;
        store(out_csv, s.into_raw())
    })
}

/// Classes from [`psl_search`] as JSON lines.
///
/// # Safety
/// `list` must be a live handle and `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn psl_class_list_json(list: *const PslClassList, out_json: *mut *mut c_char) -> PslStatus {
    guard(|| {
        let l = deref(list, "class list")?;
        let mut s = String::new();
        for line in &l.lines {
            s.push_str(&serde_json::to_string(line).map_err(|e| Failure(PslStatus::Internal, e.to_string()))?);
            s.push('\n');
        }
        let s = CString::new(s).map_err(|e| Failure(PslStatus::Internal, e.to_string()))?;
        store(out_json, s.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn psl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
