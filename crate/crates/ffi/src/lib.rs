//! C ABI over the rosa toolkit: opaque handles, integer status codes, and a
//! thread-local last-error message.
//!
//! Status codes mirror the CLI exit codes: 0 success, 1 internal error,
//! 2 validation/parse error, 3 budget exhausted, 4 not found. Every
//! constructor has a paired `_free`; strings returned by the library are
//! released with `rosa_string_free`.

use rosa_core::billiard::find_planar_candidate;
use rosa_core::edgeword::{abelianize, subrosa_edgeword, Edgeword};
use rosa_core::lattice::{star_patch, validate_patch};
use rosa_core::spectral::eigenvalues;
use rosa_core::substitution::{apply_substitution, build_substitution, SubstitutionRule};
use rosa_core::{Patch, RosaError, Symmetry};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

pub const ROSA_OK: i32 = 0;
pub const ROSA_ERR_INTERNAL: i32 = 1;
pub const ROSA_ERR_VALIDATION: i32 = 2;
pub const ROSA_ERR_BUDGET: i32 = 3;
pub const ROSA_ERR_NOT_FOUND: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &RosaError) -> i32 {
    match e.exit_code() {
        2 => ROSA_ERR_VALIDATION,
        3 => ROSA_ERR_BUDGET,
        4 => ROSA_ERR_NOT_FOUND,
        _ => ROSA_ERR_INTERNAL,
    }
}

fn fail(e: RosaError) -> i32 {
    set_error(&e.to_string());
    code_of(&e)
}

/// Opaque patch handle.
pub struct RosaPatch {
    inner: Patch,
}

/// Opaque substitution-rule handle.
pub struct RosaRule {
    sym: Symmetry,
    inner: SubstitutionRule,
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        set_error("null string argument");
        return Err(ROSA_ERR_VALIDATION);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        ROSA_ERR_VALIDATION
    })
}

/// Last error message for this thread, valid until the next failing call.
/// Returns a pointer owned by the library; do not free it.
#[no_mangle]
pub extern "C" fn rosa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `rosa_*` function that
/// documents `rosa_string_free` as its deallocator, or null.
#[no_mangle]
pub unsafe extern "C" fn rosa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Moduli |λ_j| of the expansion of `edgeword` (UTF-8, compact form) for
/// symmetry order `n`. Writes up to `out_len` values into `out` and stores
/// the required count in `written`.
///
/// # Safety
/// `edgeword` must be a valid NUL-terminated string; `out` must point to at
/// least `out_len` doubles; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_eigenvalue_moduli(
    n: u32,
    edgeword: *const c_char,
    out: *mut f64,
    out_len: usize,
    written: *mut usize,
) -> i32 {
    if out.is_null() || written.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    let word = match cstr(edgeword) {
        Ok(w) => w,
        Err(c) => return c,
    };
    let run = || -> rosa_core::Result<Vec<f64>> {
        let sym = Symmetry::new(n as usize)?;
        let u = Edgeword::parse(&sym, word)?;
        Ok(eigenvalues(&sym, &abelianize(&sym, &u))?.moduli)
    };
    match run() {
        Ok(moduli) => {
            *written = moduli.len();
            for (i, m) in moduli.iter().take(out_len).enumerate() {
                *out.add(i) = *m;
            }
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// The Sub Rosa edgeword Σ(n) as a newly allocated string (free with
/// `rosa_string_free`).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_subrosa_edgeword(n: u32, out: *mut *mut c_char) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    match Symmetry::new(n as usize) {
        Ok(sym) => {
            let s = subrosa_edgeword(&sym).to_compact_string();
            *out = CString::new(s).expect("edgeword has no NUL").into_raw();
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// Smallest Planar Rosa candidate exponent j ≤ max_j; the candidate edgeword
/// is returned as a string (free with `rosa_string_free`).
///
/// # Safety
/// `out_j` and `out_word` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rosa_planar_candidate(
    n: u32,
    max_j: usize,
    out_j: *mut usize,
    out_word: *mut *mut c_char,
) -> i32 {
    if out_j.is_null() || out_word.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    let run = || -> rosa_core::Result<(usize, String)> {
        let sym = Symmetry::new(n as usize)?;
        let c = find_planar_candidate(&sym, max_j)?;
        Ok((c.j, c.edgeword.to_compact_string()))
    };
    match run() {
        Ok((j, w)) => {
            *out_j = j;
            *out_word = CString::new(w).expect("edgeword has no NUL").into_raw();
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// Build a substitution rule from a palindromic edgeword. On success `out`
/// owns a handle that must be released with `rosa_rule_free`.
///
/// # Safety
/// `edgeword` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_rule_build(
    n: u32,
    edgeword: *const c_char,
    node_budget: u64,
    out: *mut *mut RosaRule,
) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    let word = match cstr(edgeword) {
        Ok(w) => w,
        Err(c) => return c,
    };
    let run = || -> rosa_core::Result<RosaRule> {
        let sym = Symmetry::new(n as usize)?;
        let u = Edgeword::parse(&sym, word)?;
        Ok(RosaRule { sym, inner: build_substitution(&sym, &u, node_budget)? })
    };
    match run() {
        Ok(rule) => {
            *out = Box::into_raw(Box::new(rule));
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// Release a rule handle.
///
/// # Safety
/// `rule` must come from `rosa_rule_build` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rosa_rule_free(rule: *mut RosaRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// The star patch S_n (2n thin rhombi around the origin); release with
/// `rosa_patch_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_star_patch(n: u32, out: *mut *mut RosaPatch) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    match Symmetry::new(n as usize) {
        Ok(sym) => {
            *out = Box::into_raw(Box::new(RosaPatch { inner: star_patch(&sym) }));
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// Apply the substitution once; `out` is a new handle.
///
/// # Safety
/// `rule` and `patch` must be live handles from this library; `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_rule_apply(
    rule: *const RosaRule,
    patch: *const RosaPatch,
    tile_budget: u64,
    out: *mut *mut RosaPatch,
) -> i32 {
    if rule.is_null() || patch.is_null() || out.is_null() {
        set_error("null argument");
        return ROSA_ERR_VALIDATION;
    }
    let rule = &*rule;
    let patch = &*patch;
    match apply_substitution(&rule.sym, &rule.inner, &patch.inner, tile_budget) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(RosaPatch { inner: p }));
            ROSA_OK
        }
        Err(e) => fail(e),
    }
}

/// Number of tiles in a patch (0 for null).
///
/// # Safety
/// `patch` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rosa_patch_tile_count(patch: *const RosaPatch) -> usize {
    if patch.is_null() {
        0
    } else {
        (*patch).inner.tiles.len()
    }
}

/// Validate a patch: ROSA_OK when edge-to-edge, non-overlapping, connected
/// and simply connected; ROSA_ERR_VALIDATION (with message) otherwise.
///
/// # Safety
/// `patch` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rosa_patch_validate(patch: *const RosaPatch) -> i32 {
    if patch.is_null() {
        set_error("null patch");
        return ROSA_ERR_VALIDATION;
    }
    let p = &(*patch).inner;
    let sym = match Symmetry::new(p.n) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let rep = validate_patch(&sym, p);
    if rep.is_valid() {
        ROSA_OK
    } else {
        set_error(&rep.violations.join("; "));
        ROSA_ERR_VALIDATION
    }
}

/// Serialize a patch to JSON (free with `rosa_string_free`).
///
/// # Safety
/// `patch` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_patch_to_json(patch: *const RosaPatch, out: *mut *mut c_char) -> i32 {
    if patch.is_null() || out.is_null() {
        set_error("null argument");
        return ROSA_ERR_VALIDATION;
    }
    match serde_json::to_string(&(*patch).inner) {
        Ok(s) => {
            *out = CString::new(s).expect("JSON has no NUL").into_raw();
            ROSA_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            ROSA_ERR_INTERNAL
        }
    }
}

/// Parse a patch from JSON; release with `rosa_patch_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rosa_patch_from_json(json: *const c_char, out: *mut *mut RosaPatch) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return ROSA_ERR_VALIDATION;
    }
    let s = match cstr(json) {
        Ok(s) => s,
        Err(c) => return c,
    };
    match serde_json::from_str::<Patch>(s) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(RosaPatch { inner: p }));
            ROSA_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            ROSA_ERR_VALIDATION
        }
    }
}

/// Release a patch handle.
///
/// # Safety
/// `patch` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rosa_patch_free(patch: *mut RosaPatch) {
    if !patch.is_null() {
        drop(Box::from_raw(patch));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn moduli_roundtrip() {
        let word = CString::new("131131").unwrap();
        let mut out = [0f64; 8];
        let mut written = 0usize;
        let code = unsafe {
            rosa_eigenvalue_moduli(5, word.as_ptr(), out.as_mut_ptr(), out.len(), &mut written)
        };
        assert_eq!(code, ROSA_OK);
        assert_eq!(written, 2);
        assert!((out[0] - 9.959).abs() < 0.01);
    }

    #[test]
    fn bad_n_is_validation_error() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let code = unsafe { rosa_subrosa_edgeword(4, &mut out) };
        assert_eq!(code, ROSA_ERR_VALIDATION);
        assert!(!rosa_last_error().is_null());
    }

    #[test]
    fn rule_and_patch_lifecycle() {
        let word = CString::new("131131").unwrap();
        let mut rule: *mut RosaRule = std::ptr::null_mut();
        let code = unsafe { rosa_rule_build(5, word.as_ptr(), 100_000, &mut rule) };
        assert_eq!(code, ROSA_OK);
        let mut star: *mut RosaPatch = std::ptr::null_mut();
        assert_eq!(unsafe { rosa_star_patch(5, &mut star) }, ROSA_OK);
        assert_eq!(unsafe { rosa_patch_tile_count(star) }, 10);
        let mut image: *mut RosaPatch = std::ptr::null_mut();
        assert_eq!(unsafe { rosa_rule_apply(rule, star, 2_000_000, &mut image) }, ROSA_OK);
        assert!(unsafe { rosa_patch_tile_count(image) } > 100);
        assert_eq!(unsafe { rosa_patch_validate(image) }, ROSA_OK);
        let mut json: *mut c_char = std::ptr::null_mut();
        assert_eq!(unsafe { rosa_patch_to_json(image, &mut json) }, ROSA_OK);
        let mut parsed: *mut RosaPatch = std::ptr::null_mut();
        assert_eq!(unsafe { rosa_patch_from_json(json, &mut parsed) }, ROSA_OK);
        assert_eq!(
            unsafe { rosa_patch_tile_count(parsed) },
            unsafe { rosa_patch_tile_count(image) }
        );
        unsafe {
            rosa_string_free(json);
            rosa_patch_free(parsed);
            rosa_patch_free(image);
            rosa_patch_free(star);
            rosa_rule_free(rule);
        }
    }
}
