//! C ABI over `conecyl`.
//!
//! Specs are opaque handles created by [`conecyl_spec_parse`] or
//! [`conecyl_spec_generate`] and released with [`conecyl_spec_free`].
//! Every fallible call returns a [`ConecylStatus`]; on failure the message is
//! available from [`conecyl_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released
//! with [`conecyl_string_free`].

use conecyl::constructions::{generate, Family};
use conecyl::error::Error;
use conecyl::expr::{eval_jet2, parse_immersion_spec, ImmersionSpec};
use conecyl::invariants::{analyze_point, AnalysisOptions};
use conecyl::report::{analyze_grid, Grid};
use conecyl::Tolerances;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible call. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConecylStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Parse = -3,
    Dimension = -4,
    Domain = -5,
    Degenerate = -6,
    NotAdmissible = -7,
    Precondition = -8,
    BufferTooSmall = -9,
    UnknownFamily = -10,
    Panic = -99,
}

/// Parsed immersion spec. Opaque to C.
pub struct ConecylSpec(ImmersionSpec);

pub const CONECYL_FLAG_PSEUDO_UMBILICAL: u32 = 1 << 0;
pub const CONECYL_FLAG_ISOTROPIC: u32 = 1 << 1;
pub const CONECYL_FLAG_FLAT: u32 = 1 << 2;
pub const CONECYL_FLAG_FLAT_NORMAL_BUNDLE: u32 = 1 << 3;
pub const CONECYL_FLAG_MARGINALLY_TRAPPED: u32 = 1 << 4;
pub const CONECYL_FLAG_MINIMAL: u32 = 1 << 5;
pub const CONECYL_FLAG_TOTALLY_UMBILICAL: u32 = 1 << 6;
pub const CONECYL_FLAG_A_H_ZERO: u32 = 1 << 7;
pub const CONECYL_FLAG_ALPHA_ZERO: u32 = 1 << 8;
/// Set when the two routes of some predicate disagree.
pub const CONECYL_FLAG_INCONSISTENT: u32 = 0x8000_0000;

/// Invariants at one parameter point. Fields that do not apply (the
/// curvatures for `n != 2`) are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConecylPointSummary {
    pub alpha: f64,
    pub e1_alpha: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub mean_curvature_norm2: f64,
    pub gauss_curvature: f64,
    pub normal_curvature: f64,
    pub isotropy_spread: f64,
    /// Largest residual of the frame and structure identities.
    pub max_residual: f64,
    /// Bitwise OR of `CONECYL_FLAG_*`.
    pub flags: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ConecylStatus {
    match e {
        Error::Syntax { .. } | Error::Undeclared { .. } | Error::Arity { .. } | Error::InvalidSpec(_) => {
            ConecylStatus::Parse
        }
        Error::Dimension { .. } | Error::DimensionRule(_) => ConecylStatus::Dimension,
        Error::Domain { .. } | Error::Stencil { .. } => ConecylStatus::Domain,
        Error::DegenerateSubspace { .. } | Error::DegenerateNormal => ConecylStatus::Degenerate,
        Error::NotAdmissible(_) | Error::NotNormal(_) => ConecylStatus::NotAdmissible,
        Error::Precondition(_) | Error::BlowDown { .. } => ConecylStatus::Precondition,
    }
}

struct Fail(ConecylStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ConecylStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ConecylStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            ConecylStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ConecylStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(ConecylStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn spec_arg<'a>(p: *const ConecylSpec) -> Result<&'a ImmersionSpec, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("spec"))
}

unsafe fn point_arg<'a>(spec: &ImmersionSpec, p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null("point"));
    }
    if len != spec.n_params() {
        return Err(Error::Dimension {
            expected: spec.n_params(),
            got: len,
        }
        .into());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn tolerances(alg: f64, class: f64) -> Result<Tolerances, Fail> {
    let mut t = Tolerances::default();
    if alg > 0.0 {
        t.alg = alg;
    }
    if class > 0.0 {
        t.class = class;
    }
    if !(t.alg.is_finite() && t.class.is_finite()) {
        return Err(Error::Precondition("tolerances must be finite".into()).into());
    }
    Ok(t)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).unwrap_or_default().into_raw();
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn conecyl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn conecyl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses DSL text into a new spec handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecyl_spec_parse(text: *const c_char, out: *mut *mut ConecylSpec) -> ConecylStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = parse_immersion_spec(text)?;
        *out = Box::into_raw(Box::new(ConecylSpec(spec)));
        Ok(())
    })
}

/// Builds a member of a named family. `options` holds whitespace-separated
/// `key=value` pairs and may be null.
///
/// # Safety
/// `family` and a non-null `options` must be NUL-terminated strings and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecyl_spec_generate(
    family: *const c_char,
    options: *const c_char,
    out: *mut *mut ConecylSpec,
) -> ConecylStatus {
    guard(|| {
        let name = str_arg(family, "family")?;
        let Some(fam) = Family::from_name(name) else {
            return Err(Fail(ConecylStatus::UnknownFamily, format!("unknown family `{name}`")));
        };
        let mut opts = BTreeMap::new();
        if !options.is_null() {
            for kv in str_arg(options, "options")?.split_whitespace() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Fail(ConecylStatus::Precondition, format!("option `{kv}` is not key=value")))?;
                opts.insert(k.to_string(), v.to_string());
            }
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = generate(fam, &opts)?;
        *out = Box::into_raw(Box::new(ConecylSpec(spec)));
        Ok(())
    })
}

/// Releases a spec handle. Null is ignored.
///
/// # Safety
/// `spec` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conecyl_spec_free(spec: *mut ConecylSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of parameters and ambient dimension of a spec.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conecyl_spec_dims(
    spec: *const ConecylSpec,
    n_params: *mut usize,
    ambient_dim: *mut usize,
) -> ConecylStatus {
    guard(|| {
        let s = spec_arg(spec)?;
        if n_params.is_null() || ambient_dim.is_null() {
            return Err(null("out"));
        }
        *n_params = s.n_params();
        *ambient_dim = s.components.len();
        Ok(())
    })
}

/// Canonical DSL text of a spec, to be released with [`conecyl_string_free`].
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecyl_spec_to_dsl(spec: *const ConecylSpec, out: *mut *mut c_char) -> ConecylStatus {
    guard(|| put_string(out, spec_arg(spec)?.to_dsl()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conecyl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluates the 2-jet at `point` into caller buffers, with `k` the ambient
/// dimension and `n` the parameter count: `value[a]`, `first[a*n + j]` and
/// `second[(a*n + j)*n + l]`. The buffer lengths are `k`, `k*n` and `k*n*n`.
///
/// # Safety
/// `point` must hold `n_point` doubles and each buffer its stated length.
#[no_mangle]
pub unsafe extern "C" fn conecyl_eval_jet2(
    spec: *const ConecylSpec,
    point: *const f64,
    n_point: usize,
    value: *mut f64,
    value_len: usize,
    first: *mut f64,
    first_len: usize,
    second: *mut f64,
    second_len: usize,
) -> ConecylStatus {
    guard(|| {
        let s = spec_arg(spec)?;
        let p = point_arg(s, point, n_point)?;
        if value.is_null() || first.is_null() || second.is_null() {
            return Err(null("buffer"));
        }
        let (k, n) = (s.components.len(), s.n_params());
        if value_len < k || first_len < k * n || second_len < k * n * n {
            return Err(Fail(
                ConecylStatus::BufferTooSmall,
                format!("need buffers of {k}, {} and {} doubles", k * n, k * n * n),
            ));
        }
        let jet = eval_jet2(s, p)?;
        let value = std::slice::from_raw_parts_mut(value, k);
        let first = std::slice::from_raw_parts_mut(first, k * n);
        let second = std::slice::from_raw_parts_mut(second, k * n * n);
        for a in 0..k {
            value[a] = jet.value[a];
            for j in 0..n {
                first[a * n + j] = jet.first[a][j];
                for l in 0..n {
                    second[(a * n + j) * n + l] = jet.second[a][j][l];
                }
            }
        }
        Ok(())
    })
}

/// Analyzes one point. A non-positive tolerance selects the default.
///
/// # Safety
/// `point` must hold `n_point` doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecyl_analyze_point(
    spec: *const ConecylSpec,
    point: *const f64,
    n_point: usize,
    tol_alg: f64,
    tol_class: f64,
    out: *mut ConecylPointSummary,
) -> ConecylStatus {
    guard(|| {
        let s = spec_arg(spec)?;
        let p = point_arg(s, point, n_point)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let tol = tolerances(tol_alg, tol_class)?;
        let r = analyze_point(s, p, &tol, &AnalysisOptions::default())?;
        let f = &r.flags;
        let mut flags = 0;
        for (on, bit) in [
            (f.pseudo_umbilical, CONECYL_FLAG_PSEUDO_UMBILICAL),
            (f.isotropic, CONECYL_FLAG_ISOTROPIC),
            (f.flat == Some(true), CONECYL_FLAG_FLAT),
            (f.flat_normal_bundle, CONECYL_FLAG_FLAT_NORMAL_BUNDLE),
            (f.marginally_trapped, CONECYL_FLAG_MARGINALLY_TRAPPED),
            (f.minimal, CONECYL_FLAG_MINIMAL),
            (f.totally_umbilical, CONECYL_FLAG_TOTALLY_UMBILICAL),
            (f.a_h_zero, CONECYL_FLAG_A_H_ZERO),
            (f.alpha_zero, CONECYL_FLAG_ALPHA_ZERO),
            (!f.inconsistent.is_empty(), CONECYL_FLAG_INCONSISTENT),
        ] {
            if on {
                flags |= bit;
            }
        }
        let beta = |pick: fn(f64, f64) -> f64, init: f64| r.beta.iter().copied().fold(init, pick);
        *out = ConecylPointSummary {
            alpha: r.alpha,
            e1_alpha: r.e1_alpha,
            beta_min: beta(f64::min, f64::INFINITY),
            beta_max: beta(f64::max, f64::NEG_INFINITY),
            mean_curvature_norm2: r.mean_curvature_norm2,
            gauss_curvature: r.gauss_curvature.unwrap_or(f64::NAN),
            normal_curvature: r.normal_curvature.unwrap_or(f64::NAN),
            isotropy_spread: f.isotropy_spread,
            max_residual: r.residuals.values().copied().fold(0.0, f64::max),
            flags,
        };
        Ok(())
    })
}

/// Grid analysis over the spec's domain as a JSON report. `counts` holds one
/// node count per parameter.
///
/// # Safety
/// `counts` must hold `n_counts` entries and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conecyl_analyze_grid_json(
    spec: *const ConecylSpec,
    counts: *const usize,
    n_counts: usize,
    tol_alg: f64,
    tol_class: f64,
    seed: u64,
    out: *mut *mut c_char,
) -> ConecylStatus {
    guard(|| {
        let s = spec_arg(spec)?;
        if counts.is_null() {
            return Err(null("counts"));
        }
        if n_counts != s.n_params() {
            return Err(Error::Dimension {
                expected: s.n_params(),
                got: n_counts,
            }
            .into());
        }
        let counts = std::slice::from_raw_parts(counts, n_counts).to_vec();
        if counts.contains(&0) {
            return Err(Error::Precondition("grid counts must be positive".into()).into());
        }
        let tol = tolerances(tol_alg, tol_class)?;
        let grid = Grid::new(s, counts, None)?;
        put_string(out, analyze_grid(s, grid, &tol, seed).to_json())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn every_error_maps_to_a_negative_code() {
        let errs = [
            Error::DegenerateNormal,
            Error::BlowDown { s: 1.0 },
            Error::InvalidSpec("x".into()),
            Error::NotNormal(1.0),
        ];
        for e in errs {
            assert!((status_of(&e) as i32) < 0);
        }
    }

    #[test]
    fn null_handles_are_rejected() {
        let mut n = 0usize;
        let st = unsafe { conecyl_spec_dims(ptr::null(), &mut n, &mut n) };
        assert_eq!(st, ConecylStatus::NullPointer);
    }
}
