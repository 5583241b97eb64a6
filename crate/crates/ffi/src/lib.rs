//! C ABI over the `hsolv` library.
//!
//! Every entry point returns an [`HsolvStatus`]. On failure a message is
//! available from [`hsolv_last_error`] until the next call on the same thread.
//! Panics never cross the boundary; they surface as `HSOLV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hsolv::algebra::{check_generic, parse_operator, NcPolynomial};
use hsolv::config::Config;
use hsolv::numerics::{ginv_of, schwartz_match, schwartz_match_top, OdeModel};
use hsolv::realization::Sign;
use hsolv::scalar::C64;
use hsolv::verdict::{classify, OperatorEcho, Report, Status};
use hsolv::HsolvError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsolvStatus {
    Ok = 0,
    Parse = 2,
    NonGeneric = 3,
    Numerical = 4,
    NullPointer = 5,
    InvalidArgument = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsolvSign {
    /// `Y -> +t`
    Plus = 0,
    /// `Y -> -t`
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsolvVerdict {
    NotSolvableProven = 0,
    SolvableConditional = 1,
    NotSolvableEvidence = 2,
    Inconclusive = 3,
}

/// Parsed operator. Create with `hsolv_operator_parse`, release with `hsolv_operator_free`.
pub struct HsolvOperator {
    text: String,
    poly: NcPolynomial,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HsolvExponent {
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub rho_re: f64,
    pub rho_im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HsolvClassification {
    pub verdict: HsolvVerdict,
    /// roots with positive real part
    pub p_pos: usize,
    pub p_neg: usize,
    pub n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &HsolvError) -> HsolvStatus {
    match e {
        HsolvError::Syntax { .. } | HsolvError::EmptyInput | HsolvError::DegreeOutOfRange(_) => HsolvStatus::Parse,
        HsolvError::InvalidArgument(_) => HsolvStatus::InvalidArgument,
        HsolvError::NonGeneric(_) | HsolvError::DegreeTooLow(_) | HsolvError::RepeatedRoots(_) => {
            HsolvStatus::NonGeneric
        }
        _ => HsolvStatus::Numerical,
    }
}

struct Fail(HsolvStatus, String);

impl From<HsolvError> for Fail {
    fn from(e: HsolvError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HsolvStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HsolvStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsolvStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            HsolvStatus::Panic
        }
    }
}

unsafe fn op_ref<'a>(op: *const HsolvOperator) -> Result<&'a HsolvOperator, Fail> {
    op.as_ref().ok_or_else(|| null("operator"))
}

fn sign_of(s: HsolvSign) -> Sign {
    match s {
        HsolvSign::Plus => Sign::Plus,
        HsolvSign::Minus => Sign::Minus,
    }
}

fn require_generic(p: &NcPolynomial, cfg: &Config) -> Result<(), Fail> {
    let g = check_generic(p, &cfg.tol)?;
    if g.is_generic {
        Ok(())
    } else {
        Err(Fail(HsolvStatus::NonGeneric, format!("operator is not generic: {}", g.reasons.join("; "))))
    }
}

/// Writes `items` into `out[..capacity]`; `*count` always receives the full length.
unsafe fn fill<T: Copy>(items: &[T], out: *mut T, capacity: usize, count: *mut usize) -> Result<(), Fail> {
    let count = count.as_mut().ok_or_else(|| null("count"))?;
    *count = items.len();
    if capacity < items.len() {
        return Err(Fail(
            HsolvStatus::BufferTooSmall,
            format!("buffer holds {capacity} entries, {} needed", items.len()),
        ));
    }
    if !items.is_empty() {
        if out.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(items.as_ptr(), out, items.len());
    }
    Ok(())
}

/// Parses a NUL-terminated UTF-8 operator such as `"-X^2 - Y^2"`.
///
/// # Safety
/// `text` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hsolv_operator_parse(text: *const c_char, out: *mut *mut HsolvOperator) -> HsolvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail(HsolvStatus::Parse, "operator text is not UTF-8".into()))?;
        let poly = parse_operator(text)?;
        *out = Box::into_raw(Box::new(HsolvOperator { text: text.to_owned(), poly }));
        Ok(())
    })
}

/// # Safety
/// `op` must come from `hsolv_operator_parse` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hsolv_operator_free(op: *mut HsolvOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hsolv_operator_degree(op: *const HsolvOperator, out: *mut usize) -> HsolvStatus {
    guard(|| {
        let op = op_ref(op)?;
        *out.as_mut().ok_or_else(|| null("out"))? = op.poly.degree();
        Ok(())
    })
}

/// Ordered characteristic roots as interleaved `(re, im)` pairs.
/// `capacity` counts roots, so `re_im` must hold `2 * capacity` doubles.
///
/// # Safety
/// `op` must be a live handle; `re_im` must hold `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn hsolv_operator_roots(
    op: *const HsolvOperator,
    re_im: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> HsolvStatus {
    guard(|| {
        let op = op_ref(op)?;
        let cfg = Config::default();
        let g = check_generic(&op.poly, &cfg.tol)?;
        let flat: Vec<[f64; 2]> = g.roots.clone();
        fill(&flat, re_im as *mut [f64; 2], capacity, count)?;
        if !g.is_generic {
            return Err(Fail(HsolvStatus::NonGeneric, format!("operator is not generic: {}", g.reasons.join("; "))));
        }
        Ok(())
    })
}

/// Exponents `gamma_j, beta_j, rho_j` of the realization at parameter `gamma`.
/// An infinite `gamma_re` selects the top-grade limit.
///
/// # Safety
/// `op` must be a live handle; `out` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn hsolv_operator_exponents(
    op: *const HsolvOperator,
    sign: HsolvSign,
    gamma_re: f64,
    gamma_im: f64,
    out: *mut HsolvExponent,
    capacity: usize,
    count: *mut usize,
) -> HsolvStatus {
    guard(|| {
        let op = op_ref(op)?;
        let cfg = Config::default();
        require_generic(&op.poly, &cfg)?;
        let gamma = C64::new(gamma_re, gamma_im);
        if gamma.re.is_nan() || gamma.im.is_nan() || gamma.norm() == 0.0 {
            return Err(Fail(HsolvStatus::InvalidArgument, "gamma must be nonzero".into()));
        }
        let m = OdeModel::new(&hsolv::realization::realize(&op.poly, sign_of(sign))?, ginv_of(gamma), &cfg.tol)?;
        let e = &m.expo;
        let items: Vec<HsolvExponent> = (0..e.n())
            .map(|j| HsolvExponent {
                gamma_re: e.roots[j].re,
                gamma_im: e.roots[j].im,
                beta_re: e.beta[j].re,
                beta_im: e.beta[j].im,
                rho_re: e.rho[j].re,
                rho_im: e.rho[j].im,
            })
            .collect();
        fill(&items, out, capacity, count)
    })
}

/// Smallest singular value of the Schwartz matching test at `gamma`.
/// An infinite `gamma_re` tests the top-grade operator.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hsolv_schwartz_sigma_min(
    op: *const HsolvOperator,
    sign: HsolvSign,
    gamma_re: f64,
    gamma_im: f64,
    out: *mut f64,
) -> HsolvStatus {
    guard(|| {
        let op = op_ref(op)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = Config::default();
        require_generic(&op.poly, &cfg)?;
        let r = if gamma_re.is_infinite() {
            schwartz_match_top(&op.poly, sign_of(sign), &cfg)?
        } else {
            let gamma = C64::new(gamma_re, gamma_im);
            if gamma.re.is_nan() || gamma.im.is_nan() || gamma.norm() == 0.0 {
                return Err(Fail(HsolvStatus::InvalidArgument, "gamma must be nonzero".into()));
            }
            schwartz_match(&op.poly, sign_of(sign), gamma, &cfg)?
        };
        *out = r.sigma_min;
        Ok(())
    })
}

fn verdict_of(s: Status) -> HsolvVerdict {
    match s {
        Status::NotSolvableProven => HsolvVerdict::NotSolvableProven,
        Status::SolvableConditional => HsolvVerdict::SolvableConditional,
        Status::NotSolvableEvidence => HsolvVerdict::NotSolvableEvidence,
        Status::Inconclusive => HsolvVerdict::Inconclusive,
    }
}

/// Solvability verdict with default configuration.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hsolv_classify(op: *const HsolvOperator, out: *mut HsolvClassification) -> HsolvStatus {
    guard(|| {
        let op = op_ref(op)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = Config::default();
        require_generic(&op.poly, &cfg)?;
        let v = classify(&op.poly, &cfg);
        let c = v.root_counts;
        *out = HsolvClassification { verdict: verdict_of(v.status), p_pos: c.p_pos, p_neg: c.p_neg, n: c.n };
        Ok(())
    })
}

/// Full classification report as a JSON string owned by the caller.
/// Release it with `hsolv_string_free`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hsolv_classify_json(op: *const HsolvOperator, out: *mut *mut c_char) -> HsolvStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let op = op_ref(op)?;
        let cfg = Config::default();
        require_generic(&op.poly, &cfg)?;
        let v = classify(&op.poly, &cfg);
        let mut report = Report::new("classify", &cfg).with_verdict(&v);
        report.operator = Some(OperatorEcho::new(&op.text, &op.poly));
        let s = CString::new(report.to_json()).map_err(|e| Fail(HsolvStatus::Numerical, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hsolv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, empty after a success.
/// Valid until the next `hsolv_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hsolv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn hsolv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
