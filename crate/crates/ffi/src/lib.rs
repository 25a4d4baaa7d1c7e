//! C interface to `qconc`.
//!
//! States are opaque handles created by `qconc_*_new` and released with the
//! matching `qconc_*_free`. Every fallible call returns a [`QconcStatus`];
//! on failure `qconc_last_error` gives a message for the calling thread.
//!
//! Complex matrices are passed row-major as interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qconc::linalg::{c64, CMatrix};
use qconc::mixed::{self, DensityMatrix};
use qconc::purestate::PureState;
use qconc::roofopt::{self, Objective, RoofProblem};
use qconc::spectra::{self, EigFamily};
use qconc::Error;

/// Tolerance used to validate matrices passed in through the C interface.
pub const QCONC_INPUT_TOL: f64 = 1e-9;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QconcStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Invalid input: shape, normalization, positivity, profile, range.
    InvalidInput = 2,
    /// Convergence failure or internal inconsistency.
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QconcFamily {
    /// `λ = (u, v)`.
    TwoEigen = 0,
    /// `λ = (u, u+v, u+2v)`.
    ArithmeticThree = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QconcObjective {
    /// Average entanglement of formation.
    AverageE = 0,
    /// Average generalized concurrence for a profile `(m, n)`.
    AverageD = 1,
}

/// Opaque pure state.
pub struct QconcPureState(PureState);

/// Opaque density matrix.
pub struct QconcDensity(DensityMatrix);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QconcRoofResult {
    pub value: f64,
    pub cardinality: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QconcCertificate {
    pub bound: f64,
    pub roof_min: f64,
    pub gap: f64,
    pub violated: bool,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Fail {
    Null(&'static str),
    Input(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QconcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QconcStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            QconcStatus::NullPointer
        }
        Ok(Err(Fail::Input(m))) => {
            set_error(m);
            QconcStatus::InvalidInput
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            if e.is_numerical() {
                QconcStatus::Numerical
            } else {
                QconcStatus::InvalidInput
            }
        }
        Err(_) => {
            set_error("panic inside qconc".into());
            QconcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn write<T>(p: *mut T, name: &'static str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_matrix(data: *const f64, size: usize) -> Result<CMatrix, Fail> {
    if data.is_null() {
        return Err(Fail::Null("data"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * size * size);
    Ok(CMatrix::from_fn(size, size, |r, c| {
        let k = 2 * (r * size + c);
        c64(raw[k], raw[k + 1])
    }))
}

fn check_dim(dim: usize) -> Result<(), Fail> {
    if dim < 2 {
        return Err(Fail::Input(format!("dim must be at least 2, got {dim}")));
    }
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qconc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn qconc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a pure state from its `dim × dim` coefficient matrix
/// (`2·dim²` doubles). The state is rescaled to unit norm if its norm is
/// within 1e-9 of one.
///
/// # Safety
/// `data` must point to `2·dim²` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_new(dim: usize, data: *const f64, out: *mut *mut QconcPureState) -> QconcStatus {
    guard(|| {
        check_dim(dim)?;
        let a = read_matrix(data, dim)?;
        let psi = PureState::from_coefficients(a, QCONC_INPUT_TOL, true)?;
        write(out, "out", Box::into_raw(Box::new(QconcPureState(psi))))
    })
}

/// # Safety
/// `state` must come from `qconc_pure_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_free(state: *mut QconcPureState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Entanglement of formation in bits.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_eof(state: *const QconcPureState, out: *mut f64) -> QconcStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write(out, "out", s.0.eof()?)
    })
}

/// The `C_N` concurrence.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_concurrence(state: *const QconcPureState, out: *mut f64) -> QconcStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write(out, "out", s.0.concurrence_cn()?)
    })
}

/// Generalized concurrence `D` for the spectrum profile `(m, n)`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_generalized_concurrence(
    state: *const QconcPureState,
    m: usize,
    n: usize,
    out: *mut f64,
) -> QconcStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write(out, "out", s.0.generalized_concurrence(m, n)?)
    })
}

/// Local-unitary invariants `I0 = Tr(AA†)` and `I1 = Tr[(AA†)²]`.
///
/// # Safety
/// `state` must be a live handle; `i0` and `i1` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_pure_invariants(state: *const QconcPureState, i0: *mut f64, i1: *mut f64) -> QconcStatus {
    guard(|| {
        let inv = deref(state, "state")?.0.local_invariants();
        write(i0, "i0", inv.i0)?;
        write(i1, "i1", inv.i1)
    })
}

/// Builds a density matrix on `C^dim ⊗ C^dim` from `2·dim⁴` doubles,
/// basis index `dim·i + p`.
///
/// # Safety
/// `data` must point to `2·dim⁴` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_new(dim: usize, data: *const f64, out: *mut *mut QconcDensity) -> QconcStatus {
    guard(|| {
        check_dim(dim)?;
        let m = read_matrix(data, dim * dim)?;
        let rho = DensityMatrix::new(dim, m, QCONC_INPUT_TOL)?;
        write(out, "out", Box::into_raw(Box::new(QconcDensity(rho))))
    })
}

/// `|ψ⟩⟨ψ|`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_from_pure(state: *const QconcPureState, out: *mut *mut QconcDensity) -> QconcStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let rho = DensityMatrix::from_pure(&s.0);
        write(out, "out", Box::into_raw(Box::new(QconcDensity(rho))))
    })
}

/// Werner state `p·|Φ⁺⟩⟨Φ⁺| + (1−p)·I/4`, `0 ≤ p ≤ 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_werner(p: f64, out: *mut *mut QconcDensity) -> QconcStatus {
    guard(|| {
        if !(0.0..=1.0).contains(&p) {
            return Err(Fail::Input(format!("werner weight must lie in [0, 1], got {p}")));
        }
        write(out, "out", Box::into_raw(Box::new(QconcDensity(mixed::werner(p)))))
    })
}

/// # Safety
/// `rho` must come from a `qconc_density_*` constructor and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_free(rho: *mut QconcDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Local dimension N.
///
/// # Safety
/// `rho` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qconc_density_dim(rho: *const QconcDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Lower bound on the generalized concurrence for profile `(m, n)`.
/// With `clamp`, negative per-index terms count as zero.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_bound(
    rho: *const QconcDensity,
    m: usize,
    n: usize,
    clamp: bool,
    out: *mut f64,
) -> QconcStatus {
    guard(|| {
        let r = deref(rho, "rho")?;
        write(out, "out", mixed::d_lower_bound(&r.0, m, n, clamp)?)
    })
}

/// Lower bound on the entanglement of formation in bits (`n` = 2 or 3).
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_eof_bound(
    rho: *const QconcDensity,
    m: usize,
    n: usize,
    out: *mut f64,
) -> QconcStatus {
    guard(|| {
        let r = deref(rho, "rho")?;
        write(out, "out", mixed::eof_lower_bound(&r.0, m, n)?)
    })
}

/// Partial-transpose test. `min_eigenvalue` may be null.
///
/// # Safety
/// `rho` must be a live handle and `is_ppt` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_ppt(
    rho: *const QconcDensity,
    is_ppt: *mut bool,
    min_eigenvalue: *mut f64,
) -> QconcStatus {
    guard(|| {
        let report = deref(rho, "rho")?.0.ppt_check()?;
        write(is_ppt, "is_ppt", report.is_ppt)?;
        if !min_eigenvalue.is_null() {
            min_eigenvalue.write(report.min_eigenvalue);
        }
        Ok(())
    })
}

fn roof_problem(rho: &DensityMatrix, objective: QconcObjective, m: usize, n: usize, restarts: usize, seed: u64) -> RoofProblem {
    let objective = match objective {
        QconcObjective::AverageE => Objective::AverageE,
        QconcObjective::AverageD => Objective::AverageD { m, n },
    };
    let mut p = RoofProblem::new(rho.clone(), objective);
    p.restarts = restarts;
    p.seed = seed;
    p
}

/// Minimizes the average objective over decompositions of `rho`.
/// `m`, `n` are ignored for `AverageE`.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_roof(
    rho: *const QconcDensity,
    objective: QconcObjective,
    m: usize,
    n: usize,
    restarts: usize,
    seed: u64,
    out: *mut QconcRoofResult,
) -> QconcStatus {
    guard(|| {
        let r = deref(rho, "rho")?;
        let res = roofopt::minimize_roof(&roof_problem(&r.0, objective, m, n, restarts, seed))?;
        write(
            out,
            "out",
            QconcRoofResult {
                value: res.value,
                cardinality: res.cardinality,
                iterations: res.iterations,
                converged: res.converged,
            },
        )
    })
}

/// Compares the concurrence bound with a numerical roof minimum.
///
/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_density_certify(
    rho: *const QconcDensity,
    m: usize,
    n: usize,
    restarts: usize,
    seed: u64,
    out: *mut QconcCertificate,
) -> QconcStatus {
    guard(|| {
        let r = deref(rho, "rho")?;
        let settings = roof_problem(&r.0, QconcObjective::AverageD, m, n, restarts, seed);
        let c = roofopt::certify_bound(&r.0, m, n, &settings)?;
        write(
            out,
            "out",
            QconcCertificate {
                bound: c.bound,
                roof_min: c.roof_min,
                gap: c.gap,
                violated: c.violated,
                converged: c.converged,
            },
        )
    })
}

/// Monotonicity and convexity sums at the point `(u, v)` of a family with
/// multiplicity `m`. `step` ≤ 0 picks the default finite-difference step.
///
/// # Safety
/// `lemma` and `convexity` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_lemma(
    family: QconcFamily,
    m: usize,
    u: f64,
    v: f64,
    step: f64,
    lemma: *mut f64,
    convexity: *mut f64,
) -> QconcStatus {
    guard(|| {
        if m == 0 {
            return Err(Fail::Input("m must be positive".into()));
        }
        let fam = match family {
            QconcFamily::TwoEigen => EigFamily::TwoEigen { m },
            QconcFamily::ArithmeticThree => EigFamily::ArithmeticThree { m },
        };
        let t = fam.parameter(u, v)?;
        let step = step.max(0.0);
        write(lemma, "lemma", spectra::lemma_value(&fam, t, step)?)?;
        write(convexity, "convexity", spectra::convexity_value(&fam, t, step)?)
    })
}

/// Entanglement of formation (bits) of a state with two-eigenvalue
/// concurrence `d` and multiplicity `m`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qconc_eof_of_concurrence(d: f64, m: usize, out: *mut f64) -> QconcStatus {
    guard(|| write(out, "out", spectra::eof_of_d(d, m)?))
}
