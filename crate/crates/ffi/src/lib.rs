//! C interface to `ccpb`.
//!
//! Every fallible function returns a [`CcpbStatus`] and writes its results
//! through out-pointers. On failure a description is available from
//! [`ccpb_last_error_message`] on the same thread. Solutions are opaque
//! handles created by [`ccpb_solve`] and released with
//! [`ccpb_solution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ccpb::analysis::{classify_regime, predicted_error, Regime};
use ccpb::donnan::{channel_bath_ratio, debye_length, electrode_bulk_ratio, nondim_voltage, PhysicalConditions};
use ccpb::kernel::{i_approx, i_exact, ApproxVariant, Eps};
use ccpb::solver::{solve, CcpbSolution as Solution, ProblemParams, SolveOptions};
use ccpb::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcpbStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    QuadratureNonConvergence = 3,
    Bracketing = 4,
    NonConvergence = 5,
    Geometry = 6,
    NullPointer = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcpbRegime {
    Confined = 0,
    Intermediate = 1,
    EffectivelyInfinite = 2,
}

/// Opaque solution handle.
pub struct CcpbSolution {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CcpbStatus {
    match e {
        Error::InvalidArgument(_) => CcpbStatus::InvalidArgument,
        Error::Domain(_) => CcpbStatus::Domain,
        Error::QuadratureNonConvergence { .. } => CcpbStatus::QuadratureNonConvergence,
        Error::Bracketing(_) => CcpbStatus::Bracketing,
        Error::RootNonConvergence { .. } | Error::NewtonDivergence { .. } => CcpbStatus::NonConvergence,
        Error::Geometry(_) => CcpbStatus::Geometry,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CcpbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CcpbStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_last_error(&format!("null pointer passed for '{name}'"));
            CcpbStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic");
            CcpbStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, name: &'static str, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `h` must be null or a live handle from `ccpb_solve`.
unsafe fn handle<'a>(h: *const CcpbSolution) -> Result<&'a Solution, Fail> {
    h.as_ref().map(|s| &s.inner).ok_or(Fail::Null("solution"))
}

/// Message describing the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ccpb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Solves for the steady state on `[-L/2, L/2]` with boundary potentials
/// `±V` and Stern width `delta` (0 for Dirichlet boundaries).
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solve(
    length: f64,
    voltage: f64,
    delta: f64,
    tol: f64,
    out: *mut *mut CcpbSolution,
) -> CcpbStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        out.write(ptr::null_mut());
        let params = ProblemParams::with_stern(length, voltage, delta)?;
        let inner = solve(
            &params,
            SolveOptions {
                tol,
                ..SolveOptions::default()
            },
        )?;
        out.write(Box::into_raw(Box::new(CcpbSolution { inner })));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sol` must be null or a handle from `ccpb_solve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_free(sol: *mut CcpbSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// ε; may underflow to 0 for very large domains.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_eps(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.eps))
}

/// ln ε, finite whenever V ≠ 0.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_ln_eps(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.ln_eps))
}

/// Bulk concentration factor α.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_alpha(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.alpha))
}

/// Field at the domain center, signed like V.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_phi_x0(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.phi_x0))
}

/// Potential at `x = L/2` (below V with a Stern layer).
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_phi_boundary(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.phi_boundary))
}

/// Residual of the boundary condition solve.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_residual(sol: *const CcpbSolution, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", handle(sol)?.residual))
}

/// Number of `(phi, x)` table entries on `0 ≤ x ≤ L/2`; 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_sample_count(sol: *const CcpbSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.samples.len())
}

/// # Safety
/// `sol` must be a live handle; `phi` and `x` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_sample(
    sol: *const CcpbSolution,
    index: usize,
    phi: *mut f64,
    x: *mut f64,
) -> CcpbStatus {
    guard(|| {
        let s = handle(sol)?;
        let sample = s.samples.get(index).copied().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "sample index {index} out of range ({} samples)",
                s.samples.len()
            ))
        })?;
        write(phi, "phi", sample.phi)?;
        write(x, "x", sample.x)
    })
}

/// φ(x) for `|x| ≤ L/2`.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_phi_of_x(sol: *const CcpbSolution, x: f64, out: *mut f64) -> CcpbStatus {
    guard(|| {
        let s = handle(sol)?;
        let v = s.phi_of_x(x)?;
        write(out, "out", v)
    })
}

/// x(φ) for `|φ| ≤ |φ(L/2)|`.
///
/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_solution_x_of_phi(sol: *const CcpbSolution, phi: f64, out: *mut f64) -> CcpbStatus {
    guard(|| {
        let s = handle(sol)?;
        let v = s.x_of_phi(phi)?;
        write(out, "out", v)
    })
}

/// `∫₀^φ dx / √(sinh²(x/2) + ε²)` to absolute tolerance `tol`; ε is passed as ln ε.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_i_exact(phi: f64, ln_eps: f64, tol: f64, out: *mut f64) -> CcpbStatus {
    guard(|| {
        let r = i_exact(phi, Eps::from_ln(ln_eps), tol)?;
        write(out, "out", r.value)
    })
}

/// Asymptotic approximation of the integral; `refined` selects the √ε
/// matching point instead of ε^{3/4}. `within_validity` may be null.
///
/// # Safety
/// `out` must be valid for writes; `within_validity` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ccpb_i_approx(
    phi: f64,
    ln_eps: f64,
    refined: bool,
    out: *mut f64,
    within_validity: *mut bool,
) -> CcpbStatus {
    guard(|| {
        let variant = if refined {
            ApproxVariant::Refined
        } else {
            ApproxVariant::Crude
        };
        let a = i_approx(phi, Eps::from_ln(ln_eps), variant);
        write(out, "out", a.value)?;
        if !within_validity.is_null() {
            within_validity.write(a.within_validity);
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_predicted_error(voltage: f64, length: f64, out: *mut f64) -> CcpbStatus {
    guard(|| {
        ProblemParams::new(length, voltage)?;
        write(out, "out", predicted_error(voltage, length))
    })
}

/// Regime label with the predicted error and `4 sinh²(V/4)/L`; the two
/// value pointers may be null.
///
/// # Safety
/// `label` must be valid for writes; the others null or valid.
#[no_mangle]
pub unsafe extern "C" fn ccpb_classify_regime(
    voltage: f64,
    length: f64,
    tol: f64,
    label: *mut CcpbRegime,
    e_value: *mut f64,
    ratio_value: *mut f64,
) -> CcpbStatus {
    guard(|| {
        let r = classify_regime(voltage, length, tol)?;
        let l = match r.label {
            Regime::Confined => CcpbRegime::Confined,
            Regime::Intermediate => CcpbRegime::Intermediate,
            Regime::EffectivelyInfinite => CcpbRegime::EffectivelyInfinite,
        };
        write(label, "label", l)?;
        if !e_value.is_null() {
            e_value.write(r.e_value);
        }
        if !ratio_value.is_null() {
            ratio_value.write(r.ratio_value);
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_channel_bath_ratio(r: f64, max_error: f64, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", channel_bath_ratio(r, max_error)?))
}

/// # Safety
/// `cosh_form` and `paper_numeric_form` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_electrode_bulk_ratio(
    phi_el: f64,
    delta_err: f64,
    porosity: f64,
    cosh_form: *mut f64,
    paper_numeric_form: *mut f64,
) -> CcpbStatus {
    guard(|| {
        let b = electrode_bulk_ratio(phi_el, delta_err, porosity)?;
        write(cosh_form, "cosh_form", b.cosh_form)?;
        write(paper_numeric_form, "paper_numeric_form", b.paper_numeric_form)
    })
}

/// Debye length in meters for a concentration in mol/L.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_debye_length(
    concentration: f64,
    temperature: f64,
    relative_permittivity: f64,
    out: *mut f64,
) -> CcpbStatus {
    guard(|| {
        let cond = PhysicalConditions {
            concentration,
            temperature,
            relative_permittivity,
            voltage: 0.0,
        };
        write(out, "out", debye_length(&cond)?)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ccpb_nondim_voltage(voltage: f64, temperature: f64, out: *mut f64) -> CcpbStatus {
    guard(|| write(out, "out", nondim_voltage(voltage, temperature)?))
}
