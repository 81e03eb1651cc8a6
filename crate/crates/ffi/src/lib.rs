//! C ABI over `qstfidlab`.
//!
//! Every function returns a [`QstStatus`]; results come back through out
//! pointers. On failure, [`qst_last_error`] describes the most recent error on
//! the calling thread. States and density matrices are opaque handles released
//! with their `_free` functions, and strings returned by the library are
//! released with [`qst_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qstfidlab::channel::{apply_parallel_channels, TransitionAmplitude};
use qstfidlab::classes::classify_canonical;
use qstfidlab::entanglement::CanonicalState;
use qstfidlab::fidelity::{
    avg_fidelity_haar_closed, avg_fidelity_single, class_avg_fidelity, fidelity, four_qubit_avg_fidelity,
    reduction_factor, ClassTag, ReductionKind, SingleQubitAvgFidelity,
};
use qstfidlab::io::{density_to_json, state_from_json, state_to_json};
use qstfidlab::montecarlo::{mc_fidelity_haar, mc_fidelity_local_unitary_orbit, Estimate};
use qstfidlab::qstate::{DensityMatrix, PureState};
use qstfidlab::{Error, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QstStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    SamplerFailure = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QstReduction {
    R2 = 0,
    R3 = 1,
    R4a = 2,
    R4b = 3,
}

/// Monte-Carlo mean with its standard error.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QstEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Opaque normalized pure state.
pub struct QstPureState(PureState);

/// Opaque density matrix.
pub struct QstDensityMatrix(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(QstStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Numerical(_) => QstStatus::Numerical,
            Error::SamplerFailure(_) => QstStatus::SamplerFailure,
            Error::Io(_) => QstStatus::Io,
            _ => QstStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(QstStatus::InvalidArgument, message.into())
}

fn null(what: &str) -> Failure {
    Failure(QstStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QstStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            QstStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {message}"));
            QstStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| invalid("string contains a NUL byte"))?;
    write_out(out, c.into_raw(), "out")
}

fn amplitude(f_abs: f64, f_phase: f64) -> Result<TransitionAmplitude, Failure> {
    Ok(TransitionAmplitude::new(f_abs, f_phase)?)
}

fn tag(name: *const c_char) -> Result<ClassTag, Failure> {
    Ok(unsafe { read_str(name, "tag") }?.parse()?)
}

impl From<Estimate> for QstEstimate {
    fn from(e: Estimate) -> Self {
        Self {
            mean: e.mean,
            std_error: e.std_error,
            samples: e.samples,
            seed: e.seed,
        }
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qst_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a state from `dim` interleaved `(re, im)` pairs, normalizing it.
///
/// # Safety
/// `re_im` must point to `2 * dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_state_new(re_im: *const f64, dim: usize, out: *mut *mut QstPureState) -> QstStatus {
    guard(|| {
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        let values = std::slice::from_raw_parts(re_im, 2 * dim);
        let amps = values.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let psi = PureState::new(amps)?;
        write_out(out, Box::into_raw(Box::new(QstPureState(psi))), "out")
    })
}

/// Parses a state from its JSON file format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_state_from_json(json: *const c_char, out: *mut *mut QstPureState) -> QstStatus {
    guard(|| {
        let psi = state_from_json(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(QstPureState(psi))), "out")
    })
}

/// # Safety
/// `state` must be a live handle; `out` receives a string for [`qst_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qst_state_to_json(state: *const QstPureState, out: *mut *mut c_char) -> QstStatus {
    guard(|| {
        let psi = deref(state, "state")?;
        out_string(out, state_to_json(&psi.0)?)
    })
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_state_n_qubits(state: *const QstPureState, out: *mut usize) -> QstStatus {
    guard(|| write_out(out, deref(state, "state")?.0.n_qubits(), "out"))
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qst_state_free(state: *mut QstPureState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `|ψ><ψ|` as a new density-matrix handle.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_state_to_density(
    state: *const QstPureState,
    out: *mut *mut QstDensityMatrix,
) -> QstStatus {
    guard(|| {
        let rho = deref(state, "state")?.0.to_density();
        write_out(out, Box::into_raw(Box::new(QstDensityMatrix(rho))), "out")
    })
}

/// Sends every qubit of `rho` through its own channel. `f_abs` and `f_phase`
/// hold one value per qubit; `f_phase` may be null for real amplitudes.
///
/// # Safety
/// `rho` must be a live handle, the arrays must hold `n` doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_apply_channels(
    rho: *const QstDensityMatrix,
    f_abs: *const f64,
    f_phase: *const f64,
    n: usize,
    out: *mut *mut QstDensityMatrix,
) -> QstStatus {
    guard(|| {
        let rho = deref(rho, "rho")?;
        if f_abs.is_null() {
            return Err(null("f_abs"));
        }
        let mags = std::slice::from_raw_parts(f_abs, n);
        let fs = (0..n)
            .map(|i| amplitude(mags[i], if f_phase.is_null() { 0.0 } else { *f_phase.add(i) }))
            .collect::<Result<Vec<_>, _>>()?;
        let received = apply_parallel_channels(&rho.0, &fs)?;
        write_out(out, Box::into_raw(Box::new(QstDensityMatrix(received))), "out")
    })
}

/// # Safety
/// `rho` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_density_trace(rho: *const QstDensityMatrix, out: *mut f64) -> QstStatus {
    guard(|| write_out(out, deref(rho, "rho")?.0.trace(), "out"))
}

/// # Safety
/// `rho` must be a live handle; `out` receives a string for [`qst_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qst_density_to_json(rho: *const QstDensityMatrix, out: *mut *mut c_char) -> QstStatus {
    guard(|| out_string(out, density_to_json(&deref(rho, "rho")?.0)?))
}

/// Releases a density matrix. Null is ignored.
///
/// # Safety
/// `rho` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qst_density_free(rho: *mut QstDensityMatrix) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// `<ψ|ρ|ψ>`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_fidelity(
    state: *const QstPureState,
    rho: *const QstDensityMatrix,
    out: *mut f64,
) -> QstStatus {
    guard(|| {
        let f = fidelity(&deref(state, "state")?.0, &deref(rho, "rho")?.0)?;
        write_out(out, f, "out")
    })
}

/// Single-qubit average fidelity `1/3 + |1 + f|²/6`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_avg_fidelity_single(f_abs: f64, f_phase: f64, out: *mut f64) -> QstStatus {
    guard(|| write_out(out, avg_fidelity_single(amplitude(f_abs, f_phase)?), "out"))
}

/// Haar-averaged `n`-qubit fidelity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_avg_fidelity_haar(n: usize, f_abs: f64, f_phase: f64, out: *mut f64) -> QstStatus {
    guard(|| write_out(out, avg_fidelity_haar_closed(n, amplitude(f_abs, f_phase)?)?, "out"))
}

/// Reduction factor at single-qubit average fidelity `f1` in `[1/2, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_reduction_factor(kind: QstReduction, f1: f64, out: *mut f64) -> QstStatus {
    guard(|| {
        let kind = match kind {
            QstReduction::R2 => ReductionKind::R2,
            QstReduction::R3 => ReductionKind::R3,
            QstReduction::R4a => ReductionKind::R4a,
            QstReduction::R4b => ReductionKind::R4b,
        };
        write_out(out, reduction_factor(kind, SingleQubitAvgFidelity::new(f1)?), "out")
    })
}

/// Class-averaged three-qubit fidelity for a tag such as `"c4b"`.
///
/// # Safety
/// `tag_name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_class_avg_fidelity(tag_name: *const c_char, f1: f64, out: *mut f64) -> QstStatus {
    guard(|| {
        let v = class_avg_fidelity(tag(tag_name)?, SingleQubitAvgFidelity::new(f1)?)?;
        write_out(out, v, "out")
    })
}

/// Average fidelity of a named four-qubit state (`"GHZ4"`, `"Cl4"`, `"X4"`,
/// `"B2"`, `"W4"`).
///
/// # Safety
/// `tag_name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_four_qubit_avg_fidelity(tag_name: *const c_char, f1: f64, out: *mut f64) -> QstStatus {
    guard(|| {
        let v = four_qubit_avg_fidelity(tag(tag_name)?, SingleQubitAvgFidelity::new(f1)?)?;
        write_out(out, v, "out")
    })
}

/// Classifies the canonical state `lambda[0..5]`, `phi`. `out` receives the
/// class label, or `"unclassified"`.
///
/// # Safety
/// `lambda` must point to five doubles; `out` receives a string for
/// [`qst_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qst_classify_canonical(
    lambda: *const f64,
    phi: f64,
    tol: f64,
    out: *mut *mut c_char,
) -> QstStatus {
    guard(|| {
        if lambda.is_null() {
            return Err(null("lambda"));
        }
        let mut l = [0.0; 5];
        l.copy_from_slice(std::slice::from_raw_parts(lambda, 5));
        let c = CanonicalState::new(l, phi)?;
        out_string(out, classify_canonical(&c, tol)?.label().to_owned())
    })
}

/// Monte-Carlo Haar average of the `n`-qubit transfer fidelity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qst_mc_fidelity_haar(
    n: usize,
    f_abs: f64,
    f_phase: f64,
    samples: usize,
    seed: u64,
    out: *mut QstEstimate,
) -> QstStatus {
    guard(|| {
        let e = mc_fidelity_haar(n, amplitude(f_abs, f_phase)?, samples, seed)?;
        write_out(out, e.into(), "out")
    })
}

/// Monte-Carlo average over the local-unitary orbit of `state`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qst_mc_fidelity_orbit(
    state: *const QstPureState,
    f_abs: f64,
    f_phase: f64,
    samples: usize,
    seed: u64,
    out: *mut QstEstimate,
) -> QstStatus {
    guard(|| {
        let psi = deref(state, "state")?;
        let e = mc_fidelity_local_unitary_orbit(&psi.0, amplitude(f_abs, f_phase)?, samples, seed)?;
        write_out(out, e.into(), "out")
    })
}
