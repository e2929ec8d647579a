//! C interface to `qsinglet`.
//!
//! Channels live behind an opaque `QsChannel` handle. Every fallible call
//! returns a `QsStatus`; on failure the message is available from
//! `qs_last_error_message` on the same thread until the next failing call.
//! Complex numbers cross the boundary as interleaved `re, im` doubles and
//! matrices are row-major.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsinglet::channel::validate;
use qsinglet::linalg::{Mat2, Mat4, C64};
use qsinglet::oneshot::{channel_negativity, optimal_input_state, optimal_singlet_fraction, report, NegativitySearch};
use qsinglet::{choi, fstar, DensityMatrix, Error, KrausChannel};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed argument: bad UTF-8, unknown parameter, non-finite entry.
    InvalidInput = 2,
    /// Not a valid channel or state.
    InvalidChannel = 3,
    UnknownChannel = 4,
    ParameterOutOfRange = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Opaque channel handle.
pub struct QsChannel {
    inner: KrausChannel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> QsStatus {
    match e {
        Error::UnknownChannel(_) => QsStatus::UnknownChannel,
        Error::ParameterOutOfRange { .. } => QsStatus::ParameterOutOfRange,
        Error::InvalidChannel(_)
        | Error::InvalidState(_)
        | Error::NotHermitian { .. }
        | Error::EntanglementBreaking { .. } => QsStatus::InvalidChannel,
        _ => QsStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QsStatus, String)>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            QsStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (QsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QsStatus, String) {
    (QsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn channel_ref<'a>(ch: *const QsChannel) -> Result<&'a KrausChannel, (QsStatus, String)> {
    ch.as_ref().map(|c| &c.inner).ok_or_else(|| null("channel"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QsStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn c64_pairs(data: &[f64]) -> impl Iterator<Item = C64> + '_ {
    data.chunks_exact(2).map(|z| C64::new(z[0], z[1]))
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build a named channel (`amplitude_damping`, `depolarizing`, ...).
///
/// `keys` and `values` hold `n_params` parameter names and values; both may be
/// null when `n_params` is zero.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_named(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    n_params: usize,
    out: *mut *mut QsChannel,
) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let mut params = BTreeMap::new();
        if n_params > 0 {
            if keys.is_null() || values.is_null() {
                return Err(null("parameter arrays"));
            }
            for i in 0..n_params {
                params.insert(str_arg(*keys.add(i), "parameter name")?.to_string(), *values.add(i));
            }
        }
        let c = KrausChannel::from_name(name, &params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QsChannel { inner: c }));
        Ok(())
    })
}

/// Build a channel from `n_ops` Kraus operators, each 8 doubles
/// (row-major 2×2, interleaved `re, im`). Trace preservation is not
/// checked here; see `qs_channel_validate`.
///
/// # Safety
/// `data` must hold `8 * n_ops` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_kraus(data: *const f64, n_ops: usize, out: *mut *mut QsChannel) -> QsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if data.is_null() {
            return Err(null("data"));
        }
        if n_ops == 0 {
            return Err((QsStatus::InvalidChannel, "no Kraus operators".into()));
        }
        let flat = std::slice::from_raw_parts(data, 8 * n_ops);
        let kraus = flat
            .chunks_exact(8)
            .map(|m| {
                let z: Vec<C64> = c64_pairs(m).collect();
                Mat2::from_rows([[z[0], z[1]], [z[2], z[3]]])
            })
            .collect();
        let c = KrausChannel::new(kraus).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QsChannel { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `ch` must come from a constructor in this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_free(ch: *mut QsChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Number of stored Kraus operators.
///
/// # Safety
/// `ch` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_kraus_count(ch: *const QsChannel, out: *mut usize) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        *out.as_mut().ok_or_else(|| null("out"))? = c.kraus().len();
        Ok(())
    })
}

/// Trace-preservation residual and smallest Choi eigenvalue; `ok` is 1 when
/// both are within `tol`.
///
/// # Safety
/// `ch` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_validate(
    ch: *const QsChannel,
    tol: f64,
    tp_residual: *mut f64,
    cp_min_eigenvalue: *mut f64,
    ok: *mut i32,
) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        if tp_residual.is_null() || cp_min_eigenvalue.is_null() || ok.is_null() {
            return Err(null("output"));
        }
        let v = validate(c, tol);
        *tp_residual = v.tp_residual;
        *cp_min_eigenvalue = v.cp_min_eigenvalue;
        *ok = v.ok as i32;
        Ok(())
    })
}

/// Optimal one-shot singlet fraction `max(½, λ_max)` of the Choi state.
///
/// # Safety
/// `ch` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_optimal_singlet_fraction(
    ch: *const QsChannel,
    value: *mut f64,
    lambda_max: *mut f64,
    entanglement_breaking: *mut i32,
) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        if value.is_null() || lambda_max.is_null() || entanglement_breaking.is_null() {
            return Err(null("output"));
        }
        let o = optimal_singlet_fraction(c);
        *value = o.value;
        *lambda_max = o.lambda_max;
        *entanglement_breaking = o.entanglement_breaking as i32;
        Ok(())
    })
}

/// Optimal input state (8 doubles, amplitudes of |00⟩..|11⟩), its larger
/// Schmidt coefficient and whether the top eigenvalue is degenerate.
///
/// # Safety
/// `ch` must be a live handle; `state` must hold 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_optimal_input(
    ch: *const QsChannel,
    state: *mut f64,
    schmidt_lambda: *mut f64,
    degenerate: *mut i32,
) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        if state.is_null() || schmidt_lambda.is_null() || degenerate.is_null() {
            return Err(null("output"));
        }
        let o = optimal_input_state(c);
        let out = std::slice::from_raw_parts_mut(state, 8);
        for (k, z) in o.state.iter().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        *schmidt_lambda = o.schmidt.lambda();
        *degenerate = o.degenerate as i32;
        Ok(())
    })
}

/// Channel negativity maximised over pure inputs (seeded multistart).
///
/// # Safety
/// `ch` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_channel_negativity(ch: *const QsChannel, seed: u64, value: *mut f64) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        let out = value.as_mut().ok_or_else(|| null("value"))?;
        *out = channel_negativity(c, &NegativitySearch { seed, ..Default::default() }).value;
        Ok(())
    })
}

/// Singlet fraction reachable by trace-preserving LOCC from the Choi state.
///
/// # Safety
/// `ch` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_fstar_choi(ch: *const QsChannel, value: *mut f64) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        let out = value.as_mut().ok_or_else(|| null("value"))?;
        let rho = DensityMatrix::new(*choi(c).matrix()).map_err(lib_err)?;
        *out = fstar(&rho);
        Ok(())
    })
}

/// Singlet fraction reachable by trace-preserving LOCC from a two-qubit
/// density matrix given as 32 doubles (row-major 4×4, interleaved).
///
/// # Safety
/// `rho` must hold 32 doubles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_fstar_state(rho: *const f64, value: *mut f64) -> QsStatus {
    guard(|| {
        if rho.is_null() {
            return Err(null("rho"));
        }
        let out = value.as_mut().ok_or_else(|| null("value"))?;
        let z: Vec<C64> = c64_pairs(std::slice::from_raw_parts(rho, 32)).collect();
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = z[4 * i + j];
            }
        }
        *out = fstar(&DensityMatrix::new(m).map_err(lib_err)?);
        Ok(())
    })
}

/// Full analysis as a JSON document. Release with `qs_string_free`.
///
/// # Safety
/// `ch` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_report_json(ch: *const QsChannel, seed: u64, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let c = channel_ref(ch)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = report(c, &NegativitySearch { seed, ..Default::default() });
        let text = serde_json::to_string(&r).map_err(|e| (QsStatus::Internal, e.to_string()))?;
        *out = CString::new(text).map_err(|e| (QsStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from `qs_report_json` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
