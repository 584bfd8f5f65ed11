//! C ABI for the twobath solver.
//!
//! Every fallible call returns a [`TbStatus`]; on failure the message is
//! available from [`tb_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twobath::bath::{build_chain, ChainMethod, SpectralDensity, WilsonChain};
use twobath::config::GroundConfig;
use twobath::dmrg::Flag;
use twobath::observables::RunResult;
use twobath::point::run_point;
use twobath::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Numerical = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Bits of [`tb_run_flags`].
pub const TB_FLAG_NOT_CONVERGED: u32 = 1;
pub const TB_FLAG_TRUNCATION_ABOVE_TARGET: u32 = 2;
pub const TB_FLAG_EIGENSOLVER_NOT_CONVERGED: u32 = 4;
pub const TB_FLAG_ENERGY_INCREASE: u32 = 8;

/// Result of one ground-state run.
pub struct TbRun {
    result: RunResult,
}

/// Wilson-chain coefficients.
pub struct TbChain {
    chain: WilsonChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::Config(_) | Error::Format { .. } | Error::DimensionLimit { .. } => TbStatus::Config,
        Error::Domain(_) => TbStatus::Domain,
        Error::DegenerateInput(_) | Error::Numerical(_) => TbStatus::Numerical,
        Error::Io { .. } => TbStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), TbStatus>) -> TbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            TbStatus::Panic
        }
    }
}

fn fail(e: Error) -> TbStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> TbStatus {
    set_error(format!("{what} is null"));
    TbStatus::NullPointer
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Solves the point described by a flat TOML config.
///
/// # Safety
/// `config` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_ground(config: *const c_char, out: *mut *mut TbRun) -> TbStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config).to_str().map_err(|e| {
            set_error(e.to_string());
            TbStatus::InvalidUtf8
        })?;
        let cfg = GroundConfig::from_toml(text).map_err(fail)?;
        let run = run_point(&cfg.point, &cfg.solver, None).map_err(fail)?;
        *out = Box::into_raw(Box::new(TbRun { result: run.result }));
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`tb_ground`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tb_run_free(run: *mut TbRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `run` must be a live handle and `energy` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_run_energy(run: *const TbRun, energy: *mut f64) -> TbStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        *energy.as_mut().ok_or_else(|| null("energy"))? = run.result.energy;
        Ok(())
    })
}

/// Spin expectations `⟨σx⟩, ⟨σy⟩, ⟨σz⟩`.
///
/// # Safety
/// `run` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn tb_run_spin(run: *const TbRun, sx: *mut f64, sy: *mut f64, sz: *mut f64) -> TbStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        *sx.as_mut().ok_or_else(|| null("sx"))? = run.result.sx;
        *sy.as_mut().ok_or_else(|| null("sy"))? = run.result.sy;
        *sz.as_mut().ok_or_else(|| null("sz"))? = run.result.sz;
        Ok(())
    })
}

/// Spin von Neumann entropy in nats.
///
/// # Safety
/// `run` must be a live handle and `svn` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_run_entropy(run: *const TbRun, svn: *mut f64) -> TbStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        *svn.as_mut().ok_or_else(|| null("svn"))? = run.result.svn;
        Ok(())
    })
}

/// Diagnostic flags as a bit set of `TB_FLAG_*`; 0 for null handles.
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tb_run_flags(run: *const TbRun) -> u32 {
    let Some(run) = run.as_ref() else { return 0 };
    run.result
        .flags
        .iter()
        .map(|f| match f {
            Flag::NotConverged => TB_FLAG_NOT_CONVERGED,
            Flag::TruncationAboveTarget => TB_FLAG_TRUNCATION_ABOVE_TARGET,
            Flag::EigensolverNotConverged => TB_FLAG_EIGENSOLVER_NOT_CONVERGED,
            Flag::EnergyIncrease => TB_FLAG_ENERGY_INCREASE,
        })
        .fold(0, |a, b| a | b)
}

/// Builds a Wilson chain for `J(ω) = 2·alpha·ω_c^{1−s}·ω^s`. A nonzero
/// `oracle` selects the discretize-and-tridiagonalize route.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tb_chain_new(
    alpha: f64,
    s: f64,
    cutoff: f64,
    lambda: f64,
    length: usize,
    oracle: bool,
    out: *mut *mut TbChain,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sd = SpectralDensity::new(alpha, s, cutoff).map_err(fail)?;
        let method = if oracle { ChainMethod::Lanczos } else { ChainMethod::ClosedForm };
        let chain = build_chain(&sd, lambda, length, method).map_err(fail)?;
        *out = Box::into_raw(Box::new(TbChain { chain }));
        Ok(())
    })
}

/// # Safety
/// `chain` must come from [`tb_chain_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tb_chain_free(chain: *mut TbChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of chain sites; 0 for null handles.
///
/// # Safety
/// `chain` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tb_chain_len(chain: *const TbChain) -> usize {
    chain.as_ref().map_or(0, |c| c.chain.len())
}

/// Site energy `ω_n` and hopping `t_n` (NaN past the last hopping).
///
/// # Safety
/// `chain` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn tb_chain_site(chain: *const TbChain, n: usize, omega: *mut f64, hopping: *mut f64) -> TbStatus {
    guard(|| {
        let c = &chain.as_ref().ok_or_else(|| null("chain"))?.chain;
        let w = *c.site_energies.get(n).ok_or_else(|| {
            set_error(format!("site {n} out of range for a chain of {}", c.len()));
            TbStatus::OutOfRange
        })?;
        *omega.as_mut().ok_or_else(|| null("omega"))? = w;
        *hopping.as_mut().ok_or_else(|| null("hopping"))? = c.hoppings.get(n).copied().unwrap_or(f64::NAN);
        Ok(())
    })
}
