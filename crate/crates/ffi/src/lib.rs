// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! C ABI over `bunching-core`.
//!
//! Every entry point returns a [`BunchingStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`bunching_last_error`]. Panics never cross the boundary; they
//! surface as [`BunchingStatus::Panic`].
//!
//! Handles ([`BunchingUnitary`], [`BunchingBehavior`]) are opaque and owned by
//! the caller once returned; release them with the matching `_free`
//! function. Strings returned through `char **` must be released with
//! [`bunching_string_free`].
//!
//! Mode indices are zero-based. Observable labels in contexts are one-based,
//! matching the JSON formats.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bunching_core::behavior::{Behavior, MeasurementContext, Outcome, Scenario};
use bunching_core::hv::{
    deterministic_behavior, lambda_exact_behavior, lambda_model_outcome, lambda_sample_behavior,
    DeterministicAssignment, HiddenLambdaState, LambdaLaw,
};
use bunching_core::inequalities::{correlator, cycle_value, no_disturbance_check, BoundsReport, CycleScenario};
use bunching_core::quantum::{
    no_signalling_report, output_distribution, per_photon_marginal, permanent, transition_probability,
    Complex64, FockState, ModeUnitary,
};
use bunching_core::report::Format;
use bunching_core::reproduce::{reproduce_reply, ReproduceOptions};
use bunching_core::scenario::{RunOptions, ScenarioFile};
use bunching_core::Error;
use nalgebra::DMatrix;

/// Result code of every entry point. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BunchingStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    Conservation = 4,
    Tie = 5,
    Parse = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque interferometer unitary.
pub struct BunchingUnitary(ModeUnitary);

/// Opaque pairwise-context behavior.
pub struct BunchingBehavior(Behavior);

/// Per-photon marginal of one mode before and after adding photons.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BunchingNoSignalling {
    pub marginal_before: f64,
    pub marginal_after: f64,
    pub difference: f64,
}

/// Marginal-consistency check. `worst_observable` is one-based, 0 if no
/// observable appears in two contexts.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BunchingNoDisturbance {
    pub pass: bool,
    pub worst_observable: usize,
    pub max_gap: f64,
}

/// Classical, no-disturbance and arithmetic bounds of a cycle correlator sum.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BunchingBounds {
    pub classical_min: f64,
    pub classical_max: f64,
    pub nd_min: f64,
    pub nd_max: f64,
    pub arithmetic_min: f64,
    pub arithmetic_max: f64,
}

struct Failure(BunchingStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::SizeLimit { .. } => BunchingStatus::SizeLimit,
            Error::Conservation { .. } => BunchingStatus::Conservation,
            Error::Tie { .. } => BunchingStatus::Tie,
            Error::Parse(_) => BunchingStatus::Parse,
            Error::Internal(_) | Error::Io(_) => BunchingStatus::Internal,
            _ => BunchingStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> BunchingStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BunchingStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            BunchingStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BunchingStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(BunchingStatus::InvalidArgument, msg.into())
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Empty slices may come with a null pointer.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

fn emit_string(dst: &mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Failure(BunchingStatus::Internal, "interior NUL in output".into()))?;
    *dst = c.into_raw();
    Ok(())
}

fn emit_handle<T>(dst: &mut *mut T, value: T) {
    *dst = Box::into_raw(Box::new(value));
}

unsafe fn fock(p: *const usize, modes: usize, what: &str) -> FfiResult<FockState> {
    Ok(FockState::new(slice(p, modes, what)?.to_vec()))
}

fn outcome(v: i8) -> FfiResult<Outcome> {
    match v {
        1 => Ok(Outcome::Plus),
        -1 => Ok(Outcome::Minus),
        _ => Err(invalid(format!("outcome must be +1 or -1, got {v}"))),
    }
}

unsafe fn scenario(observables: usize, contexts: *const usize, n_contexts: usize) -> FfiResult<Scenario> {
    let flat = slice(contexts, n_contexts.checked_mul(2).ok_or_else(|| invalid("too many contexts"))?, "contexts")?;
    let ctxs = flat
        .chunks_exact(2)
        .map(|p| MeasurementContext::labeled(p[0], p[1]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scenario::new(observables, ctxs)?)
}

unsafe fn law(json: *const c_char) -> FfiResult<LambdaLaw> {
    if json.is_null() {
        return Ok(LambdaLaw::Uniform);
    }
    serde_json::from_str(text(json, "law")?).map_err(|e| invalid(format!("law: {e}")))
}

unsafe fn complex_matrix(re: *const f64, im: *const f64, n: usize) -> FfiResult<DMatrix<Complex64>> {
    let len = n.checked_mul(n).ok_or_else(|| invalid("dimension overflow"))?;
    let re = slice(re, len, "re")?;
    let im = if im.is_null() { None } else { Some(slice(im, len, "im")?) };
    Ok(DMatrix::from_fn(n, n, |r, c| Complex64::new(re[r * n + c], im.map_or(0.0, |v| v[r * n + c]))))
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bunching_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bunching_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bunching_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Permanent of an `n × n` complex matrix in row-major order. `im` may be
/// null for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn bunching_permanent(
    re: *const f64,
    im: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BunchingStatus {
    guard(|| {
        let (out_re, out_im) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let p = permanent(&complex_matrix(re, im, n)?)?;
        (*out_re, *out_im) = (p.re, p.im);
        Ok(())
    })
}

/// Validates and wraps an `n × n` unitary given in row-major order, with
/// entry `(out, in)` the amplitude from input mode `in` to output mode `out`.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n * n` doubles; `result` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_unitary_new(
    re: *const f64,
    im: *const f64,
    n: usize,
    result: *mut *mut BunchingUnitary,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let u = ModeUnitary::new(complex_matrix(re, im, n)?)?;
        emit_handle(result, BunchingUnitary(u));
        Ok(())
    })
}

/// The balanced beam splitter `(1/√2)[[1, 1], [1, −1]]`.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_unitary_beam_splitter(result: *mut *mut BunchingUnitary) -> BunchingStatus {
    guard(|| {
        emit_handle(out(result, "result")?, BunchingUnitary(ModeUnitary::beam_splitter()));
        Ok(())
    })
}

/// # Safety
/// `u` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bunching_unitary_free(u: *mut BunchingUnitary) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Probability of scattering `input` into `output`; both have `modes` entries.
///
/// # Safety
/// `u` must be a live handle; `input` and `output` must point to `modes`
/// counts; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_transition_probability(
    u: *const BunchingUnitary,
    input: *const usize,
    output: *const usize,
    modes: usize,
    result: *mut f64,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let u = &borrow(u, "unitary")?.0;
        *result = transition_probability(u, &fock(input, modes, "input")?, &fock(output, modes, "output")?)?;
        Ok(())
    })
}

/// Full output distribution as a JSON array of `{"occupations", "p"}`.
///
/// # Safety
/// `u` must be a live handle; `input` must point to `modes` counts; `result`
/// must be writable. Free the string with [`bunching_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bunching_output_distribution_json(
    u: *const BunchingUnitary,
    input: *const usize,
    modes: usize,
    result: *mut *mut c_char,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let dist = output_distribution(&borrow(u, "unitary")?.0, &fock(input, modes, "input")?)?;
        let json = serde_json::to_string(&dist).map_err(|e| Failure(BunchingStatus::Internal, e.to_string()))?;
        emit_string(result, json)
    })
}

/// Expected fraction of the photons found in output `mode`.
///
/// # Safety
/// `u` must be a live handle; `input` must point to `modes` counts; `result`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_per_photon_marginal(
    u: *const BunchingUnitary,
    input: *const usize,
    modes: usize,
    mode: usize,
    result: *mut f64,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let dist = output_distribution(&borrow(u, "unitary")?.0, &fock(input, modes, "input")?)?;
        *result = per_photon_marginal(&dist, mode)?;
        Ok(())
    })
}

/// Per-photon marginal of `mode` for input `base` and for `added`.
///
/// # Safety
/// `u` must be a live handle; `base` and `added` must point to `modes`
/// counts; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_no_signalling(
    u: *const BunchingUnitary,
    base: *const usize,
    added: *const usize,
    modes: usize,
    mode: usize,
    result: *mut BunchingNoSignalling,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let r = no_signalling_report(&borrow(u, "unitary")?.0, &fock(base, modes, "base")?, &fock(added, modes, "added")?, mode)?;
        *result = BunchingNoSignalling {
            marginal_before: r.marginal_before,
            marginal_after: r.marginal_after,
            difference: r.difference,
        };
        Ok(())
    })
}

/// Outcomes (+1 or −1) of the λ-model in context `(first, second)`, labels
/// one-based.
///
/// # Safety
/// `lambdas` must point to `n` doubles; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_lambda_outcome(
    lambdas: *const f64,
    n: usize,
    first: usize,
    second: usize,
    out_first: *mut i8,
    out_second: *mut i8,
) -> BunchingStatus {
    guard(|| {
        let (out_first, out_second) = (out(out_first, "out_first")?, out(out_second, "out_second")?);
        let state = HiddenLambdaState::new(slice(lambdas, n, "lambdas")?.to_vec())?;
        let ctx = MeasurementContext::labeled(first, second)?;
        if ctx.first().max(ctx.second()) >= n {
            return Err(invalid(format!("context ({first}, {second}) exceeds {n} observables")));
        }
        let (a, b) = lambda_model_outcome(&state, &ctx)?;
        (*out_first, *out_second) = (a.value(), b.value());
        Ok(())
    })
}

/// Exact λ-model behavior. `contexts` holds `n_contexts` one-based label
/// pairs. `law_json` may be null for i.i.d. uniform λ.
///
/// # Safety
/// `contexts` must point to `2 * n_contexts` labels; `law_json` must be null
/// or NUL-terminated; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_lambda_exact(
    observables: usize,
    contexts: *const usize,
    n_contexts: usize,
    law_json: *const c_char,
    result: *mut *mut BunchingBehavior,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let b = lambda_exact_behavior(&scenario(observables, contexts, n_contexts)?, &law(law_json)?)?;
        emit_handle(result, BunchingBehavior(b));
        Ok(())
    })
}

/// Monte Carlo λ-model behavior from `samples` draws with `seed`.
///
/// # Safety
/// As for [`bunching_behavior_lambda_exact`].
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_lambda_sampled(
    observables: usize,
    contexts: *const usize,
    n_contexts: usize,
    law_json: *const c_char,
    samples: u64,
    seed: u64,
    result: *mut *mut BunchingBehavior,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let s = scenario(observables, contexts, n_contexts)?;
        let b = lambda_sample_behavior(&s, &law(law_json)?, samples, seed)?;
        emit_handle(result, BunchingBehavior(b));
        Ok(())
    })
}

/// Point-mass behavior of a deterministic assignment; `values` holds one
/// +1/−1 per observable.
///
/// # Safety
/// `contexts` must point to `2 * n_contexts` labels; `values` to
/// `observables` entries; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_deterministic(
    observables: usize,
    contexts: *const usize,
    n_contexts: usize,
    values: *const i8,
    result: *mut *mut BunchingBehavior,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let s = scenario(observables, contexts, n_contexts)?;
        let values = slice(values, observables, "values")?.iter().map(|&v| outcome(v)).collect::<FfiResult<Vec<_>>>()?;
        let b = deterministic_behavior(&DeterministicAssignment::new(values), &s)?;
        emit_handle(result, BunchingBehavior(b));
        Ok(())
    })
}

/// Parses and validates a behavior in the JSON scenario format.
///
/// # Safety
/// `json` must be NUL-terminated; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_from_json(json: *const c_char, result: *mut *mut BunchingBehavior) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let text = text(json, "json")?;
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure(BunchingStatus::Parse, e.to_string()))?;
        let b: Behavior = serde_json::from_value(raw).map_err(|e| invalid(e.to_string()))?;
        emit_handle(result, BunchingBehavior(b));
        Ok(())
    })
}

/// Serializes a behavior. Free the string with [`bunching_string_free`].
///
/// # Safety
/// `b` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_to_json(b: *const BunchingBehavior, result: *mut *mut c_char) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let json = serde_json::to_string(&borrow(b, "behavior")?.0).map_err(|e| Failure(BunchingStatus::Internal, e.to_string()))?;
        emit_string(result, json)
    })
}

/// # Safety
/// `b` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bunching_behavior_free(b: *mut BunchingBehavior) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// `E = P(++) + P(−−) − P(+−) − P(−+)` in context `(first, second)`.
///
/// # Safety
/// `b` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_correlator(
    b: *const BunchingBehavior,
    first: usize,
    second: usize,
    result: *mut f64,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = correlator(&borrow(b, "behavior")?.0, &MeasurementContext::labeled(first, second)?)?;
        Ok(())
    })
}

/// Correlator sum along the cycle on the behavior's observables.
///
/// # Safety
/// `b` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_cycle_value(b: *const BunchingBehavior, result: *mut f64) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let b = &borrow(b, "behavior")?.0;
        *result = cycle_value(b, &CycleScenario::new(b.scenario().observables())?)?;
        Ok(())
    })
}

/// # Safety
/// `b` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_no_disturbance_check(
    b: *const BunchingBehavior,
    tolerance: f64,
    result: *mut BunchingNoDisturbance,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let r = no_disturbance_check(&borrow(b, "behavior")?.0, tolerance);
        *result = BunchingNoDisturbance {
            pass: r.pass,
            worst_observable: r.worst_observable.unwrap_or(0),
            max_gap: r.max_gap,
        };
        Ok(())
    })
}

/// All six bounds of the correlator sum on the `n`-cycle.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_cycle_bounds(n: usize, result: *mut BunchingBounds) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let cycle = CycleScenario::new(n)?;
        let r = BoundsReport::compute(&cycle.scenario(), &cycle.correlator_sum())?;
        *result = BunchingBounds {
            classical_min: r.classical_min,
            classical_max: r.classical_max,
            nd_min: r.nd_min,
            nd_max: r.nd_max,
            arithmetic_min: r.arithmetic_min,
            arithmetic_max: r.arithmetic_max,
        };
        Ok(())
    })
}

/// Runs a scenario document and returns the JSON run report. `seed` may be
/// null to use the scenario's own seed.
///
/// # Safety
/// `json` must be NUL-terminated; `seed` null or readable; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_run_scenario_json(
    json: *const c_char,
    seed: *const u64,
    result: *mut *mut c_char,
) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let (file, raw) = ScenarioFile::parse(text(json, "json")?)?;
        let opts = RunOptions { seed: seed.as_ref().copied(), ..RunOptions::default() };
        emit_string(result, file.execute(raw, &opts)?.render(Format::Json)?)
    })
}

/// Consolidated reproduction report as JSON. `samples == 0` skips the Monte
/// Carlo rows.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bunching_reproduce_reply(samples: u64, seed: u64, result: *mut *mut c_char) -> BunchingStatus {
    guard(|| {
        let result = out(result, "result")?;
        let opts = ReproduceOptions { samples: (samples > 0).then_some(samples), seed, inject_fault: None };
        emit_string(result, reproduce_reply(&opts)?.render(Format::Json)?)
    })
}
