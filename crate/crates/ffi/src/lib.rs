//! C ABI over the `qalu` analysis pipeline.
//!
//! Every fallible entry point returns a [`QaluStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`qalu_last_error_message`]. Handles are created by the library
//! and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use qalu::pauli::depolarizing_noise;
use qalu::purify::Purifier;
use qalu::resource::{expected_cost_of, CostModel, RestartPolicy};
use qalu::threshold::{check_ft, q_values, threshold_pg, PmRule, QTuple, ThresholdConditions};
use qalu::ttg::{ttg_table, TtgType};
use qalu::{ChannelParams, Error, FidelityVector, NoiseConvention, NoiseParams, PumpResult, PumpSchedule};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaluStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    SuccessUnderflow = 3,
    NonMonotone = 4,
    Discrepancy = 5,
    Panic = 6,
}

/// Measurement error rule for threshold searches.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaluPmRule {
    Equal = 0,
    FourFifteenths = 1,
}

/// TTG variant.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaluTtgType {
    I = 0,
    II = 1,
    III = 2,
}

/// Topological error-model probabilities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QaluQTuple {
    pub qa: f64,
    pub qb: f64,
    pub qc: f64,
    pub qab: f64,
    pub qac: f64,
    pub qbb: f64,
}

impl From<QTuple> for QaluQTuple {
    fn from(q: QTuple) -> Self {
        QaluQTuple {
            qa: q.qa,
            qb: q.qb,
            qc: q.qc,
            qab: q.qab,
            qac: q.qac,
            qbb: q.qbb,
        }
    }
}

impl From<QaluQTuple> for QTuple {
    fn from(q: QaluQTuple) -> Self {
        QTuple {
            qa: q.qa,
            qb: q.qb,
            qc: q.qc,
            qab: q.qab,
            qac: q.qac,
            qbb: q.qbb,
        }
    }
}

/// Opaque local-noise model.
pub struct QaluNoise {
    inner: NoiseParams,
}

/// Opaque pumping result.
pub struct QaluPumpResult {
    inner: PumpResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QaluStatus {
    match e {
        Error::InvalidParameter { .. } => QaluStatus::InvalidArgument,
        Error::SuccessUnderflow { .. } => QaluStatus::SuccessUnderflow,
        Error::NonMonotone { .. } => QaluStatus::NonMonotone,
        Error::Discrepancy { .. } => QaluStatus::Discrepancy,
    }
}

enum Failure {
    Null(&'static str),
    Qalu(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Qalu(e)
    }
}

fn guard<F>(f: F) -> QaluStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QaluStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            QaluStatus::NullPointer
        }
        Ok(Err(Failure::Qalu(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QaluStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees `p` is null or valid for writes.
    unsafe { p.as_mut() }.ok_or(Failure::Null(name))
}

unsafe fn vector(p: *const f64, name: &'static str) -> Result<FidelityVector, Failure> {
    let raw = unsafe { arg(p as *const [f64; 4], name)? };
    Ok(FidelityVector::new(*raw)?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qalu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qalu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Uniform depolarizing gate noise with total error `p_g` and measurement error `p_m`.
///
/// # Safety
/// `out_noise` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_noise_uniform(p_g: f64, p_m: f64, out_noise: *mut *mut QaluNoise) -> QaluStatus {
    guard(|| {
        let slot = unsafe { out(out_noise, "out_noise")? };
        let inner = depolarizing_noise(p_g, p_m, NoiseConvention::Uniform)?;
        *slot = Box::into_raw(Box::new(QaluNoise { inner }));
        Ok(())
    })
}

/// Noise from an explicit row-major 4x4 gate table summing to one.
///
/// # Safety
/// `table` must point to 16 doubles; `out_noise` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_noise_from_table(
    table: *const f64,
    p_m: f64,
    out_noise: *mut *mut QaluNoise,
) -> QaluStatus {
    guard(|| {
        let flat = unsafe { arg(table as *const [f64; 16], "table")? };
        let slot = unsafe { out(out_noise, "out_noise")? };
        let t: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| flat[4 * i + j]));
        let inner = NoiseParams::from_table(t, p_m)?;
        *slot = Box::into_raw(Box::new(QaluNoise { inner }));
        Ok(())
    })
}

/// # Safety
/// `noise` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qalu_noise_free(noise: *mut QaluNoise) {
    if !noise.is_null() {
        drop(unsafe { Box::from_raw(noise) });
    }
}

fn pump(fidelity: f64, schedule: PumpSchedule, noise: &QaluNoise) -> Result<QaluPumpResult, Failure> {
    let channel = ChannelParams::new(fidelity)?;
    let inner = Purifier::new(&noise.inner).pump(&channel, schedule)?;
    Ok(QaluPumpResult { inner })
}

/// Double-selection pumping of a Werner channel of fidelity `fidelity`.
///
/// # Safety
/// `noise` must be a live handle; `out_result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_pump_double(
    fidelity: f64,
    n1: u32,
    m1: u32,
    m2: u32,
    noise: *const QaluNoise,
    out_result: *mut *mut QaluPumpResult,
) -> QaluStatus {
    guard(|| {
        let noise = unsafe { arg(noise, "noise")? };
        let slot = unsafe { out(out_result, "out_result")? };
        *slot = Box::into_raw(Box::new(pump(fidelity, PumpSchedule::double(n1, m1, m2), noise)?));
        Ok(())
    })
}

/// Single-selection pumping.
///
/// # Safety
/// As for [`qalu_pump_double`].
#[no_mangle]
pub unsafe extern "C" fn qalu_pump_single(
    fidelity: f64,
    n1: u32,
    n2: u32,
    noise: *const QaluNoise,
    out_result: *mut *mut QaluPumpResult,
) -> QaluStatus {
    guard(|| {
        let noise = unsafe { arg(noise, "noise")? };
        let slot = unsafe { out(out_result, "out_result")? };
        *slot = Box::into_raw(Box::new(pump(fidelity, PumpSchedule::single(n1, n2), noise)?));
        Ok(())
    })
}

/// Writes the purified pair's `(F0, F1, F2, F3)`.
///
/// # Safety
/// `result` must be a live handle; `out_f` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qalu_pump_result_fidelity(result: *const QaluPumpResult, out_f: *mut f64) -> QaluStatus {
    guard(|| {
        let r = unsafe { arg(result, "result")? };
        let slot = unsafe { out(out_f as *mut [f64; 4], "out_f")? };
        *slot = r.inner.f_out.as_array();
        Ok(())
    })
}

/// Writes the per-level success probabilities (2 for single, 3 for double
/// pumping) into `out_p` of capacity `len`, and their count into `out_len`.
///
/// # Safety
/// `out_p` must point to `len` writable doubles; `out_len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_pump_result_success(
    result: *const QaluPumpResult,
    out_p: *mut f64,
    len: usize,
    out_len: *mut usize,
) -> QaluStatus {
    guard(|| {
        let r = unsafe { arg(result, "result")? };
        let n = unsafe { out(out_len, "out_len")? };
        let probs = r.inner.success_probs.to_vec();
        *n = probs.len();
        if len < probs.len() {
            return Err(Error::InvalidParameter {
                field: "len".into(),
                reason: format!("buffer holds {len}, need {}", probs.len()),
            }
            .into());
        }
        if out_p.is_null() {
            return Err(Failure::Null("out_p"));
        }
        // SAFETY: `out_p` holds at least `len >= probs.len()` doubles.
        unsafe { ptr::copy_nonoverlapping(probs.as_ptr(), out_p, probs.len()) };
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qalu_pump_result_free(result: *mut QaluPumpResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// First-order TTG error table, row-major, rows on the syndrome qubit.
///
/// # Safety
/// `f_bar` must point to 4 doubles, `out_table` to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qalu_ttg_table(
    kind: QaluTtgType,
    f_bar: *const f64,
    noise: *const QaluNoise,
    out_table: *mut f64,
) -> QaluStatus {
    guard(|| {
        let f = unsafe { vector(f_bar, "f_bar")? };
        let noise = unsafe { arg(noise, "noise")? };
        let slot = unsafe { out(out_table as *mut [f64; 16], "out_table")? };
        let kind = match kind {
            QaluTtgType::I => TtgType::I,
            QaluTtgType::II => TtgType::II,
            QaluTtgType::III => TtgType::III,
        };
        let t = ttg_table(kind, &f, &noise.inner).to_vec();
        slot.copy_from_slice(&t);
        Ok(())
    })
}

/// Error model for a purified pair `f_bar` under uniform noise.
///
/// # Safety
/// `f_bar` must point to 4 doubles; `out_q` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_q_values(f_bar: *const f64, p_g: f64, p_m: f64, out_q: *mut QaluQTuple) -> QaluStatus {
    guard(|| {
        let f = unsafe { vector(f_bar, "f_bar")? };
        let slot = unsafe { out(out_q, "out_q")? };
        *slot = q_values(&f, p_g, p_m).into();
        Ok(())
    })
}

/// Fault-tolerance check with bounds scaled by `margin` in (0, 1].
///
/// # Safety
/// `q` must be valid for reads; `out_pass` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_check_ft(q: *const QaluQTuple, margin: f64, out_pass: *mut bool) -> QaluStatus {
    guard(|| {
        let q = unsafe { arg(q, "q")? };
        let slot = unsafe { out(out_pass, "out_pass")? };
        let cond = ThresholdConditions::with_margin(margin)?;
        *slot = check_ft(&(*q).into(), &cond);
        Ok(())
    })
}

/// Threshold gate error at channel fidelity `fidelity` for the schedule given by
/// `counts[0..n_counts]` (2 counts: single, 3: double pumping).
///
/// # Safety
/// `counts` must point to `n_counts` values; `out_pg` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_threshold_pg(
    fidelity: f64,
    counts: *const u32,
    n_counts: usize,
    rule: QaluPmRule,
    margin: f64,
    out_pg: *mut f64,
) -> QaluStatus {
    guard(|| {
        if counts.is_null() {
            return Err(Failure::Null("counts"));
        }
        // SAFETY: `counts` holds `n_counts` values per the contract.
        let counts = unsafe { std::slice::from_raw_parts(counts, n_counts) };
        let slot = unsafe { out(out_pg, "out_pg")? };
        let schedule = PumpSchedule::from_counts(counts)?;
        let rule = match rule {
            QaluPmRule::Equal => PmRule::Equal,
            QaluPmRule::FourFifteenths => PmRule::FourFifteenths,
        };
        *slot = threshold_pg(fidelity, schedule, rule, &ThresholdConditions::with_margin(margin)?)?;
        Ok(())
    })
}

/// Expected cost per TTG for a pumped result. `count_local_ops` adds gates and
/// measurements to the base-pair count; `per_level` restarts only failed levels.
///
/// # Safety
/// `result` must be a live handle; `out_k` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qalu_expected_cost(
    result: *const QaluPumpResult,
    count_local_ops: bool,
    per_level: bool,
    out_k: *mut f64,
) -> QaluStatus {
    guard(|| {
        let r = unsafe { arg(result, "result")? };
        let slot = unsafe { out(out_k, "out_k")? };
        let model = CostModel {
            count_local_ops,
            policy: if per_level { RestartPolicy::PerLevel } else { RestartPolicy::AllOrNothing },
            ..CostModel::default()
        };
        *slot = expected_cost_of(&r.inner, &model)?;
        Ok(())
    })
}
