//! C interface to the bound calculators, empirical CDFs and the simulator.
//!
//! Every function returns a [`CdkwStatus`]. On failure the message is kept
//! per thread and can be copied out with [`cdkw_last_error`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use censor_dkw::censored::{
    bound_three_region, bound_two_region, bound_two_region_apriori, eta_three_region, eta_two_region, EtaSolution,
    MassSpec, RegionKind, RegionPartition,
};
use censor_dkw::classic::{dkw_bound, dkw_eta, gc_bound, hoeffding_bound, vc_bound, BoundValue};
use censor_dkw::multivariate::{bound_2d_three_region, bound_2d_two_region};
use censor_dkw::simulator::{run_stage1, Simulation, SimulationConfig, TraceDetail};
use censor_dkw::stats::EmpiricalCdf;
use censor_dkw::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdkwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The requested confidence cannot be reached for any `eta <= 1`.
    Unreachable = 3,
    /// The simulation has processed every arrival.
    Finished = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CdkwBound {
    pub raw: f64,
    pub probability: f64,
    pub trivial: bool,
}

impl From<BoundValue> for CdkwBound {
    fn from(b: BoundValue) -> Self {
        Self {
            raw: b.raw,
            probability: b.probability,
            trivial: b.trivial,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdkwRegion {
    Censored = 0,
    Explore = 1,
    Disclosed = 2,
}

/// One processed arrival. `label` is -1 when the label stayed hidden and
/// `coin` is NaN outside the exploration band.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdkwArrival {
    pub t: u64,
    pub score: f64,
    pub label: i32,
    pub admitted: bool,
    pub region: CdkwRegion,
    pub coin: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CdkwTally {
    pub censored: u64,
    pub explore: u64,
    pub disclosed: u64,
    pub explore_admitted: u64,
    pub admitted_label0: u64,
    pub admitted_label1: u64,
}

pub struct CdkwEcdf(EmpiricalCdf);

pub struct CdkwSimulation(Simulation);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: CdkwStatus, msg: impl Into<String>) -> CdkwStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> CdkwStatus {
    match e {
        Error::Io(_) => CdkwStatus::Internal,
        _ => CdkwStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<CdkwStatus, Error>>(f: F) -> CdkwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => fail(status_of(&e), e.to_string()),
        Err(_) => fail(CdkwStatus::Internal, "internal panic"),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> CdkwStatus {
    if out.is_null() {
        return fail(CdkwStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    CdkwStatus::Ok
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes. Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cdkw_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_dkw_bound(n: u64, eta: f64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| Ok(write_out(out, dkw_bound(n, eta)?.into())))
}

/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_dkw_eta(n: u64, delta: f64, out: *mut f64) -> CdkwStatus {
    guard(|| Ok(write_out(out, dkw_eta(n, delta)?)))
}

/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_gc_bound(n: u64, eta: f64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| Ok(write_out(out, gc_bound(n, eta)?.into())))
}

/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_vc_bound(n: u64, eta: f64, d: u32, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| Ok(write_out(out, vc_bound(n, eta, d)?.into())))
}

/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_hoeffding_bound(n: u64, eta: f64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| Ok(write_out(out, hoeffding_bound(n, eta)?.into())))
}

fn two_parts(n: u64, m: u64, k: u64, alpha: f64) -> Result<(RegionPartition, MassSpec), Error> {
    Ok((RegionPartition::two_region(n, m, k)?, MassSpec::theoretical(alpha, 0.0)?))
}

fn three_parts(n: u64, m: u64, l: u64, k1: u64, k2: u64, alpha: f64, beta: f64) -> Result<(RegionPartition, MassSpec), Error> {
    Ok((RegionPartition::new(n, m, l, k1, k2)?, MassSpec::theoretical(alpha, beta)?))
}

/// Threshold-only bound: `m` of `n` initial samples below the threshold,
/// `k` new samples above it, true mass `alpha` below it.
///
/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_two_region_bound(n: u64, m: u64, k: u64, alpha: f64, eta: f64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| {
        let (p, mass) = two_parts(n, m, k, alpha)?;
        Ok(write_out(out, bound_two_region(&p, &mass, eta)?.into()))
    })
}

/// Threshold-only bound averaged over the number of disclosed samples
/// among `wait` future arrivals.
///
/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_apriori_bound(n: u64, m: u64, alpha: f64, eta: f64, wait: u64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| {
        let (p, mass) = two_parts(n, m, 0, alpha)?;
        Ok(write_out(out, bound_two_region_apriori(&p, &mass, eta, wait)?.into()))
    })
}

/// Bound with an exploration band: `l` initial samples below its lower edge,
/// `k1` admitted in the band with probability `epsilon`, `k2` above the
/// threshold; `beta` is the true mass below the band.
///
/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_three_region_bound(
    n: u64,
    m: u64,
    l: u64,
    k1: u64,
    k2: u64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    eta: f64,
    out: *mut CdkwBound,
) -> CdkwStatus {
    guard(|| {
        let (p, mass) = three_parts(n, m, l, k1, k2, alpha, beta)?;
        Ok(write_out(out, bound_three_region(&p, &mass, epsilon, eta)?.into()))
    })
}

/// Two-dimensional counterpart of [`cdkw_two_region_bound`] for a linear boundary.
///
/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_two_region_bound_2d(n: u64, m: u64, k: u64, alpha: f64, eta: f64, out: *mut CdkwBound) -> CdkwStatus {
    guard(|| {
        let (p, mass) = two_parts(n, m, k, alpha)?;
        Ok(write_out(out, bound_2d_two_region(&p, &mass, eta)?.into()))
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one `CdkwBound`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_three_region_bound_2d(
    n: u64,
    m: u64,
    l: u64,
    k1: u64,
    k2: u64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    eta: f64,
    out: *mut CdkwBound,
) -> CdkwStatus {
    guard(|| {
        let (p, mass) = three_parts(n, m, l, k1, k2, alpha, beta)?;
        Ok(write_out(out, bound_2d_three_region(&p, &mass, epsilon, eta)?.into()))
    })
}

unsafe fn write_eta(sol: EtaSolution, out: *mut f64) -> CdkwStatus {
    match sol {
        EtaSolution::Reached { eta } => write_out(out, eta),
        EtaSolution::Unreachable { floor } => fail(
            CdkwStatus::Unreachable,
            format!("bound stays at {floor} even at eta = 1"),
        ),
    }
}

/// Smallest `eta` whose threshold-only bound is at most `delta`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_two_region_eta(n: u64, m: u64, k: u64, alpha: f64, delta: f64, out: *mut f64) -> CdkwStatus {
    guard(|| {
        let (p, mass) = two_parts(n, m, k, alpha)?;
        Ok(write_eta(eta_two_region(&p, &mass, delta)?, out))
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn cdkw_three_region_eta(
    n: u64,
    m: u64,
    l: u64,
    k1: u64,
    k2: u64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    delta: f64,
    out: *mut f64,
) -> CdkwStatus {
    guard(|| {
        let (p, mass) = three_parts(n, m, l, k1, k2, alpha, beta)?;
        Ok(write_eta(eta_three_region(&p, &mass, epsilon, delta)?, out))
    })
}

/// Builds an empirical CDF from `len` scores (copied).
///
/// # Safety
/// `scores` must be valid for `len` reads; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_ecdf_new(scores: *const f64, len: usize, out: *mut *mut CdkwEcdf) -> CdkwStatus {
    if scores.is_null() && len > 0 {
        return fail(CdkwStatus::NullPointer, "scores pointer is null");
    }
    guard(|| {
        let data = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(scores, len).to_vec() };
        let ecdf = EmpiricalCdf::new(data)?;
        Ok(write_out(out, Box::into_raw(Box::new(CdkwEcdf(ecdf)))))
    })
}

/// # Safety
/// `ecdf` must be a live handle from [`cdkw_ecdf_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_ecdf_eval(ecdf: *const CdkwEcdf, x: f64, out: *mut f64) -> CdkwStatus {
    let Some(e) = ecdf.as_ref() else {
        return fail(CdkwStatus::NullPointer, "ecdf handle is null");
    };
    write_out(out, e.0.eval(x))
}

/// # Safety
/// `ecdf` must be a live handle from [`cdkw_ecdf_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_ecdf_len(ecdf: *const CdkwEcdf, out: *mut usize) -> CdkwStatus {
    let Some(e) = ecdf.as_ref() else {
        return fail(CdkwStatus::NullPointer, "ecdf handle is null");
    };
    write_out(out, e.0.len())
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `ecdf` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cdkw_ecdf_free(ecdf: *mut CdkwEcdf) {
    if !ecdf.is_null() {
        drop(Box::from_raw(ecdf));
    }
}

/// Draws the initial sample of a JSON simulation config and prepares the
/// arrivals. Per-arrival records are not retained.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_new(config_json: *const c_char, out: *mut *mut CdkwSimulation) -> CdkwStatus {
    if config_json.is_null() {
        return fail(CdkwStatus::NullPointer, "config pointer is null");
    }
    let Ok(text) = CStr::from_ptr(config_json).to_str() else {
        return fail(CdkwStatus::InvalidArgument, "config is not UTF-8");
    };
    guard(|| {
        let config: SimulationConfig = serde_json::from_str(text)?;
        let stage1 = run_stage1(&config)?;
        let sim = Simulation::new(&config, stage1, TraceDetail::Summary)?;
        Ok(write_out(out, Box::into_raw(Box::new(CdkwSimulation(sim)))))
    })
}

/// Processes one arrival. Returns `Finished` once the horizon is reached.
///
/// # Safety
/// `sim` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_step(sim: *mut CdkwSimulation, out: *mut CdkwArrival) -> CdkwStatus {
    let Some(s) = sim.as_mut() else {
        return fail(CdkwStatus::NullPointer, "simulation handle is null");
    };
    let Some(r) = s.0.step() else {
        return CdkwStatus::Finished;
    };
    let record = CdkwArrival {
        t: r.t,
        score: r.score,
        label: r.label.map_or(-1, |l| l.index() as i32),
        admitted: r.admitted,
        region: match r.region {
            RegionKind::Censored => CdkwRegion::Censored,
            RegionKind::Explore => CdkwRegion::Explore,
            RegionKind::Disclosed => CdkwRegion::Disclosed,
        },
        coin: r.coin.unwrap_or(f64::NAN),
    };
    if out.is_null() {
        return CdkwStatus::Ok;
    }
    write_out(out, record)
}

/// Current threshold.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_theta(sim: *const CdkwSimulation, out: *mut f64) -> CdkwStatus {
    let Some(s) = sim.as_ref() else {
        return fail(CdkwStatus::NullPointer, "simulation handle is null");
    };
    write_out(out, s.0.theta())
}

/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_tally(sim: *const CdkwSimulation, out: *mut CdkwTally) -> CdkwStatus {
    let Some(s) = sim.as_ref() else {
        return fail(CdkwStatus::NullPointer, "simulation handle is null");
    };
    let t = s.0.tally();
    write_out(
        out,
        CdkwTally {
            censored: t.censored,
            explore: t.explore,
            disclosed: t.disclosed,
            explore_admitted: t.explore_admitted,
            admitted_label0: t.k1[0] + t.k2[0],
            admitted_label1: t.k1[1] + t.k2[1],
        },
    )
}

/// Serializes the trace so far as JSON into `buf` (NUL-terminated). `needed`
/// receives the length including the NUL; when `len` is too small nothing
/// is written and `BufferTooSmall` is returned.
///
/// # Safety
/// `sim` must be a live handle; `buf` must be null or valid for `len` bytes;
/// `needed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_trace_json(
    sim: *const CdkwSimulation,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> CdkwStatus {
    let Some(s) = sim.as_ref() else {
        return fail(CdkwStatus::NullPointer, "simulation handle is null");
    };
    guard(|| {
        let json = serde_json::to_string(&s.0.snapshot())?;
        let total = json.len() + 1;
        if !needed.is_null() {
            needed.write(total);
        }
        if buf.is_null() || len < total {
            return Ok(fail(CdkwStatus::BufferTooSmall, format!("trace needs {total} bytes")));
        }
        ptr::copy_nonoverlapping(json.as_ptr().cast::<c_char>(), buf, json.len());
        *buf.add(json.len()) = 0;
        Ok(CdkwStatus::Ok)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cdkw_simulation_free(sim: *mut CdkwSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
