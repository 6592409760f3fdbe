//! C ABI over the simulator: opaque trace handles, value-type summaries,
//! and status codes. Every function is panic-safe; failures map onto
//! [`MloStatus`] and never unwind across the boundary.
//!
//! The generated header lives at `include/mlo_sim.h`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mlo_sim::bonding::BondedLink;
use mlo_sim::engine::{run, TimingConfig};
use mlo_sim::metrics::summarize;
use mlo_sim::model::{th_closed_form, IidParams};
use mlo_sim::policies::PolicyId;
use mlo_sim::trace::{gen_iid_trace, gen_onoff_trace, load_binary_traces, BinaryTrace};
use mlo_sim::traffic::{poisson_arrivals, saturated_arrivals};
use mlo_sim::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MloStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Unsupported = 5,
    Internal = 6,
}

/// Channel-access policy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MloPolicy {
    Slo = 0,
    Str = 1,
    Nstr = 2,
    StrPlus = 3,
}

impl From<MloPolicy> for PolicyId {
    fn from(p: MloPolicy) -> PolicyId {
        match p {
            MloPolicy::Slo => PolicyId::Slo,
            MloPolicy::Str => PolicyId::MloStr,
            MloPolicy::Nstr => PolicyId::MloNstr,
            MloPolicy::StrPlus => PolicyId::MloStrPlus,
        }
    }
}

/// Opaque busy/idle trace handle; create with `mlo_trace_*`, release with
/// `mlo_trace_free`.
pub struct MloTrace {
    inner: BinaryTrace,
}

/// Aggregates of one run. Delay statistics are NaN when nothing was
/// delivered.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MloSummary {
    pub throughput_bps: f64,
    pub mean_delay_us: f64,
    pub p95_delay_us: f64,
    pub jitter_us: f64,
    pub mean_queueing_us: f64,
    pub p95_queueing_us: f64,
    pub mean_access_us: f64,
    pub p95_access_us: f64,
    pub delivered_fraction: f64,
    pub arrivals: u64,
    pub delivered: u64,
    /// 1 when at least 95% of arrivals were delivered.
    pub stable: u8,
}

fn status_of(err: &Error) -> MloStatus {
    match err {
        Error::Format { .. } | Error::Parse { .. } => MloStatus::Parse,
        Error::Config(_) | Error::Domain(_) => MloStatus::InvalidArgument,
        Error::Unsupported(_) => MloStatus::Unsupported,
        Error::Internal(_) => MloStatus::Internal,
        Error::Io(_) => MloStatus::Io,
    }
}

fn guarded(body: impl FnOnce() -> MloStatus) -> MloStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(MloStatus::Internal)
}

fn trace_out(result: Result<BinaryTrace, Error>, out: *mut *mut MloTrace) -> MloStatus {
    match result {
        Ok(inner) => {
            let handle = Box::new(MloTrace { inner });
            unsafe { *out = Box::into_raw(handle) };
            MloStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mlo_status_str(status: MloStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        MloStatus::Ok => b"ok\0",
        MloStatus::NullArgument => b"null argument\0",
        MloStatus::InvalidArgument => b"invalid argument\0",
        MloStatus::Io => b"I/O error\0",
        MloStatus::Parse => b"parse error\0",
        MloStatus::Unsupported => b"unsupported mode\0",
        MloStatus::Internal => b"internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Synthesizes a trace with independent per-slot busy probability.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mlo_trace_iid(
    occupancy: f64,
    slots: usize,
    seed: u64,
    out: *mut *mut MloTrace,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    guarded(|| trace_out(gen_iid_trace(occupancy, slots, seed), out))
}

/// Synthesizes a bursty on/off trace with geometric sojourns.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mlo_trace_onoff(
    occupancy: f64,
    mean_busy_slots: f64,
    slots: usize,
    seed: u64,
    out: *mut *mut MloTrace,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    guarded(|| trace_out(gen_onoff_trace(occupancy, mean_busy_slots, slots, seed), out))
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static Path, MloStatus> {
    if ptr.is_null() {
        return Err(MloStatus::NullArgument);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(Path::new)
        .map_err(|_| MloStatus::InvalidArgument)
}

/// Number of samples in a native trace file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlo_trace_sample_count(
    path: *const c_char,
    threshold_dbm: f64,
    out: *mut usize,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guarded(|| match load_binary_traces(path, threshold_dbm) {
        Ok(traces) => {
            *out = traces.len();
            MloStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Loads the `index`-th sample of a native trace file, binarized at the
/// given threshold.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlo_trace_load(
    path: *const c_char,
    threshold_dbm: f64,
    index: usize,
    out: *mut *mut MloTrace,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guarded(|| match load_binary_traces(path, threshold_dbm) {
        Ok(mut traces) => {
            if index >= traces.len() {
                return MloStatus::InvalidArgument;
            }
            trace_out(Ok(traces.swap_remove(index)), out)
        }
        Err(e) => status_of(&e),
    })
}

/// Busy fraction of a trace; NaN for a null handle.
#[no_mangle]
pub extern "C" fn mlo_trace_occupancy(trace: *const MloTrace) -> f64 {
    if trace.is_null() {
        return f64::NAN;
    }
    unsafe { (*trace).inner.occupancy() }
}

/// Releases a trace handle. Null is a no-op.
///
/// # Safety
/// `trace` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn mlo_trace_free(trace: *mut MloTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

fn to_summary(records: &[mlo_sim::PacketRecord], horizon_us: u64) -> MloSummary {
    let s = summarize(records, horizon_us);
    let f = |v: Option<f64>| v.unwrap_or(f64::NAN);
    let u = |v: Option<u64>| v.map(|x| x as f64).unwrap_or(f64::NAN);
    MloSummary {
        throughput_bps: s.throughput_bps,
        mean_delay_us: f(s.mean_delay_us),
        p95_delay_us: u(s.p95_delay_us),
        jitter_us: f(s.jitter_us),
        mean_queueing_us: f(s.mean_queueing_us),
        p95_queueing_us: u(s.p95_queueing_us),
        mean_access_us: f(s.mean_access_us),
        p95_access_us: u(s.p95_access_us),
        delivered_fraction: s.delivered_fraction,
        arrivals: records.len() as u64,
        delivered: records.iter().filter(|r| r.delivered()).count() as u64,
        stable: s.stable as u8,
    }
}

unsafe fn links_from(
    primary: *const MloTrace,
    secondary: *const MloTrace,
) -> Result<Vec<BondedLink>, MloStatus> {
    if primary.is_null() {
        return Err(MloStatus::NullArgument);
    }
    let mut links = vec![BondedLink::single((*primary).inner.clone())];
    if !secondary.is_null() {
        links.push(BondedLink::single((*secondary).inner.clone()));
    }
    Ok(links)
}

/// Runs one seeded experiment with Poisson traffic at `rate_bps` and default
/// MAC timing. `secondary` may be null for single-link operation.
///
/// # Safety
/// Trace handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlo_run_poisson(
    policy: MloPolicy,
    primary: *const MloTrace,
    secondary: *const MloTrace,
    rate_bps: f64,
    horizon_us: u64,
    seed: u64,
    out: *mut MloSummary,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    let links = match links_from(primary, secondary) {
        Ok(l) => l,
        Err(s) => return s,
    };
    guarded(|| {
        let timing = TimingConfig::default();
        let arrivals = match poisson_arrivals(rate_bps, timing.packet_bits, horizon_us, seed) {
            Ok(a) => a,
            Err(e) => return status_of(&e),
        };
        match run(policy.into(), &links, &arrivals, &timing, seed, horizon_us) {
            Ok(records) => {
                *out = to_summary(&records, horizon_us);
                MloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs one seeded experiment with a fully backlogged queue (saturation).
///
/// # Safety
/// Trace handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlo_run_saturated(
    policy: MloPolicy,
    primary: *const MloTrace,
    secondary: *const MloTrace,
    horizon_us: u64,
    seed: u64,
    out: *mut MloSummary,
) -> MloStatus {
    if out.is_null() {
        return MloStatus::NullArgument;
    }
    let links = match links_from(primary, secondary) {
        Ok(l) => l,
        Err(s) => return s,
    };
    guarded(|| {
        let timing = TimingConfig::default();
        let channels: usize = links.iter().map(|l| l.channels().len()).sum();
        let arrivals = saturated_arrivals(&timing, horizon_us, channels);
        match run(policy.into(), &links, &arrivals, &timing, seed, horizon_us) {
            Ok(records) => {
                *out = to_summary(&records, horizon_us);
                MloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Closed-form mean throughput under iid channel activity, in bits/s.
/// Returns Unsupported for the deferred-decision policy.
///
/// # Safety
/// `out_bps` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlo_model_throughput(
    policy: MloPolicy,
    rho1: f64,
    rho2: f64,
    out_bps: *mut f64,
) -> MloStatus {
    if out_bps.is_null() {
        return MloStatus::NullArgument;
    }
    guarded(|| {
        let params = match IidParams::new(rho1, rho2) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match th_closed_form(policy.into(), &params) {
            Ok(v) => {
                *out_bps = v;
                MloStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
