//! C interface to the nested SBM library.
//!
//! Collections and posterior samples are opaque handles created by this
//! library and released with the matching `*_free` function. Every fallible
//! call returns an [`NsbmStatus`]; on failure, [`nsbm_last_error`] describes
//! the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nsbm::io::read_networks_file;
use nsbm::metrics::{nmi, summarize_samples, Level};
use nsbm::model::{Hyper, NetworkCollection, PosteriorSamples};
use nsbm::numerics::stream_rng;
use nsbm::samplers::{run_chain, ChainOptions, InitMode, SamplerKind, DPSBM_ITERATIONS};
use nsbm::simgen::{gen_collection, SimConfig};
use nsbm::NsbmError;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsbmSampler {
    Gibbs = 0,
    Collapsed = 1,
    Blocked = 2,
    IncompatibleBlocked = 3,
}

/// Sampler settings. Zero `classes` means min(J, 20); zero `communities` means 20.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NsbmFitOptions {
    pub sampler: NsbmSampler,
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub classes: usize,
    pub communities: usize,
    pub alpha: f64,
    pub beta: f64,
    pub w0: f64,
    pub pi0: f64,
    pub random_init: bool,
}

/// Opaque network collection.
pub struct NsbmCollection {
    inner: NetworkCollection,
}

/// Opaque posterior draws.
pub struct NsbmSamples {
    inner: PosteriorSamples,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &NsbmError) -> NsbmStatus {
    match e {
        NsbmError::Io(_) => NsbmStatus::Io,
        NsbmError::Parse(_) | NsbmError::Json(_) | NsbmError::Csv(_) => NsbmStatus::Parse,
        _ => NsbmStatus::InvalidArgument,
    }
}

fn fail(status: NsbmStatus, message: impl Into<String>) -> NsbmStatus {
    set_error(message.into());
    status
}

// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (NsbmStatus, String)>) -> NsbmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsbmStatus::Ok,
        Ok(Err((status, message))) => fail(status, message),
        Err(_) => fail(NsbmStatus::Internal, "panic inside nsbm"),
    }
}

fn lib_err(e: NsbmError) -> (NsbmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NsbmStatus, String) {
    (NsbmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (NsbmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (NsbmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn copy_out(labels: &[usize], buf: *mut usize, len: usize) -> Result<(), (NsbmStatus, String)> {
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    if len < labels.len() {
        return Err((
            NsbmStatus::BufferTooSmall,
            format!("buffer holds {len} labels, {} needed", labels.len()),
        ));
    }
    ptr::copy_nonoverlapping(labels.as_ptr(), buf, labels.len());
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nsbm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn nsbm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Defaults: collapsed Gibbs, 1000 iterations, burn-in 500, thinning 5,
/// flat priors, warm start.
#[no_mangle]
pub extern "C" fn nsbm_fit_options_default() -> NsbmFitOptions {
    let chain = ChainOptions::default();
    NsbmFitOptions {
        sampler: NsbmSampler::Collapsed,
        iterations: chain.iterations,
        burnin: chain.burnin,
        thin: chain.thin,
        seed: 0,
        classes: 0,
        communities: 0,
        alpha: 1.0,
        beta: 1.0,
        w0: 1.0,
        pi0: 1.0,
        random_init: false,
    }
}

/// Loads an NDJSON network file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nsbm_collection_load(path: *const c_char, out: *mut *mut NsbmCollection) -> NsbmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = c_str(path, "path")?;
        let inner = read_networks_file(Path::new(path)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NsbmCollection { inner }));
        Ok(())
    })
}

/// Generates a collection from a JSON generator config.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nsbm_collection_simulate(
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut NsbmCollection,
) -> NsbmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SimConfig::from_json(c_str(config_json, "config")?).map_err(lib_err)?;
        let sim = gen_collection(&cfg, &mut stream_rng(seed, 0)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NsbmCollection { inner: sim.collection }));
        Ok(())
    })
}

/// Number of networks.
///
/// # Safety
/// `c` must be a live collection handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nsbm_collection_len(c: *const NsbmCollection, out: *mut usize) -> NsbmStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("collection"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = c.inner.len();
        Ok(())
    })
}

/// Node count of network `j`.
///
/// # Safety
/// `c` must be a live collection handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nsbm_collection_nodes(c: *const NsbmCollection, j: usize, out: *mut usize) -> NsbmStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("collection"))?;
        let net = c
            .inner
            .networks()
            .get(j)
            .ok_or_else(|| (NsbmStatus::InvalidArgument, format!("network {j} out of range")))?;
        *out.as_mut().ok_or_else(|| null("out"))? = net.n();
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nsbm_collection_free(c: *mut NsbmCollection) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Runs one chain on `c`.
///
/// # Safety
/// `c` must be a live collection handle, `opts` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsbm_fit(
    c: *const NsbmCollection,
    opts: *const NsbmFitOptions,
    out: *mut *mut NsbmSamples,
) -> NsbmStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("collection"))?;
        let o = opts.as_ref().ok_or_else(|| null("options"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let defaults = Hyper::defaults_for(c.inner.len());
        let hyper = Hyper {
            alpha: o.alpha,
            beta: o.beta,
            w0: o.w0,
            pi0: o.pi0,
            classes: if o.classes == 0 { defaults.classes } else { o.classes },
            communities: if o.communities == 0 { defaults.communities } else { o.communities },
        };
        let kind = match o.sampler {
            NsbmSampler::Gibbs => SamplerKind::Gibbs,
            NsbmSampler::Collapsed => SamplerKind::Collapsed,
            NsbmSampler::Blocked => SamplerKind::Blocked,
            NsbmSampler::IncompatibleBlocked => SamplerKind::IncompatibleBlocked,
        };
        let chain = ChainOptions {
            iterations: o.iterations,
            burnin: o.burnin,
            thin: o.thin,
            seed: o.seed,
            init: if o.random_init { InitMode::Random } else { InitMode::Warm },
            init_iterations: DPSBM_ITERATIONS,
            record_timing: false,
        };
        let inner = run_chain(kind, &c.inner, &hyper, &chain).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NsbmSamples { inner }));
        Ok(())
    })
}

/// Number of retained draws.
///
/// # Safety
/// `s` must be a live samples handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nsbm_samples_len(s: *const NsbmSamples, out: *mut usize) -> NsbmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("samples"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.inner.draws.len();
        Ok(())
    })
}

/// Copies the class labels of draw `d` into `buf` (capacity `len`).
///
/// # Safety
/// `s` must be a live samples handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nsbm_samples_draw_z(s: *const NsbmSamples, d: usize, buf: *mut usize, len: usize) -> NsbmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("samples"))?;
        let draw = s
            .inner
            .draws
            .get(d)
            .ok_or_else(|| (NsbmStatus::InvalidArgument, format!("draw {d} out of range")))?;
        copy_out(&draw.z, buf, len)
    })
}

/// Copies the minimum-VI class partition into `buf` (capacity `len`).
///
/// # Safety
/// `s` must be a live samples handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nsbm_samples_summarize_z(s: *const NsbmSamples, buf: *mut usize, len: usize) -> NsbmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("samples"))?;
        let z = summarize_samples(&s.inner, Level::Z).map_err(lib_err)?;
        copy_out(&z, buf, len)
    })
}

/// Copies the minimum-VI community partition of network `j` into `buf`.
///
/// # Safety
/// `s` must be a live samples handle and `buf` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nsbm_samples_summarize_xi(
    s: *const NsbmSamples,
    j: usize,
    buf: *mut usize,
    len: usize,
) -> NsbmStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("samples"))?;
        let xi = summarize_samples(&s.inner, Level::Xi(j)).map_err(lib_err)?;
        copy_out(&xi, buf, len)
    })
}

/// # Safety
/// `s` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nsbm_samples_free(s: *mut NsbmSamples) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Normalized mutual information of two partitions of length `len`.
///
/// # Safety
/// `a` and `b` must be readable for `len` elements and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsbm_nmi(a: *const usize, b: *const usize, len: usize, out: *mut f64) -> NsbmStatus {
    guard(|| {
        if a.is_null() || b.is_null() {
            return Err(null("partition"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (a, b) = (std::slice::from_raw_parts(a, len), std::slice::from_raw_parts(b, len));
        *out = nmi(a, b).map_err(lib_err)?;
        Ok(())
    })
}
