//! C ABI over `cbp-core`.
//!
//! Objects are opaque heap handles created by `cbp_*` constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CbpStatus`]; on failure `cbp_last_error_message` describes the error
//! on the calling thread. Array arguments are caller-owned buffers whose
//! length is passed explicitly.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cbp_core::engine::{ControlParams, Mode, Propagator, ScheduleConfig};
use cbp_core::graph::{generate_watts_strogatz, random_tree, sample_couplings, Couplings, SocialGraph};
use cbp_core::learning::{train_unsupervised, RateDecay, UnsupervisedConfig};
use cbp_core::oracle::{exact_marginals, IsingModel};
use cbp_core::persistence;
use cbp_core::stimuli::ExternalField;
use cbp_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbpStatus {
    Ok = 0,
    /// Out-of-range or inconsistent argument.
    InvalidArgument = 1,
    /// A required pointer was null.
    NullPointer = 2,
    /// A buffer length does not match the object.
    LengthMismatch = 3,
    /// The exact oracle refused a graph above its size budget.
    OracleBudget = 4,
    /// Non-finite message or diverging training.
    Numeric = 5,
    /// File could not be read or parsed.
    Io = 6,
    /// Internal panic; the library state is unchanged.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbpMode {
    Bp = 0,
    Cbp = 1,
    MeanField = 2,
}

impl From<CbpMode> for Mode {
    fn from(m: CbpMode) -> Self {
        match m {
            CbpMode::Bp => Mode::Bp,
            CbpMode::Cbp => Mode::Cbp,
            CbpMode::MeanField => Mode::MeanField,
        }
    }
}

/// Opaque social graph.
pub struct CbpGraph(SocialGraph);

/// Opaque per-edge couplings, in the graph's canonical edge order.
pub struct CbpCouplings(Couplings);

/// Opaque CBP control parameters.
pub struct CbpParams(ControlParams);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> CbpStatus {
    match err {
        Error::InvalidParameter(_) | Error::Config(_) | Error::Empty(_) => CbpStatus::InvalidArgument,
        Error::OracleBudget { .. } => CbpStatus::OracleBudget,
        Error::NonFiniteMessage { .. } | Error::NonFinite(_) | Error::Divergence(_) => CbpStatus::Numeric,
        Error::Parse { .. } | Error::Io { .. } => CbpStatus::Io,
    }
}

struct Failure(CbpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CbpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CbpStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CbpStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CbpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, expected: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len != expected {
        return Err(Failure(CbpStatus::LengthMismatch, format!("{what}: length {len}, expected {expected}")));
    }
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a>(ptr: *mut f64, len: usize, expected: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len != expected {
        return Err(Failure(CbpStatus::LengthMismatch, format!("{what}: length {len}, expected {expected}")));
    }
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

// Checked before any work so a missing slot is reported as such.
fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    Ok(())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    check_out(out)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message describing the last failure on this thread; empty if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cbp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cbp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- graphs ----

/// Watts-Strogatz graph: `k` neighbours per side, rewiring probability `beta`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_watts_strogatz(n: usize, k: usize, beta: f64, seed: u64, out: *mut *mut CbpGraph) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        store(out, CbpGraph(generate_watts_strogatz(n, k, beta, seed)?))
    })
}

/// Uniformly random labelled tree on `n` nodes.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_random_tree(n: usize, seed: u64, out: *mut *mut CbpGraph) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        store(out, CbpGraph(random_tree(n, seed)?))
    })
}

/// Graph from `edge_count` pairs stored flat in `pairs` (`2 * edge_count` values).
///
/// # Safety
/// `pairs` must point to `2 * edge_count` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_from_edges(n: usize, pairs: *const u32, edge_count: usize, out: *mut *mut CbpGraph) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        let flat: &[u32] = if edge_count == 0 {
            &[]
        } else if pairs.is_null() {
            return Err(null("pairs"));
        } else {
            std::slice::from_raw_parts(pairs, 2 * edge_count)
        };
        let edges = flat.chunks_exact(2).map(|p| (p[0] as usize, p[1] as usize));
        store(out, CbpGraph(SocialGraph::from_edges(n, edges)?))
    })
}

/// Loads a whitespace-separated edge list (optional `# n=<count>` header).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_load(path: *const c_char, out: *mut *mut CbpGraph) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(CbpStatus::InvalidArgument, "path is not UTF-8".into()))?;
        store(out, CbpGraph(persistence::load_graph(Path::new(path))?.graph))
    })
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_node_count(graph: *const CbpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of undirected edges; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_edge_count(graph: *const CbpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Copies the canonical edge list (`i < j`, ascending) into `pairs`,
/// which must hold `2 * edge_count` values.
///
/// # Safety
/// `graph` must be a live handle; `pairs` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_edges(graph: *const CbpGraph, pairs: *mut u32, len: usize) -> CbpStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        if len != 2 * g.edge_count() {
            return Err(Failure(CbpStatus::LengthMismatch, format!("pairs: length {len}, expected {}", 2 * g.edge_count())));
        }
        if len == 0 {
            return Ok(());
        }
        if pairs.is_null() {
            return Err(null("pairs"));
        }
        let out = std::slice::from_raw_parts_mut(pairs, len);
        for (slot, &(i, j)) in out.chunks_exact_mut(2).zip(g.edges()) {
            slot[0] = i;
            slot[1] = j;
        }
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbp_graph_free(graph: *mut CbpGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

// ---- couplings ----

/// Independent couplings `J ~ U(0, j_max]` per edge.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cbp_couplings_sample(graph: *const CbpGraph, j_max: f64, seed: u64, out: *mut *mut CbpCouplings) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        store(out, CbpCouplings(sample_couplings(&deref(graph, "graph")?.0, j_max, seed)?))
    })
}

/// Couplings from `len` positive values in canonical edge order.
///
/// # Safety
/// `graph` must be a live handle; `values` must point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn cbp_couplings_from_values(
    graph: *const CbpGraph,
    values: *const f64,
    len: usize,
    out: *mut *mut CbpCouplings,
) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        let g = &deref(graph, "graph")?.0;
        let v = slice(values, len, g.edge_count(), "values")?;
        store(out, CbpCouplings(Couplings::new(g, v.to_vec())?))
    })
}

/// # Safety
/// `couplings` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbp_couplings_free(couplings: *mut CbpCouplings) {
    if !couplings.is_null() {
        drop(Box::from_raw(couplings));
    }
}

// ---- control parameters ----

/// alpha = kappa = 1 (plain BP).
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cbp_params_bp_defaults(graph: *const CbpGraph, out: *mut *mut CbpParams) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        store(out, CbpParams(ControlParams::bp_defaults(&deref(graph, "graph")?.0)))
    })
}

/// Parameters from per-edge `alpha` (canonical edge order) and per-node `kappa`.
///
/// # Safety
/// Buffers must hold the stated number of values; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cbp_params_new(
    graph: *const CbpGraph,
    alpha: *const f64,
    alpha_len: usize,
    kappa: *const f64,
    kappa_len: usize,
    out: *mut *mut CbpParams,
) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        let g = &deref(graph, "graph")?.0;
        let a = slice(alpha, alpha_len, g.edge_count(), "alpha")?;
        let k = slice(kappa, kappa_len, g.node_count(), "kappa")?;
        store(out, CbpParams(ControlParams::new(g, a.to_vec(), k.to_vec())?))
    })
}

/// Copies the parameters out.
///
/// # Safety
/// Buffers must hold the stated number of values; `params` must be live.
#[no_mangle]
pub unsafe extern "C" fn cbp_params_get(params: *const CbpParams, alpha: *mut f64, alpha_len: usize, kappa: *mut f64, kappa_len: usize) -> CbpStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        slice_mut(alpha, alpha_len, p.alpha().len(), "alpha")?.copy_from_slice(p.alpha());
        slice_mut(kappa, kappa_len, p.kappa().len(), "kappa")?.copy_from_slice(p.kappa());
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbp_params_free(params: *mut CbpParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

// ---- inference ----

/// Runs `iterations` damped sweeps from zero messages and writes the final
/// beliefs (log-odds) to `beliefs`. `params` may be null (alpha = kappa = 1).
///
/// # Safety
/// Handles must be live (`params` may be null); `field` and `beliefs` must
/// hold `node_count` values.
#[no_mangle]
pub unsafe extern "C" fn cbp_run(
    graph: *const CbpGraph,
    couplings: *const CbpCouplings,
    params: *const CbpParams,
    mode: CbpMode,
    tau: f64,
    iterations: usize,
    field: *const f64,
    beliefs: *mut f64,
    n: usize,
) -> CbpStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        let c = &deref(couplings, "couplings")?.0;
        let f = ExternalField::from_values(slice(field, n, g.node_count(), "field")?.to_vec())?;
        let defaults;
        let p = match params.as_ref() {
            Some(p) => &p.0,
            None => {
                defaults = ControlParams::bp_defaults(g);
                &defaults
            }
        };
        let sched = ScheduleConfig {
            tau,
            iterations,
            mode: mode.into(),
            ..ScheduleConfig::default()
        };
        let out = Propagator::new(g, c)?.run(&f, p, &sched)?;
        slice_mut(beliefs, n, g.node_count(), "beliefs")?.copy_from_slice(&out.state.beliefs);
        Ok(())
    })
}

/// Exact `p(x_i = +1)` by enumeration (at most 20 nodes).
///
/// # Safety
/// Handles must be live; `field` and `p_yes` must hold `node_count` values.
#[no_mangle]
pub unsafe extern "C" fn cbp_exact_marginals(
    graph: *const CbpGraph,
    couplings: *const CbpCouplings,
    field: *const f64,
    p_yes: *mut f64,
    n: usize,
) -> CbpStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        let c = &deref(couplings, "couplings")?.0;
        let f = ExternalField::from_values(slice(field, n, g.node_count(), "field")?.to_vec())?;
        let p = exact_marginals(&IsingModel::new(g, c, &f)?)?;
        slice_mut(p_yes, n, g.node_count(), "p_yes")?.copy_from_slice(&p.p_yes);
        Ok(())
    })
}

/// Unsupervised CBP training from alpha = kappa = 1 on `trials`
/// uninformative fields of standard deviation `sigma_ext`. Rates decay as
/// `1/sqrt(trial)` unless `constant_rates` is nonzero.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cbp_train_unsupervised(
    graph: *const CbpGraph,
    couplings: *const CbpCouplings,
    trials: usize,
    eta_alpha: f64,
    eta_kappa: f64,
    constant_rates: i32,
    sigma_ext: f64,
    seed: u64,
    out: *mut *mut CbpParams,
) -> CbpStatus {
    guard(|| {
        check_out(out)?;
        let g = &deref(graph, "graph")?.0;
        let c = &deref(couplings, "couplings")?.0;
        let cfg = UnsupervisedConfig {
            n_trials: trials,
            eta_alpha,
            eta_kappa,
            decay: if constant_rates != 0 { RateDecay::Constant } else { RateDecay::InvSqrt },
            sigma_ext,
            seed,
            ..UnsupervisedConfig::default()
        };
        let (params, _) = train_unsupervised(g, c, &cfg)?;
        store(out, CbpParams(params))
    })
}
