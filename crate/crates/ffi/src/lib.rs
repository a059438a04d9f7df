//! C interface to flocksim.
//!
//! Handles are opaque pointers created by `*_new`/`*_run` functions and released with the
//! matching `*_free`. Every fallible call returns a [`FlocksimStatus`]; the message of the
//! last failure on the calling thread is available from [`flocksim_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flocksim::analysis::{detect_switches, network_period};
use flocksim::dynamics::io::{write_trace, SimConfig};
use flocksim::dynamics::{
    run, transition, ConfidencePolicy, Configuration, DynamicsError, ExactState, FlockNetwork, FlockState,
    ScheduledEvents, StopReason, Trace,
};
use flocksim::lowerbound::{run_lowerbound, LBParams, LowerBoundError, LowerBoundOptions, LowerBoundReport};
use flocksim::residue::{canonical_tree, ResidueError, DEFAULT_EXPONENT_BITS};
use flocksim::spectral::spectrum;
use flocksim::{Approx, Mode, Rational};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlocksimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Runtime = 4,
    Budget = 5,
    OutOfRange = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: FlocksimStatus, msg: impl Into<String>) -> FlocksimStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FlocksimStatus) -> FlocksimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FlocksimStatus::Panic, "internal panic"),
    }
}

fn dynamics_status(e: &DynamicsError) -> FlocksimStatus {
    match e {
        DynamicsError::Config { .. } | DynamicsError::Trace(_) => FlocksimStatus::Parse,
        _ => FlocksimStatus::Runtime,
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FlocksimStatus> {
    if s.is_null() {
        return Err(fail(FlocksimStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FlocksimStatus::InvalidUtf8, "string is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn flocksim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn flocksim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn flocksim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

enum State {
    Exact(ExactState),
    Approx(Configuration<Approx>),
}

impl State {
    fn shape(&self) -> (usize, usize, u64) {
        match self {
            State::Exact(s) => (s.n(), s.d(), s.tick()),
            State::Approx(s) => (s.n(), s.d(), s.tick()),
        }
    }

    fn position(&self, i: usize, k: usize) -> f64 {
        match self {
            State::Exact(s) => s.position_f64(i, k),
            State::Approx(s) => s.position_f64(i, k),
        }
    }

    fn velocity(&self, i: usize, k: usize) -> f64 {
        match self {
            State::Exact(s) => s.velocity_f64(i, k),
            State::Approx(s) => s.velocity_f64(i, k),
        }
    }

    fn position_text(&self, i: usize, k: usize) -> String {
        match self {
            State::Exact(s) => s.position_text(i, k),
            State::Approx(s) => s.position_text(i, k),
        }
    }
}

/// A parsed configuration together with its latest run.
pub struct FlocksimSim {
    config: SimConfig,
    state: State,
    trace: Option<Trace>,
}

impl FlocksimSim {
    fn initial_state(config: &SimConfig) -> State {
        match config.mode {
            Mode::Exact => State::Exact(ExactState::from_configuration(&config.initial)),
            Mode::Approx => State::Approx(config.initial.to_approx(config.precision)),
        }
    }
}

/// Parses a TOML configuration into a new handle.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_new(toml: *const c_char, out: *mut *mut FlocksimSim) -> FlocksimStatus {
    guard(|| {
        if out.is_null() {
            return fail(FlocksimStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match SimConfig::parse(text) {
            Ok(config) => {
                let state = FlocksimSim::initial_state(&config);
                *out = Box::into_raw(Box::new(FlocksimSim { config, state, trace: None }));
                FlocksimStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `sim` must be null or a handle from [`flocksim_sim_new`] that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_free(sim: *mut FlocksimSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs from the initial configuration to `horizon`; `budget` 0 means unlimited.
/// Returns `Budget` (keeping the partial run) when the budget stops it early.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_run(sim: *mut FlocksimSim, horizon: u64, budget: u64) -> FlocksimStatus {
    guard(|| {
        let Some(sim) = sim.as_mut() else {
            return fail(FlocksimStatus::NullPointer, "null handle");
        };
        let mut opts = sim.config.run_options();
        opts.horizon = horizon;
        opts.budget = (budget > 0).then_some(budget);
        let mut events = ScheduledEvents::new(sim.config.events.clone());
        let result = match FlocksimSim::initial_state(&sim.config) {
            State::Exact(s) => run(s, &opts, &mut events, &mut []).map(|o| (State::Exact(o.state), o.trace, o.stop)),
            State::Approx(s) => run(s, &opts, &mut events, &mut []).map(|o| (State::Approx(o.state), o.trace, o.stop)),
        };
        match result {
            Ok((state, trace, stop)) => {
                sim.state = state;
                sim.trace = Some(trace);
                if stop == StopReason::Budget {
                    fail(FlocksimStatus::Budget, format!("budget of {budget} ticks exhausted"))
                } else {
                    FlocksimStatus::Ok
                }
            }
            Err(e) => fail(dynamics_status(&e), e.to_string()),
        }
    })
}

/// Birds, dimension and current tick; any output pointer may be null.
///
/// # Safety
/// `sim` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_shape(sim: *const FlocksimSim, n: *mut usize, d: *mut usize, tick: *mut u64) -> FlocksimStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(FlocksimStatus::NullPointer, "null handle");
        };
        let (bn, bd, bt) = sim.state.shape();
        if let Some(n) = n.as_mut() {
            *n = bn;
        }
        if let Some(d) = d.as_mut() {
            *d = bd;
        }
        if let Some(t) = tick.as_mut() {
            *t = bt;
        }
        FlocksimStatus::Ok
    })
}

unsafe fn coordinate(
    sim: *const FlocksimSim,
    bird: usize,
    axis: usize,
    out: *mut f64,
    get: fn(&State, usize, usize) -> f64,
) -> FlocksimStatus {
    guard(|| {
        let (Some(sim), Some(out)) = (sim.as_ref(), out.as_mut()) else {
            return fail(FlocksimStatus::NullPointer, "null pointer");
        };
        let (n, d, _) = sim.state.shape();
        if bird >= n || axis >= d {
            return fail(FlocksimStatus::OutOfRange, format!("({bird}, {axis}) outside {n} birds in {d} dimensions"));
        }
        *out = get(&sim.state, bird, axis);
        FlocksimStatus::Ok
    })
}

/// Position of `bird` along `axis`, rounded to a double.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_position(sim: *const FlocksimSim, bird: usize, axis: usize, out: *mut f64) -> FlocksimStatus {
    coordinate(sim, bird, axis, out, State::position)
}

/// Velocity of `bird` along `axis`, rounded to a double.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_velocity(sim: *const FlocksimSim, bird: usize, axis: usize, out: *mut f64) -> FlocksimStatus {
    coordinate(sim, bird, axis, out, State::velocity)
}

/// Exact position text (`"p/q"` in exact mode); free with [`flocksim_string_free`].
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_position_text(
    sim: *const FlocksimSim,
    bird: usize,
    axis: usize,
    out: *mut *mut c_char,
) -> FlocksimStatus {
    guard(|| {
        let (Some(sim), Some(out)) = (sim.as_ref(), out.as_mut()) else {
            return fail(FlocksimStatus::NullPointer, "null pointer");
        };
        let (n, d, _) = sim.state.shape();
        if bird >= n || axis >= d {
            return fail(FlocksimStatus::OutOfRange, format!("({bird}, {axis}) outside {n} birds in {d} dimensions"));
        }
        *out = into_c_string(sim.state.position_text(bird, axis));
        FlocksimStatus::Ok
    })
}

/// Records, switches and network period (0 when none) of the last run.
///
/// # Safety
/// `sim` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_switches(
    sim: *const FlocksimSim,
    records: *mut usize,
    switches: *mut usize,
    period: *mut u64,
) -> FlocksimStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(FlocksimStatus::NullPointer, "null handle");
        };
        let Some(trace) = &sim.trace else {
            return fail(FlocksimStatus::Runtime, "no run yet");
        };
        let log = match detect_switches(trace) {
            Ok(l) => l,
            Err(e) => return fail(FlocksimStatus::Runtime, e.to_string()),
        };
        if let Some(r) = records.as_mut() {
            *r = trace.records.len();
        }
        if let Some(s) = switches.as_mut() {
            *s = log.count();
        }
        if let Some(p) = period.as_mut() {
            *p = network_period(trace).unwrap_or(0);
        }
        FlocksimStatus::Ok
    })
}

/// Writes the last run's trace as line-delimited JSON.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn flocksim_sim_write_trace(sim: *const FlocksimSim, path: *const c_char) -> FlocksimStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(FlocksimStatus::NullPointer, "null handle");
        };
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let Some(trace) = &sim.trace else {
            return fail(FlocksimStatus::Runtime, "no run yet");
        };
        let file = match std::fs::File::create(path) {
            Ok(f) => f,
            Err(e) => return fail(FlocksimStatus::Runtime, format!("{path}: {e}")),
        };
        match write_trace(trace, std::io::BufWriter::new(file)) {
            Ok(_) => FlocksimStatus::Ok,
            Err(e) => fail(FlocksimStatus::Runtime, e.to_string()),
        }
    })
}

/// Finished run of the slow-merging path construction.
pub struct FlocksimLowerBound {
    report: LowerBoundReport,
}

/// Runs the construction for `n` birds with drift unit `1/q_den`; `stop_height` 0 picks
/// the highest height the budget allows.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_lowerbound_run(
    n: usize,
    q_den: u64,
    lag: u64,
    budget: u64,
    stop_height: u32,
    out: *mut *mut FlocksimLowerBound,
) -> FlocksimStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return fail(FlocksimStatus::NullPointer, "null output pointer");
        };
        *out = ptr::null_mut();
        if q_den == 0 {
            return fail(FlocksimStatus::Parse, "q_den must be positive");
        }
        let params = match LBParams::new(n, Rational::frac(1, q_den as i64), lag) {
            Ok(p) => p,
            Err(e) => return fail(FlocksimStatus::Parse, e.to_string()),
        };
        let opts = LowerBoundOptions {
            budget,
            stop_height: (stop_height > 0).then_some(stop_height),
            ..LowerBoundOptions::default()
        };
        match run_lowerbound(&params, &opts) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(FlocksimLowerBound { report }));
                FlocksimStatus::Ok
            }
            Err(e @ (LowerBoundError::Params(_) | LowerBoundError::Congruence(_))) => fail(FlocksimStatus::Parse, e.to_string()),
            Err(e) => fail(FlocksimStatus::Runtime, e.to_string()),
        }
    })
}

/// # Safety
/// `lb` must be null or a handle from [`flocksim_lowerbound_run`] that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn flocksim_lowerbound_free(lb: *mut FlocksimLowerBound) {
    if !lb.is_null() {
        drop(Box::from_raw(lb));
    }
}

/// Ticks between the merges forming heights `j` and `j + 1`.
///
/// # Safety
/// `lb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_lowerbound_theta(lb: *const FlocksimLowerBound, j: u32, out: *mut u64) -> FlocksimStatus {
    guard(|| {
        let (Some(lb), Some(out)) = (lb.as_ref(), out.as_mut()) else {
            return fail(FlocksimStatus::NullPointer, "null pointer");
        };
        match lb.report.height(j).and_then(|h| h.theta) {
            Some(t) => {
                *out = t;
                FlocksimStatus::Ok
            }
            None => fail(FlocksimStatus::OutOfRange, format!("no measured merge gap at height {j}")),
        }
    })
}

/// Full report as JSON; free with [`flocksim_string_free`].
///
/// # Safety
/// `lb` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn flocksim_lowerbound_json(lb: *const FlocksimLowerBound) -> *mut c_char {
    let Some(lb) = lb.as_ref() else {
        set_error("null handle");
        return ptr::null_mut();
    };
    match serde_json::to_string(&lb.report) {
        Ok(s) => into_c_string(s),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Eigenvalues, descending, of the averaging matrix on a path of `birds` birds.
/// `policy` is `"vicsek"` or `"lazy"`; `out` must hold `birds` doubles.
///
/// # Safety
/// `policy` must be a NUL-terminated string and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn flocksim_path_spectrum(birds: usize, policy: *const c_char, out: *mut f64, len: usize) -> FlocksimStatus {
    guard(|| {
        if out.is_null() {
            return fail(FlocksimStatus::NullPointer, "null output");
        }
        if birds == 0 || len < birds {
            return fail(FlocksimStatus::OutOfRange, format!("need room for {birds} eigenvalues, got {len}"));
        }
        let policy: ConfidencePolicy = match read_str(policy).map(str::parse) {
            Ok(Ok(p)) => p,
            Ok(Err(e)) => return fail(FlocksimStatus::Parse, format!("{e}")),
            Err(s) => return s,
        };
        let edges: Vec<(usize, usize)> = (1..birds).map(|i| (i - 1, i)).collect();
        let result = FlockNetwork::from_edges(birds, &edges)
            .and_then(|g| transition(&g, &policy))
            .map_err(|e| e.to_string())
            .and_then(|t| spectrum(&t.p).map_err(|e| e.to_string()));
        match result {
            Ok(s) => {
                std::slice::from_raw_parts_mut(out, len)[..birds].copy_from_slice(&s.eigenvalues);
                FlocksimStatus::Ok
            }
            Err(e) => fail(FlocksimStatus::Runtime, e),
        }
    })
}

/// Evaluates the canonical combination tree with `2^k` leaves and returns the polynomial
/// as text; free with [`flocksim_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn flocksim_residue_canonical(k: u32, out: *mut *mut c_char) -> FlocksimStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return fail(FlocksimStatus::NullPointer, "null output pointer");
        };
        *out = ptr::null_mut();
        match canonical_tree(k).and_then(|t| t.eval(DEFAULT_EXPONENT_BITS)) {
            Ok(p) => {
                *out = into_c_string(p.to_string());
                FlocksimStatus::Ok
            }
            Err(e @ ResidueError::Overflow { .. }) => fail(FlocksimStatus::Budget, e.to_string()),
            Err(e) => fail(FlocksimStatus::Runtime, e.to_string()),
        }
    })
}
