//! C ABI over `chevron-core`.
//!
//! Conventions:
//! * every fallible function returns a [`ChevronStatus`]; on failure a
//!   message is available from [`chevron_last_error_message`] on the same thread;
//! * simulations are opaque [`ChevronSim`] handles created by
//!   [`chevron_sim_new`] and released by [`chevron_sim_free`];
//! * field buffers are row-major with the x index outer (`i * ny + j`), and
//!   complex values are interleaved `(re, im)` pairs;
//! * panics never cross the boundary; they are reported as `CHEVRON_STATUS_PANIC`.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use num_complex::Complex64;

use chevron_core::config::{make_initial, InitialCondition};
use chevron_core::energy::{record_with, LyapunovFunctional};
use chevron_core::pde::{reaction_rate, run, stable_dt_with_safety, Scheme, Stepper, StepperConfig, DEFAULT_SAFETY};
use chevron_core::reduced::{self, ReducedSystem};
use chevron_core::{snapshot, ChevronError, ComplexField, Grid2D, RealField, SimState};

/// Result codes. `CHEVRON_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChevronStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GridMismatch = 3,
    BlowUp = 4,
    Regime = 5,
    NotAnEquilibrium = 6,
    Divergence = 7,
    Io = 8,
    Format = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Coefficients of the PDE system.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChevronParams {
    pub tau: f64,
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
    pub h: f64,
    pub beta: f64,
}

/// Coefficients of the reduced ODEs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChevronReducedParams {
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub h: f64,
    pub chi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChevronScheme {
    Rk4 = 0,
    Imex = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChevronSystem {
    Uniform = 0,
    PhaseGrad = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChevronKind {
    Saddle = 0,
    SpiralSink = 1,
    SpiralSource = 2,
    NodeSink = 3,
    NodeSource = 4,
    CenterMarginal = 5,
    Degenerate = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChevronFixedPoint {
    pub rho: f64,
    pub phi: f64,
    pub re_l1: f64,
    pub im_l1: f64,
    pub re_l2: f64,
    pub im_l2: f64,
    pub kind: ChevronKind,
}

/// Energy diagnostics of the current state. `bound` is anchored at the state
/// the simulation was last initialized with; NaN outside the dissipative regimes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChevronEnergy {
    pub t: f64,
    pub norm_a_sq: f64,
    pub norm_phi_sq: f64,
    pub grad_a_sq: f64,
    pub grad_phi_sq: f64,
    pub l4_a: f64,
    pub lyapunov: f64,
    pub bound: f64,
}

/// Opaque simulation handle.
pub struct ChevronSim {
    params: chevron_core::ChevronParams,
    grid: Grid2D,
    scheme: Scheme,
    /// `None` picks the step from the stability heuristic at each initialization.
    fixed_dt: Option<f64>,
    stepper: Stepper,
    state: SimState,
    functional: LyapunovFunctional,
    origin: (f64, f64),
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(ChevronStatus, String);

impl From<ChevronError> for Failure {
    fn from(e: ChevronError) -> Self {
        let status = match &e {
            ChevronError::InvalidParameter(_) | ChevronError::Degenerate(_) | ChevronError::PhaseSingularity { .. } => {
                ChevronStatus::InvalidArgument
            }
            ChevronError::GridMismatch => ChevronStatus::GridMismatch,
            ChevronError::NonFinite { .. } | ChevronError::BlowUp { .. } => ChevronStatus::BlowUp,
            ChevronError::Regime(_) => ChevronStatus::Regime,
            ChevronError::NotAnEquilibrium { .. } => ChevronStatus::NotAnEquilibrium,
            ChevronError::Divergence { .. } => ChevronStatus::Divergence,
            ChevronError::Io(_) => ChevronStatus::Io,
            ChevronError::Format(_) => ChevronStatus::Format,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: ChevronStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> ChevronStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ChevronStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            ChevronStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(ChevronStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(ChevronStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return fail(ChevronStatus::NullPointer, "path is NULL");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => fail(ChevronStatus::InvalidArgument, "path is not valid UTF-8"),
    }
}

impl From<ChevronParams> for chevron_core::ChevronParams {
    fn from(p: ChevronParams) -> Self {
        Self { tau: p.tau, d1: p.d1, d2: p.d2, c1: p.c1, c2: p.c2, h: p.h, beta: p.beta }
    }
}

impl ChevronSim {
    fn resolve_dt(&self, s: &SimState) -> f64 {
        self.fixed_dt.unwrap_or_else(|| {
            let bound = 1f64.max(s.a.max_abs()).max(s.phi.max_abs());
            match self.scheme {
                Scheme::Rk4Explicit => stable_dt_with_safety(&self.params, &self.grid, bound, DEFAULT_SAFETY),
                Scheme::ImexEuler => DEFAULT_SAFETY / reaction_rate(&self.params, &self.grid, bound),
            }
        })
    }

    fn reset(&mut self, s: SimState) -> Result<(), ChevronError> {
        s.a.ensure_same_grid(&self.grid)?;
        let dt = self.resolve_dt(&s);
        if dt != self.stepper.config().dt {
            self.stepper = Stepper::new(self.params, self.grid, StepperConfig::new(self.scheme, dt)?)?;
        }
        self.origin = (s.t, self.functional.of_state(&s));
        self.state = s;
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chevron_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread ("" after a success).
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn chevron_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the default coefficients to `out`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_params_default(out: *mut ChevronParams) -> ChevronStatus {
    guarded(|| {
        let p = chevron_core::ChevronParams::default();
        *deref_mut(out, "out")? =
            ChevronParams { tau: p.tau, d1: p.d1, d2: p.d2, c1: p.c1, c2: p.c2, h: p.h, beta: p.beta };
        Ok(())
    })
}

/// Creates a simulation on an `nx` x `ny` interior grid over `[0, lx] x [0, ly]`,
/// starting from the zero state at `t = 0`. `dt <= 0` selects the step from the
/// stability heuristic, re-evaluated whenever the state is (re)initialized.
///
/// # Safety
/// `params` must be NULL or point to a valid struct; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_new(
    params: *const ChevronParams,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    scheme: ChevronScheme,
    dt: f64,
    out: *mut *mut ChevronSim,
) -> ChevronStatus {
    guarded(|| {
        let out = deref_mut(out, "out")?;
        *out = std::ptr::null_mut();
        let params: chevron_core::ChevronParams = (*deref(params, "params")?).into();
        params.validate()?;
        let grid = Grid2D::new(nx, ny, lx, ly)?;
        let scheme = match scheme {
            ChevronScheme::Rk4 => Scheme::Rk4Explicit,
            ChevronScheme::Imex => Scheme::ImexEuler,
        };
        if dt.is_nan() {
            return fail(ChevronStatus::InvalidArgument, "dt is NaN");
        }
        let fixed_dt = (dt > 0.0).then_some(dt);
        let state = SimState::zeros(grid);
        let placeholder = StepperConfig::new(scheme, fixed_dt.unwrap_or(1.0))?;
        let mut sim = ChevronSim {
            params,
            grid,
            scheme,
            fixed_dt,
            stepper: Stepper::new(params, grid, placeholder)?,
            state: state.clone(),
            functional: LyapunovFunctional::new(&params, &grid),
            origin: (0.0, 0.0),
        };
        sim.reset(state)?;
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Releases a simulation. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a handle from [`chevron_sim_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_free(sim: *mut ChevronSim) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Resets to the zero state at `t = 0`.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_init_zero(sim: *mut ChevronSim) -> ChevronStatus {
    init(sim, InitialCondition::Zero)
}

/// Seeded random initial data of the given amplitude (same generator as the CLI).
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_init_random(sim: *mut ChevronSim, seed: u64, amplitude: f64) -> ChevronStatus {
    init(sim, InitialCondition::Random { seed, amplitude })
}

/// `A = amplitude sin(kx pi x / lx) sin(ky pi y / ly)`, `phi = 0`.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_init_single_mode(
    sim: *mut ChevronSim,
    kx: u32,
    ky: u32,
    amplitude: f64,
) -> ChevronStatus {
    init(sim, InitialCondition::SingleMode { kx, ky, amplitude })
}

unsafe fn init(sim: *mut ChevronSim, ic: InitialCondition) -> ChevronStatus {
    guarded(|| {
        let sim = deref_mut(sim, "sim")?;
        match ic {
            InitialCondition::Random { amplitude, .. } | InitialCondition::SingleMode { amplitude, .. }
                if !(amplitude.is_finite() && amplitude >= 0.0) =>
            {
                return fail(ChevronStatus::InvalidArgument, format!("amplitude must be >= 0, got {amplitude}"))
            }
            InitialCondition::SingleMode { kx: 0, .. } | InitialCondition::SingleMode { ky: 0, .. } => {
                return fail(ChevronStatus::InvalidArgument, "kx and ky must be >= 1")
            }
            _ => {}
        }
        let s = make_initial(&ic, &sim.grid)?;
        sim.reset(s)?;
        Ok(())
    })
}

/// Replaces the state with caller data: `phi` holds `nx*ny` values, `a`
/// holds `2*nx*ny` interleaved values.
///
/// # Safety
/// `phi` and `a` must be valid for reads of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_set_fields(
    sim: *mut ChevronSim,
    phi: *const f64,
    phi_len: usize,
    a: *const f64,
    a_len: usize,
    t: f64,
) -> ChevronStatus {
    guarded(|| {
        let sim = deref_mut(sim, "sim")?;
        let n = sim.grid.len();
        if phi.is_null() || a.is_null() {
            return fail(ChevronStatus::NullPointer, "field buffer is NULL");
        }
        if phi_len != n || a_len != 2 * n {
            return fail(
                ChevronStatus::InvalidArgument,
                format!("expected phi_len = {n} and a_len = {}, got {phi_len} and {a_len}", 2 * n),
            );
        }
        let phi = std::slice::from_raw_parts(phi, n).to_vec();
        let a = std::slice::from_raw_parts(a, 2 * n);
        let a = a.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let s = SimState::new(ComplexField::from_values(sim.grid, a)?, RealField::from_values(sim.grid, phi)?, t)?;
        sim.reset(s)?;
        Ok(())
    })
}

/// Advances `n_steps` steps of the configured size.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_step(sim: *mut ChevronSim, n_steps: u64) -> ChevronStatus {
    guarded(|| {
        let sim = deref_mut(sim, "sim")?;
        for _ in 0..n_steps {
            sim.state = sim.stepper.step(&sim.state)?;
        }
        Ok(())
    })
}

/// Advances to exactly `t_end`, shortening the last step.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_run(sim: *mut ChevronSim, t_end: f64) -> ChevronStatus {
    guarded(|| {
        let sim = deref_mut(sim, "sim")?;
        let t0 = sim.state.t;
        if !(t_end >= t0) {
            return fail(ChevronStatus::InvalidArgument, format!("t_end = {t_end} precedes the current time {t0}"));
        }
        if t_end == t0 {
            return Ok(());
        }
        let cfg = *sim.stepper.config();
        sim.state = run(sim.state.clone(), &sim.params, &cfg, t_end, t_end - t0, &mut [])?;
        Ok(())
    })
}

/// # Safety
/// `t` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_time(sim: *const ChevronSim, t: *mut f64) -> ChevronStatus {
    guarded(|| {
        *deref_mut(t, "t")? = deref(sim, "sim")?.state.t;
        Ok(())
    })
}

/// The configured or automatically selected step.
///
/// # Safety
/// `dt` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_dt(sim: *const ChevronSim, dt: *mut f64) -> ChevronStatus {
    guarded(|| {
        *deref_mut(dt, "dt")? = deref(sim, "sim")?.stepper.config().dt;
        Ok(())
    })
}

/// Grid dimensions `(nx, ny)`; buffers passed to the field functions hold `nx*ny` nodes.
///
/// # Safety
/// `nx` and `ny` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_shape(sim: *const ChevronSim, nx: *mut usize, ny: *mut usize) -> ChevronStatus {
    guarded(|| {
        let sim = deref(sim, "sim")?;
        *deref_mut(nx, "nx")? = sim.grid.nx();
        *deref_mut(ny, "ny")? = sim.grid.ny();
        Ok(())
    })
}

/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_energy(sim: *const ChevronSim, out: *mut ChevronEnergy) -> ChevronStatus {
    guarded(|| {
        let sim = deref(sim, "sim")?;
        let (t0, l0) = sim.origin;
        let r = record_with(&sim.functional, &sim.state, l0, t0);
        *deref_mut(out, "out")? = ChevronEnergy {
            t: r.t,
            norm_a_sq: r.norm_a_sq,
            norm_phi_sq: r.norm_phi_sq,
            grad_a_sq: r.grad_a_sq,
            grad_phi_sq: r.grad_phi_sq,
            l4_a: r.l4_a,
            lyapunov: r.lyapunov,
            bound: r.bound,
        };
        Ok(())
    })
}

/// Copies the fields out. Either buffer may be NULL to skip it; a non-NULL
/// buffer must hold `nx*ny` (phi) or `2*nx*ny` (A) values.
///
/// # Safety
/// Non-NULL buffers must be valid for writes of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_copy_fields(
    sim: *const ChevronSim,
    phi: *mut f64,
    phi_len: usize,
    a: *mut f64,
    a_len: usize,
) -> ChevronStatus {
    guarded(|| {
        let sim = deref(sim, "sim")?;
        let n = sim.grid.len();
        if !phi.is_null() {
            if phi_len < n {
                return fail(ChevronStatus::BufferTooSmall, format!("phi buffer holds {phi_len}, need {n}"));
            }
            std::slice::from_raw_parts_mut(phi, n).copy_from_slice(sim.state.phi.values());
        }
        if !a.is_null() {
            if a_len < 2 * n {
                return fail(ChevronStatus::BufferTooSmall, format!("A buffer holds {a_len}, need {}", 2 * n));
            }
            let out = std::slice::from_raw_parts_mut(a, 2 * n);
            for (pair, z) in out.chunks_exact_mut(2).zip(sim.state.a.values()) {
                pair[0] = z.re;
                pair[1] = z.im;
            }
        }
        Ok(())
    })
}

/// Writes the current state in the CHEV1 snapshot format.
///
/// # Safety
/// `path` must be NULL or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_save_snapshot(sim: *const ChevronSim, path: *const c_char) -> ChevronStatus {
    guarded(|| {
        let sim = deref(sim, "sim")?;
        snapshot::write_file(&path_arg(path)?, &sim.state)?;
        Ok(())
    })
}

/// Replaces the state with a snapshot taken on the same grid.
///
/// # Safety
/// `path` must be NULL or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chevron_sim_load_snapshot(sim: *mut ChevronSim, path: *const c_char) -> ChevronStatus {
    guarded(|| {
        let sim = deref_mut(sim, "sim")?;
        let s = snapshot::read_file(&path_arg(path)?)?;
        if *s.grid() != sim.grid {
            return fail(ChevronStatus::GridMismatch, "snapshot grid differs from the simulation grid");
        }
        sim.reset(s)?;
        Ok(())
    })
}

/// Equilibria with `rho >= 0`. Writes up to `capacity` points to `out` and the
/// total number to `count`; returns `CHEVRON_STATUS_BUFFER_TOO_SMALL` if
/// `capacity < *count` (the first `capacity` points are still written).
/// `out` may be NULL when `capacity` is 0, to query the count.
///
/// # Safety
/// `params` must be valid; `out` valid for `capacity` writes; `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_fixed_points(
    system: ChevronSystem,
    params: *const ChevronReducedParams,
    out: *mut ChevronFixedPoint,
    capacity: usize,
    count: *mut usize,
) -> ChevronStatus {
    guarded(|| {
        let p = deref(params, "params")?;
        let count = deref_mut(count, "count")?;
        *count = 0;
        let system = match system {
            ChevronSystem::Uniform => ReducedSystem::Uniform,
            ChevronSystem::PhaseGrad => ReducedSystem::PhaseGrad,
        };
        let rp = reduced::ReducedParams { tau: p.tau, c1: p.c1, c2: p.c2, h: p.h, chi: p.chi };
        let points = reduced::fixed_points(system, &rp)?;
        *count = points.len();
        if capacity > 0 && out.is_null() {
            return fail(ChevronStatus::NullPointer, "out is NULL with nonzero capacity");
        }
        for (k, fp) in points.iter().take(capacity).enumerate() {
            let [l1, l2] = fp.eigenvalues;
            *out.add(k) = ChevronFixedPoint {
                rho: fp.rho,
                phi: fp.phi,
                re_l1: l1.re,
                im_l1: l1.im,
                re_l2: l2.re,
                im_l2: l2.im,
                kind: kind(fp.kind),
            };
        }
        if capacity < points.len() {
            return fail(ChevronStatus::BufferTooSmall, format!("{} points, capacity {capacity}", points.len()));
        }
        Ok(())
    })
}

fn kind(k: reduced::FixedPointKind) -> ChevronKind {
    use reduced::FixedPointKind as K;
    match k {
        K::Saddle => ChevronKind::Saddle,
        K::SpiralSink => ChevronKind::SpiralSink,
        K::SpiralSource => ChevronKind::SpiralSource,
        K::NodeSink => ChevronKind::NodeSink,
        K::NodeSource => ChevronKind::NodeSource,
        K::CenterMarginal => ChevronKind::CenterMarginal,
        K::Degenerate => ChevronKind::Degenerate,
    }
}

/// `1/sqrt(1 - c1^2)` for `|c1| < 1`. For `|c1| >= 1` there is no critical
/// gradient: returns `CHEVRON_STATUS_REGIME` and writes infinity.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chevron_critical_chi(c1: f64, out: *mut f64) -> ChevronStatus {
    guarded(|| {
        let out = deref_mut(out, "out")?;
        if !c1.is_finite() {
            return fail(ChevronStatus::InvalidArgument, "c1 must be finite");
        }
        match reduced::critical_chi(c1) {
            Some(c) => {
                *out = c;
                Ok(())
            }
            None => {
                *out = f64::INFINITY;
                fail(ChevronStatus::Regime, format!("no critical chi for c1 = {c1} >= 1"))
            }
        }
    })
}
