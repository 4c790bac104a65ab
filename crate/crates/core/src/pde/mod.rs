//! Right-hand sides of the chevron system and the two time integrators.
//!
//! ```text
//! tau dA/dt   = A + lap A - phi^2 A - |A|^2 A - 2i c1 phi dA/dy + i beta A dphi/dy
//! dphi/dt     = D1 phi_xx + D2 phi_yy - h phi + phi |A|^2 - c2 Im(conj(A) dA/dy)
//! ```

mod convergence;
mod run;

pub use convergence::{convergence_study, observed_order, order_of_convergence, ConvergenceReport};
pub use run::{run, Observer};

use num_complex::Complex64;

use crate::error::{ChevronError, Result};
use crate::fdops::{d_dy, laplacian, AnisotropicOperator, HelmholtzSolver};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid2D;
use crate::params::ChevronParams;
use crate::state::SimState;

/// `max |A|` (or `max |phi|`) beyond which a step is reported as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e3;

pub const DEFAULT_SAFETY: f64 = 0.8;

#[derive(Debug, Clone)]
pub struct RhsPair {
    pub da_dt: ComplexField,
    pub dphi_dt: RealField,
}

/// Everything except the stiff linear parts `lap A` and `L phi - h phi`.
/// The amplitude part is *not* divided by `tau`.
struct ExplicitTerms {
    a: ComplexField,
    phi: RealField,
}

fn explicit_terms(state: &SimState, p: &ChevronParams) -> ExplicitTerms {
    let dya = d_dy(&state.a);
    let dyphi = d_dy(&state.phi);
    let i = Complex64::i();
    let grid = *state.grid();
    let mut na = ComplexField::zeros(grid);
    let mut nphi = RealField::zeros(grid);
    let nodes = state
        .a
        .values()
        .iter()
        .zip(state.phi.values())
        .zip(dya.values().iter().zip(dyphi.values()))
        .zip(na.values_mut().iter_mut().zip(nphi.values_mut()));
    for (((&a, &phi), (&da, &dphi)), (out_a, out_phi)) in nodes {
        let mod_sq = a.norm_sqr();
        *out_a = a * (1.0 - phi * phi - mod_sq) + i * (da * (-2.0 * p.c1 * phi) + a * (p.beta * dphi));
        *out_phi = phi * mod_sq - p.c2 * (a.conj() * da).im;
    }
    ExplicitTerms { a: na, phi: nphi }
}

fn rhs_unchecked(state: &SimState, p: &ChevronParams) -> RhsPair {
    let n = explicit_terms(state, p);
    let lap_a = laplacian(&state.a);
    let l_phi = AnisotropicOperator { d1: p.d1, d2: p.d2, grid: *state.grid() }
        .apply(&state.phi)
        .expect("state fields share the grid");
    let inv_tau = 1.0 / p.tau;
    let da_dt = lap_a.zip_map(&n.a, |l, x| (l + x) * inv_tau).expect("same grid");
    let mut dphi_dt = l_phi;
    for ((d, &phi), &x) in dphi_dt.values_mut().iter_mut().zip(state.phi.values()).zip(n.phi.values()) {
        *d += x - p.h * phi;
    }
    RhsPair { da_dt, dphi_dt }
}

/// Time derivatives `(dA/dt, dphi/dt)` at `state`.
pub fn rhs(state: &SimState, p: &ChevronParams) -> Result<RhsPair> {
    let out = rhs_unchecked(state, p);
    out.da_dt.check_finite("dA/dt")?;
    out.dphi_dt.check_finite("dphi/dt")?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Classical four-stage Runge-Kutta on the full right-hand side.
    Rk4Explicit,
    /// Backward Euler on the diffusion (and dampening) terms, forward Euler on the rest.
    ImexEuler,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rk4Explicit => "rk4",
            Scheme::ImexEuler => "imex",
        }
    }

    /// Minimum observed order accepted by the self-convergence check.
    pub fn order_threshold(self) -> f64 {
        match self {
            Scheme::Rk4Explicit => 3.5,
            Scheme::ImexEuler => 0.9,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = ChevronError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" | "rk4_explicit" => Ok(Scheme::Rk4Explicit),
            "imex" | "imex_euler" => Ok(Scheme::ImexEuler),
            other => Err(ChevronError::InvalidParameter(format!("unknown scheme '{other}' (rk4 | imex)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub safety: f64,
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64) -> Result<Self> {
        let cfg = Self { scheme, dt, safety: DEFAULT_SAFETY };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ChevronError::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(ChevronError::InvalidParameter(format!("safety must be in (0, 1], got {}", self.safety)));
        }
        Ok(())
    }
}

/// RK4 step-size cap with the default safety factor.
pub fn stable_dt(p: &ChevronParams, grid: &Grid2D, state_bound: f64) -> f64 {
    stable_dt_with_safety(p, grid, state_bound, DEFAULT_SAFETY)
}

/// `safety * min(diffusive cap, 1 / reaction rate)`.
pub fn stable_dt_with_safety(p: &ChevronParams, grid: &Grid2D, state_bound: f64, safety: f64) -> f64 {
    let (dx2, dy2) = (grid.dx() * grid.dx(), grid.dy() * grid.dy());
    let diffusive = dx2 * dy2 / (2.0 * (dx2 + dy2)) * p.tau.min(1.0 / p.d1.max(p.d2));
    safety * diffusive.min(1.0 / reaction_rate(p, grid, state_bound))
}

/// Bound on the Jacobian of the non-diffusive terms for `|A|, |phi| <= state_bound`.
/// Its inverse is the only step constraint left for the IMEX scheme.
pub fn reaction_rate(p: &ChevronParams, grid: &Grid2D, state_bound: f64) -> f64 {
    let b = state_bound.abs();
    (1.0 + 4.0 * b * b) / p.tau + p.h + 2.0 * b * b + ((2.0 * p.c1 + p.beta.abs()) / p.tau + p.c2) * b / grid.dy()
}

/// A time integrator bound to one parameter set and grid. For IMEX the
/// sine-basis solvers are built once and reused.
#[derive(Debug)]
pub struct Stepper {
    params: ChevronParams,
    config: StepperConfig,
    grid: Grid2D,
    implicit: Option<(HelmholtzSolver, HelmholtzSolver)>,
}

impl Stepper {
    pub fn new(params: ChevronParams, grid: Grid2D, config: StepperConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        let implicit = match config.scheme {
            Scheme::Rk4Explicit => None,
            Scheme::ImexEuler => Some((
                HelmholtzSolver::new(AnisotropicOperator::laplacian(grid)),
                HelmholtzSolver::new(AnisotropicOperator::new(grid, params.d1, params.d2)?),
            )),
        };
        Ok(Self { params, config, grid, implicit })
    }

    pub fn params(&self) -> &ChevronParams {
        &self.params
    }

    pub fn config(&self) -> &StepperConfig {
        &self.config
    }

    pub fn step(&self, state: &SimState) -> Result<SimState> {
        self.step_by(state, self.config.dt)
    }

    /// One step of length `dt` (which may differ from the configured one,
    /// e.g. to land on an observation time).
    pub fn step_by(&self, state: &SimState, dt: f64) -> Result<SimState> {
        state.a.ensure_same_grid(&self.grid)?;
        let next = match &self.implicit {
            None => self.rk4(state, dt),
            Some((a_solver, phi_solver)) => self.imex(state, dt, a_solver, phi_solver)?,
        };
        guard(&next)?;
        Ok(next)
    }

    fn rk4(&self, s: &SimState, dt: f64) -> SimState {
        let p = &self.params;
        let stage = |k: &RhsPair, h: f64| SimState {
            a: s.a.axpy(h, &k.da_dt).expect("same grid"),
            phi: s.phi.axpy(h, &k.dphi_dt).expect("same grid"),
            t: s.t + h,
        };
        let k1 = rhs_unchecked(s, p);
        let k2 = rhs_unchecked(&stage(&k1, 0.5 * dt), p);
        let k3 = rhs_unchecked(&stage(&k2, 0.5 * dt), p);
        let k4 = rhs_unchecked(&stage(&k3, dt), p);
        let w = dt / 6.0;
        let mut a = s.a.clone();
        for (n, v) in a.values_mut().iter_mut().enumerate() {
            *v += (k1.da_dt.values()[n] + (k2.da_dt.values()[n] + k3.da_dt.values()[n]) * 2.0 + k4.da_dt.values()[n]) * w;
        }
        let mut phi = s.phi.clone();
        for (n, v) in phi.values_mut().iter_mut().enumerate() {
            *v += (k1.dphi_dt.values()[n]
                + 2.0 * (k2.dphi_dt.values()[n] + k3.dphi_dt.values()[n])
                + k4.dphi_dt.values()[n])
                * w;
        }
        SimState { a, phi, t: s.t + dt }
    }

    fn imex(&self, s: &SimState, dt: f64, a_solver: &HelmholtzSolver, phi_solver: &HelmholtzSolver) -> Result<SimState> {
        let p = &self.params;
        let n = explicit_terms(s, p);
        // tau (A' - A)/dt = lap A' + N  =>  (tau/dt - lap) A' = (tau/dt) A + N
        let sigma_a = p.tau / dt;
        let rhs_a = n.a.axpy(sigma_a, &s.a)?;
        // (phi' - phi)/dt = L phi' - h phi' + N  =>  (1/dt + h - L) phi' = phi/dt + N
        let rhs_phi = n.phi.axpy(1.0 / dt, &s.phi)?;
        let a = a_solver.solve(sigma_a, &rhs_a);
        let phi = phi_solver.solve(1.0 / dt + p.h, &rhs_phi);
        match (a, phi) {
            (Ok(a), Ok(phi)) => Ok(SimState { a, phi, t: s.t + dt }),
            (Err(ChevronError::NonFinite { .. }), _) | (_, Err(ChevronError::NonFinite { .. })) => {
                Err(blow_up(s.t + dt, f64::NAN, f64::NAN))
            }
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }
}

fn blow_up(t: f64, max_abs_a: f64, max_abs_phi: f64) -> ChevronError {
    ChevronError::BlowUp { t, max_abs_a, max_abs_phi }
}

fn guard(s: &SimState) -> Result<()> {
    let finite = s.a.values().iter().all(|z| z.re.is_finite() && z.im.is_finite())
        && s.phi.values().iter().all(|v| v.is_finite());
    let (ma, mp) = (s.a.max_abs(), s.phi.max_abs());
    if !finite || ma > BLOWUP_THRESHOLD || mp > BLOWUP_THRESHOLD {
        return Err(blow_up(s.t, ma, mp));
    }
    Ok(())
}

/// Single step with a freshly built [`Stepper`].
pub fn step(state: &SimState, p: &ChevronParams, cfg: &StepperConfig) -> Result<SimState> {
    Stepper::new(*p, *state.grid(), *cfg)?.step(state)
}
