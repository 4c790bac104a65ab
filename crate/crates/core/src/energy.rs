//! Online energy diagnostics: norms, the weighted Lyapunov functional and the
//! absorbing-set bound it must respect.
//!
//! In the subcritical regime (`c1 < 1`, `h > 0`) the functional is
//! `L = tau ||A||^2 + delta0 ||phi||^2` with `delta0 = 2(1 - c1)/(2 + c2)`, and
//! every trajectory satisfies
//!
//! ```text
//! L(t) <= L(0) exp(-k0 t) + |Omega| / k0,     k0 = min(1/tau, h).
//! ```
//!
//! For `c1 >= 2 c2 > 0` the alternate functional `(c1 tau / 2) ||A||^2 + 2 c2 ||phi||^2`
//! is bounded by `max(L(0), |Omega| / (4 k0))`. Outside both regimes the norms
//! are still recorded but no bound is checked.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{ChevronError, Result};
use crate::fdops::grad_norm_sq;
use crate::field::RealField;
use crate::grid::Grid2D;
use crate::params::ChevronParams;
use crate::pde::{run, Observer, StepperConfig};
use crate::state::SimState;

/// Relative slack allowed on the bound before a record counts as a violation.
pub const DISSIPATIVITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SubcriticalC1,
    C1Ge2C2,
    None,
}

impl Regime {
    pub fn of(p: &ChevronParams) -> Self {
        if p.h <= 0.0 {
            Regime::None
        } else if p.c1 < 1.0 {
            Regime::SubcriticalC1
        } else if p.c2 > 0.0 && p.c1 >= 2.0 * p.c2 {
            Regime::C1Ge2C2
        } else {
            Regime::None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::SubcriticalC1 => "SUBCRITICAL_C1",
            Regime::C1Ge2C2 => "C1_GE_2C2",
            Regime::None => "NONE",
        }
    }
}

/// `delta0 = 2(1 - c1) / (2 + c2)`, defined for `c1 < 1`.
pub fn delta0(p: &ChevronParams) -> Result<f64> {
    if p.c1 >= 1.0 {
        return Err(ChevronError::Regime(format!(
            "delta0 requires c1 < 1 (got c1 = {}); use remark_weights for c1 >= 2 c2 > 0",
            p.c1
        )));
    }
    Ok(2.0 * (1.0 - p.c1) / (2.0 + p.c2))
}

/// Decay rate `k0 = min(1/tau, h)`.
pub fn k0(p: &ChevronParams) -> Result<f64> {
    if p.h <= 0.0 {
        return Err(ChevronError::Regime("k0 requires h > 0: without dampening there is no absorbing bound".into()));
    }
    Ok((1.0 / p.tau).min(p.h))
}

/// Weights `(c1 tau / 2, 2 c2)` of the functional used when `c1 >= 2 c2 > 0`.
pub fn remark_weights(p: &ChevronParams) -> Result<(f64, f64)> {
    if !(p.c2 > 0.0 && p.c1 >= 2.0 * p.c2) {
        return Err(ChevronError::Regime(format!("need c1 >= 2 c2 > 0, got c1 = {}, c2 = {}", p.c1, p.c2)));
    }
    Ok((p.c1 * p.tau / 2.0, 2.0 * p.c2))
}

/// The weighted functional `w_A ||A||^2 + w_phi ||phi||^2` and its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovFunctional {
    pub regime: Regime,
    pub weight_a: f64,
    pub weight_phi: f64,
    area: f64,
    k0: f64,
}

impl LyapunovFunctional {
    pub fn new(p: &ChevronParams, grid: &Grid2D) -> Self {
        let regime = Regime::of(p);
        let (weight_a, weight_phi) = match regime {
            Regime::SubcriticalC1 => (p.tau, delta0(p).expect("c1 < 1")),
            Regime::C1Ge2C2 => remark_weights(p).expect("regime checked"),
            Regime::None => (p.tau, 1.0),
        };
        let k0 = k0(p).unwrap_or(f64::NAN);
        Self { regime, weight_a, weight_phi, area: grid.area(), k0 }
    }

    pub fn value(&self, norm_a_sq: f64, norm_phi_sq: f64) -> f64 {
        self.weight_a * norm_a_sq + self.weight_phi * norm_phi_sq
    }

    pub fn of_state(&self, s: &SimState) -> f64 {
        self.value(s.a.l2_norm_sq(), s.phi.l2_norm_sq())
    }

    /// The absorbing level the bound relaxes to.
    pub fn absorbing_level(&self) -> f64 {
        match self.regime {
            Regime::SubcriticalC1 => self.area / self.k0,
            Regime::C1Ge2C2 => self.area / (4.0 * self.k0),
            Regime::None => f64::NAN,
        }
    }

    /// Upper bound at time `t` for a run whose functional started at `l0`.
    pub fn bound(&self, l0: f64, t: f64) -> f64 {
        match self.regime {
            Regime::SubcriticalC1 => l0 * (-self.k0 * t).exp() + self.absorbing_level(),
            Regime::C1Ge2C2 => l0.max(self.absorbing_level()),
            Regime::None => f64::NAN,
        }
    }
}

/// Per-observation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub norm_a_sq: f64,
    pub norm_phi_sq: f64,
    pub grad_a_sq: f64,
    pub grad_phi_sq: f64,
    /// `||A||_{L4}^4`.
    pub l4_a: f64,
    pub lyapunov: f64,
    pub bound: f64,
}

impl EnergyRecord {
    pub const CSV_HEADER: [&'static str; 8] =
        ["t", "normA_sq", "normPhi_sq", "gradA_sq", "gradPhi_sq", "l4A", "lyapunov", "bound"];

    pub fn to_row(&self) -> [f64; 8] {
        [
            self.t,
            self.norm_a_sq,
            self.norm_phi_sq,
            self.grad_a_sq,
            self.grad_phi_sq,
            self.l4_a,
            self.lyapunov,
            self.bound,
        ]
    }

    pub fn from_row(r: [f64; 8]) -> Self {
        Self {
            t: r[0],
            norm_a_sq: r[1],
            norm_phi_sq: r[2],
            grad_a_sq: r[3],
            grad_phi_sq: r[4],
            l4_a: r[5],
            lyapunov: r[6],
            bound: r[7],
        }
    }
}

/// Diagnostics of `state` for a run that started at `t = 0` with functional value `l0`.
pub fn record(state: &SimState, p: &ChevronParams, l0: f64) -> EnergyRecord {
    record_with(&LyapunovFunctional::new(p, state.grid()), state, l0, 0.0)
}

/// As [`record`] for a run that started at `t0`; the bound uses `state.t - t0`.
pub fn record_with(f: &LyapunovFunctional, state: &SimState, l0: f64, t0: f64) -> EnergyRecord {
    let norm_a_sq = state.a.l2_norm_sq();
    let norm_phi_sq = state.phi.l2_norm_sq();
    EnergyRecord {
        t: state.t,
        norm_a_sq,
        norm_phi_sq,
        grad_a_sq: grad_norm_sq(&state.a),
        grad_phi_sq: grad_norm_sq(&state.phi),
        l4_a: state.a.l4_norm_4(),
        lyapunov: f.value(norm_a_sq, norm_phi_sq),
        bound: f.bound(l0, state.t - t0),
    }
}

/// Observer that accumulates [`EnergyRecord`]s. The bound is anchored at the
/// first observed state: its time and functional value.
#[derive(Debug, Clone)]
pub struct EnergyRecorder {
    pub functional: LyapunovFunctional,
    origin: Option<(f64, f64)>,
    pub records: Vec<EnergyRecord>,
}

impl EnergyRecorder {
    pub fn new(p: &ChevronParams, grid: &Grid2D) -> Self {
        Self { functional: LyapunovFunctional::new(p, grid), origin: None, records: Vec::new() }
    }

    pub fn report(&self) -> DissipativityReport {
        check_dissipativity(&self.records, self.functional.regime)
    }
}

impl Observer for EnergyRecorder {
    fn observe(&mut self, state: &SimState) -> Result<()> {
        let f = self.functional;
        let (t0, l0) = *self.origin.get_or_insert_with(|| (state.t, f.of_state(state)));
        self.records.push(record_with(&f, state, l0, t0));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub lyapunov: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipativityReport {
    pub regime: Regime,
    pub violations: Vec<Violation>,
    /// `max lyapunov / bound` over the checked records (0 when none were checked).
    pub max_excess_ratio: f64,
}

impl DissipativityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for DissipativityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "regime: {}", self.regime.name())?;
        if self.regime == Regime::None {
            return writeln!(f, "no bound available in this regime; nothing checked");
        }
        writeln!(f, "max lyapunov/bound: {:.6}", self.max_excess_ratio)?;
        writeln!(f, "violations (tol {:.0}%): {}", DISSIPATIVITY_TOL * 100.0, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  t = {:.6}  lyapunov = {:.6e}  bound = {:.6e}", v.t, v.lyapunov, v.bound)?;
        }
        Ok(())
    }
}

/// Flags every record with `lyapunov > bound (1 + tol)`. Records with a
/// non-finite bound, or any record when the regime is `None`, are skipped.
pub fn check_dissipativity(records: &[EnergyRecord], regime: Regime) -> DissipativityReport {
    let mut violations = Vec::new();
    let mut max_excess_ratio: f64 = 0.0;
    if regime != Regime::None {
        for r in records.iter().filter(|r| r.bound.is_finite()) {
            let ratio = if r.bound > 0.0 {
                r.lyapunov / r.bound
            } else if r.lyapunov > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            max_excess_ratio = max_excess_ratio.max(ratio);
            if r.lyapunov > r.bound * (1.0 + DISSIPATIVITY_TOL) {
                violations.push(Violation { t: r.t, lyapunov: r.lyapunov, bound: r.bound });
            }
        }
    }
    violations.sort_by(|a, b| a.t.total_cmp(&b.t));
    DissipativityReport { regime, violations, max_excess_ratio }
}

/// Separation `D(t) = tau ||A - A~||^2 + ||phi - phi~||^2` between two runs.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceProbe {
    pub times: Vec<f64>,
    pub separation: Vec<f64>,
    /// `max_t D(t) / D(0)`; 1 when the perturbation is zero.
    pub amplification: f64,
}

impl DependenceProbe {
    pub fn max_separation(&self) -> f64 {
        self.separation.iter().copied().fold(0.0, f64::max)
    }
}

/// Unit-norm perturbation direction: the lowest sine mode, in both fields.
fn perturbation(grid: &Grid2D) -> RealField {
    let (lx, ly) = (grid.lx(), grid.ly());
    let norm = 2.0 / (lx * ly).sqrt();
    RealField::from_fn(*grid, |x, y| {
        norm * (std::f64::consts::PI * x / lx).sin() * (std::f64::consts::PI * y / ly).sin()
    })
}

/// Integrates `initial` and a copy perturbed by `delta` along a fixed smooth
/// direction and records their separation at the observation cadence.
pub fn continuous_dependence_probe(
    p: &ChevronParams,
    initial: &SimState,
    delta: f64,
    t_end: f64,
    cfg: &StepperConfig,
    observe_every: f64,
) -> Result<DependenceProbe> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(ChevronError::InvalidParameter(format!("delta must be >= 0, got {delta}")));
    }
    let e = perturbation(initial.grid());
    let phase = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2) * delta;
    let perturbed = SimState {
        a: initial.a.zip_map(&e, |a, v| a + phase * v)?,
        phi: initial.phi.axpy(delta, &e)?,
        t: initial.t,
    };

    let mut base = Vec::new();
    let mut other = Vec::new();
    let mut keep_base = |s: &SimState| -> Result<()> {
        base.push(s.clone());
        Ok(())
    };
    run(initial.clone(), p, cfg, t_end, observe_every, &mut [&mut keep_base])?;
    let mut keep_other = |s: &SimState| -> Result<()> {
        other.push(s.clone());
        Ok(())
    };
    run(perturbed, p, cfg, t_end, observe_every, &mut [&mut keep_other])?;

    let mut times = Vec::with_capacity(base.len());
    let mut separation = Vec::with_capacity(base.len());
    for (s, q) in base.iter().zip(&other) {
        times.push(s.t);
        separation.push(p.tau * s.a.sub(&q.a)?.l2_norm_sq() + s.phi.sub(&q.phi)?.l2_norm_sq());
    }
    let d0 = separation[0];
    let dmax = separation.iter().copied().fold(0.0, f64::max);
    let amplification = if d0 > 0.0 { dmax / d0 } else { 1.0 };
    Ok(DependenceProbe { times, separation, amplification })
}
