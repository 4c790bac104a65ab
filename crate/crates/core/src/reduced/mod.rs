//! Two-dimensional reductions of the PDE system.
//!
//! * `Uniform`: spatially constant `A = rho`, `phi`:
//!   `tau rho' = rho (1 - phi^2 - rho^2)`, `phi' = phi (rho^2 - h)`.
//! * `PhaseGrad`: `A = rho e^{i psi}` with constant phase gradient `chi = d_y psi`:
//!   `tau rho' = rho [(1 - rho^2) - (phi - c1 chi)^2 - (1 - c1^2) chi^2]`,
//!   `phi' = -h phi + rho^2 (phi - c2 chi)`.
//!
//! The uniform system is the `chi = 0` case of the phase-gradient one.

mod fixed_points;
mod scan;

pub use fixed_points::{fixed_point_cubic, fixed_points, fixed_points_with_resolution, DEFAULT_SCAN_SUBDIVISIONS};
pub use scan::{bifurcation_scan, portrait, Basin, BifurcationCell, PortraitOrbit};

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{ChevronError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedSystem {
    Uniform,
    PhaseGrad,
}

impl ReducedSystem {
    pub fn name(self) -> &'static str {
        match self {
            ReducedSystem::Uniform => "uniform",
            ReducedSystem::PhaseGrad => "phase_grad",
        }
    }
}

impl FromStr for ReducedSystem {
    type Err = ChevronError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(ReducedSystem::Uniform),
            "phase_grad" | "phasegrad" => Ok(ReducedSystem::PhaseGrad),
            other => Err(ChevronError::InvalidParameter(format!(
                "unknown reduced system '{other}' (expected uniform or phase_grad)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub h: f64,
    /// Phase gradient `d_y psi`; ignored by the uniform system.
    pub chi: f64,
}

impl Default for ReducedParams {
    fn default() -> Self {
        Self { tau: 1.0, c1: 0.5, c2: 1.0, h: 0.5, chi: 0.0 }
    }
}

impl ReducedParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(ChevronError::InvalidParameter(format!("tau must be > 0, got {}", self.tau)));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("h", self.h), ("chi", self.chi)] {
            if !v.is_finite() {
                return Err(ChevronError::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Squared circle radius `1 + (c1^2 - 1) chi^2`.
    pub fn radius_sq(&self) -> f64 {
        1.0 + (self.c1 * self.c1 - 1.0) * self.chi * self.chi
    }

    fn effective_chi(&self, system: ReducedSystem) -> f64 {
        match system {
            ReducedSystem::Uniform => 0.0,
            ReducedSystem::PhaseGrad => self.chi,
        }
    }
}

pub fn rhs_uniform(rho: f64, phi: f64, p: &ReducedParams) -> (f64, f64) {
    (rho * (1.0 - phi * phi - rho * rho) / p.tau, phi * (rho * rho - p.h))
}

pub fn rhs_phase_grad(rho: f64, phi: f64, p: &ReducedParams) -> (f64, f64) {
    let (c1, chi) = (p.c1, p.chi);
    let s = phi - c1 * chi;
    let drho = rho * ((1.0 - rho * rho) - s * s - (1.0 - c1 * c1) * chi * chi) / p.tau;
    let dphi = -p.h * phi + rho * rho * (phi - p.c2 * chi);
    (drho, dphi)
}

pub fn rhs(system: ReducedSystem, rho: f64, phi: f64, p: &ReducedParams) -> (f64, f64) {
    match system {
        ReducedSystem::Uniform => rhs_uniform(rho, phi, p),
        ReducedSystem::PhaseGrad => rhs_phase_grad(rho, phi, p),
    }
}

/// Euclidean norm of the right-hand side.
pub fn residual(system: ReducedSystem, rho: f64, phi: f64, p: &ReducedParams) -> f64 {
    let (f, g) = rhs(system, rho, phi, p);
    f.hypot(g)
}

/// Analytic Jacobian `[[df/drho, df/dphi], [dg/drho, dg/dphi]]`.
pub fn jacobian(system: ReducedSystem, rho: f64, phi: f64, p: &ReducedParams) -> [[f64; 2]; 2] {
    let chi = p.effective_chi(system);
    let (c1, c2) = (p.c1, p.c2);
    let s = phi - c1 * chi;
    let base = (1.0 - s * s) - (1.0 - c1 * c1) * chi * chi;
    [
        [(base - 3.0 * rho * rho) / p.tau, -2.0 * rho * s / p.tau],
        [2.0 * rho * (phi - c2 * chi), -p.h + rho * rho],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedPointKind {
    Saddle,
    SpiralSink,
    SpiralSource,
    NodeSink,
    NodeSource,
    CenterMarginal,
    Degenerate,
}

impl FixedPointKind {
    pub fn name(self) -> &'static str {
        match self {
            FixedPointKind::Saddle => "SADDLE",
            FixedPointKind::SpiralSink => "SPIRAL_SINK",
            FixedPointKind::SpiralSource => "SPIRAL_SOURCE",
            FixedPointKind::NodeSink => "NODE_SINK",
            FixedPointKind::NodeSource => "NODE_SOURCE",
            FixedPointKind::CenterMarginal => "CENTER_MARGINAL",
            FixedPointKind::Degenerate => "DEGENERATE",
        }
    }
}

impl std::fmt::Display for FixedPointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub rho: f64,
    pub phi: f64,
    /// Ordered by real part, then imaginary part.
    pub eigenvalues: [Complex64; 2],
    pub kind: FixedPointKind,
}

/// Residual above which `classify` refuses a point.
pub const CLASSIFY_RESIDUAL_TOL: f64 = 1e-9;

pub fn eigenvalues(j: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    let half = tr / 2.0;
    if disc >= 0.0 {
        // Avoid cancellation in the smaller root.
        let r = disc.sqrt();
        let big = if half >= 0.0 { half + r } else { half - r };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (a, b) = if big <= small { (big, small) } else { (small, big) };
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
    } else {
        let w = (-disc).sqrt();
        [Complex64::new(half, -w), Complex64::new(half, w)]
    }
}

/// Linearization taxonomy; a component counts as zero below
/// `1e-9 (1 + max |lambda|)`, and ties go to `Degenerate`.
pub fn kind_of(ev: [Complex64; 2]) -> FixedPointKind {
    let tol = 1e-9 * (1.0 + ev[0].norm().max(ev[1].norm()));
    if ev.iter().any(|l| l.norm() < tol) {
        return FixedPointKind::Degenerate;
    }
    if ev[0].im.abs() >= tol {
        let re = ev[0].re;
        return if re.abs() < tol {
            FixedPointKind::CenterMarginal
        } else if re < 0.0 {
            FixedPointKind::SpiralSink
        } else {
            FixedPointKind::SpiralSource
        };
    }
    let (a, b) = (ev[0].re, ev[1].re);
    if a < 0.0 && b > 0.0 || a > 0.0 && b < 0.0 {
        FixedPointKind::Saddle
    } else if a < 0.0 {
        FixedPointKind::NodeSink
    } else {
        FixedPointKind::NodeSource
    }
}

pub fn classify(system: ReducedSystem, p: &ReducedParams, rho: f64, phi: f64) -> Result<FixedPoint> {
    let r = residual(system, rho, phi, p);
    if !(r <= CLASSIFY_RESIDUAL_TOL) {
        return Err(ChevronError::NotAnEquilibrium { rho, phi, residual: r });
    }
    let eigenvalues = eigenvalues(jacobian(system, rho, phi, p));
    Ok(FixedPoint { rho, phi, eigenvalues, kind: kind_of(eigenvalues) })
}

/// `1/sqrt(1 - c1^2)` for `c1 < 1`: the circle of equilibria shrinks to a
/// point there. `None` for `c1 >= 1`, where the radius grows with `|chi|`.
pub fn critical_chi(c1: f64) -> Option<f64> {
    let c1 = c1.abs();
    (c1 < 1.0).then(|| 1.0 / (1.0 - c1 * c1).sqrt())
}

/// Time-ordered `(t, rho, phi)` samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Orbit {
    pub samples: Vec<(f64, f64, f64)>,
}

impl Orbit {
    pub fn last(&self) -> Option<(f64, f64, f64)> {
        self.samples.last().copied()
    }
}

/// `|state|` beyond which an orbit is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Classical RK4 from `initial` to `t_end`, sampling every step.
pub fn integrate(system: ReducedSystem, p: &ReducedParams, initial: (f64, f64), t_end: f64, dt: f64) -> Result<Orbit> {
    integrate_sampled(system, p, initial, t_end, dt, 1)
}

/// As [`integrate`], keeping every `stride`-th step plus the final state.
/// The step is shrunk so that a whole number of steps lands on `t_end`.
pub fn integrate_sampled(
    system: ReducedSystem,
    p: &ReducedParams,
    initial: (f64, f64),
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Orbit> {
    p.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ChevronError::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(ChevronError::InvalidParameter(format!("t_end must be >= 0, got {t_end}")));
    }
    if !(initial.0.is_finite() && initial.1.is_finite()) {
        return Err(ChevronError::InvalidParameter(format!("non-finite initial point {initial:?}")));
    }
    let stride = stride.max(1);
    let n = (t_end / dt).ceil() as usize;
    let h = if n == 0 { 0.0 } else { t_end / n as f64 };
    let on_axis = initial.0 == 0.0;
    let f = |r: f64, q: f64| rhs(system, r, q, p);

    let (mut r, mut q) = initial;
    let mut samples = Vec::with_capacity(n / stride + 2);
    samples.push((0.0, r, q));
    for k in 1..=n {
        let (k1r, k1q) = f(r, q);
        let (k2r, k2q) = f(r + 0.5 * h * k1r, q + 0.5 * h * k1q);
        let (k3r, k3q) = f(r + 0.5 * h * k2r, q + 0.5 * h * k2q);
        let (k4r, k4q) = f(r + h * k3r, q + h * k3q);
        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        let t = k as f64 * h;
        let norm = r.hypot(q);
        if !(norm <= DIVERGENCE_THRESHOLD) {
            return Err(ChevronError::Divergence { t, norm });
        }
        if on_axis {
            assert!(r.abs() <= 1e-12, "rho left the invariant axis: rho = {r} at t = {t}");
        }
        if k % stride == 0 || k == n {
            samples.push((t, r, q));
        }
    }
    Ok(Orbit { samples })
}
