//! Temporal self-convergence: the same problem at `dt`, `dt/2`, `dt/4`,
//! compared against a `dt/8` reference.

use super::{Scheme, Stepper, StepperConfig};
use crate::error::{ChevronError, Result};
use crate::params::ChevronParams;
use crate::state::SimState;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub dts: [f64; 3],
    pub errors: [f64; 3],
    /// `orders[0] = log2(e(dt) / e(dt/2))`, `orders[1] = log2(e(dt/2) / e(dt/4))`.
    /// The second ratio is biased upward by the reference error.
    pub orders: [f64; 2],
}

impl ConvergenceReport {
    /// The reported order of the scheme, `orders[0]`.
    pub fn order(&self) -> f64 {
        self.orders[0]
    }
}

/// Order estimated from two `(dt, error)` pairs.
pub fn observed_order(coarse: (f64, f64), fine: (f64, f64)) -> Result<f64> {
    let (dt1, e1) = coarse;
    let (dt2, e2) = fine;
    if dt1 == dt2 {
        return Err(ChevronError::Degenerate("identical step sizes: order undefined".into()));
    }
    if !(e1 > 0.0 && e2 > 0.0 && e1.is_finite() && e2.is_finite()) {
        return Err(ChevronError::Degenerate(format!("errors must be positive and finite, got {e1:e} and {e2:e}")));
    }
    Ok((e1 / e2).ln() / (dt1 / dt2).ln())
}

fn integrate(p: &ChevronParams, initial: &SimState, scheme: Scheme, dt: f64, steps: usize) -> Result<SimState> {
    let stepper = Stepper::new(*p, *initial.grid(), StepperConfig::new(scheme, dt)?)?;
    let mut s = initial.clone();
    for _ in 0..steps {
        s = stepper.step(&s)?;
    }
    Ok(s)
}

fn distance(p: &ChevronParams, a: &SimState, b: &SimState) -> Result<f64> {
    Ok((p.tau * a.a.sub(&b.a)?.l2_norm_sq() + a.phi.sub(&b.phi)?.l2_norm_sq()).sqrt())
}

/// Runs the self-convergence study to `t_end`. `dt` is rounded down so that
/// `t_end` is an integer number of steps.
pub fn convergence_study(
    p: &ChevronParams,
    initial: &SimState,
    scheme: Scheme,
    dt: f64,
    t_end: f64,
) -> Result<ConvergenceReport> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(ChevronError::InvalidParameter(format!("need dt > 0 and t_end > 0, got {dt}, {t_end}")));
    }
    let n = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / n as f64;
    let reference = integrate(p, initial, scheme, h / 8.0, 8 * n)?;
    let mut dts = [0.0; 3];
    let mut errors = [0.0; 3];
    for (k, factor) in [1usize, 2, 4].into_iter().enumerate() {
        dts[k] = h / factor as f64;
        let s = integrate(p, initial, scheme, dts[k], factor * n)?;
        errors[k] = distance(p, &s, &reference)?;
    }
    let orders = [
        observed_order((dts[0], errors[0]), (dts[1], errors[1]))?,
        observed_order((dts[1], errors[1]), (dts[2], errors[2]))?,
    ];
    Ok(ConvergenceReport { scheme, dts, errors, orders })
}

pub fn order_of_convergence(
    p: &ChevronParams,
    initial: &SimState,
    scheme: Scheme,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    Ok(convergence_study(p, initial, scheme, dt, t_end)?.order())
}
